#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netlqr/json_util.hpp"

namespace netlqr {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance block embedded in every artifact the CLI writes.
///
/// Everything except `wall_clock` is a deterministic function of the
/// command's inputs; `wall_clock` carries the start time and phase timings.
struct RunManifest {
  std::string command;
  std::string model_hash;
  std::vector<std::uint64_t> seeds;
  Json parameters = Json::object();
  std::string tool_version = kToolVersion;
  Json wall_clock = Json::object();

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

/// UTC timestamp, ISO-8601 with seconds.
std::string utc_timestamp();

/// Hash of an artifact with every `manifest.wall_clock` field removed.
std::string artifact_hash(Json artifact);

}  // namespace netlqr
