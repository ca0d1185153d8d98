#pragma once

#include <string>

#include "netlqr/manifest.hpp"
#include "netlqr/synthesis.hpp"

namespace netlqr {

inline constexpr const char* kGainsFormat = "netlqr-gains/1";

Json gains_to_json(const GainSchedule& schedule, const RunManifest& manifest);

struct LoadedGains {
  GainSchedule schedule;
  RunManifest manifest;
};

LoadedGains gains_from_json(const Json& j);
LoadedGains load_gains(const std::string& path);

}  // namespace netlqr
