#include "netlqr/manifest.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace netlqr {

Json RunManifest::to_json() const {
  return {{"command", command},       {"model_hash", model_hash},
          {"seeds", seeds},           {"parameters", parameters},
          {"tool_version", tool_version}, {"wall_clock", wall_clock}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  m.command = j.value("command", "");
  m.model_hash = j.value("model_hash", "");
  if (j.contains("seeds")) m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  m.parameters = j.value("parameters", Json::object());
  m.tool_version = j.value("tool_version", "");
  m.wall_clock = j.value("wall_clock", Json::object());
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::string artifact_hash(Json artifact) {
  if (artifact.contains("manifest") && artifact["manifest"].is_object()) {
    artifact["manifest"].erase("wall_clock");
  }
  return fnv1a_hex(artifact.dump());
}

}  // namespace netlqr
