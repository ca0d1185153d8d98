#include "netlqr/gains_io.hpp"

#include "netlqr/errors.hpp"

namespace netlqr {

namespace {

Json matrix_sequence(const std::vector<Matrix>& seq) {
  Json out = Json::array();
  for (const auto& m : seq) out.push_back(matrix_to_json(m));
  return out;
}

std::vector<Matrix> matrix_sequence_from(const Json& j, const std::string& what) {
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m, what));
  return out;
}

}  // namespace

Json gains_to_json(const GainSchedule& s, const RunManifest& manifest) {
  Json j;
  j["format"] = kGainsFormat;
  j["manifest"] = manifest.to_json();
  Json du = Json::array({s.dims.d_u0});
  for (Index v : s.dims.d_u) du.push_back(v);
  j["dims"] = {{"n_subsystems", s.dims.n_subsystems()}, {"d_x", s.dims.d_x}, {"d_u", du}};
  j["horizon"] = s.dims.horizon;
  j["P"] = matrix_sequence(s.P);
  j["K"] = matrix_sequence(s.K);
  Json pt = Json::array(), kt = Json::array();
  for (std::size_t i = 0; i < s.Ptilde.size(); ++i) {
    pt.push_back(matrix_sequence(s.Ptilde[i]));
    kt.push_back(matrix_sequence(s.Ktilde[i]));
  }
  j["Ptilde"] = std::move(pt);
  j["Ktilde"] = std::move(kt);
  j["e"] = s.e;
  return j;
}

LoadedGains gains_from_json(const Json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != kGainsFormat) {
      throw FormatError(std::string("gains: format must be '") + kGainsFormat + "'");
    }
    LoadedGains out;
    out.manifest = RunManifest::from_json(j.value("manifest", Json::object()));
    GainSchedule& s = out.schedule;
    const Json& dims = j.at("dims");
    s.dims.d_x = dims.at("d_x").get<std::vector<Index>>();
    const auto du = dims.at("d_u").get<std::vector<Index>>();
    if (du.size() != s.dims.d_x.size() + 1) throw FormatError("gains: d_u needs N+1 entries");
    s.dims.d_u0 = du.front();
    s.dims.d_u.assign(du.begin() + 1, du.end());
    s.dims.horizon = j.at("horizon").get<int>();
    s.P = matrix_sequence_from(j.at("P"), "gains.P");
    s.K = matrix_sequence_from(j.at("K"), "gains.K");
    for (const auto& seq : j.at("Ptilde")) s.Ptilde.push_back(matrix_sequence_from(seq, "gains.Ptilde"));
    for (const auto& seq : j.at("Ktilde")) s.Ktilde.push_back(matrix_sequence_from(seq, "gains.Ktilde"));
    s.e = j.at("e").get<std::vector<double>>();

    const auto T = static_cast<std::size_t>(s.dims.horizon);
    const auto n = s.dims.d_x.size();
    bool ok = s.P.size() == T + 2 && s.K.size() == T + 1 && s.e.size() == T + 2 &&
              s.Ptilde.size() == n && s.Ktilde.size() == n;
    for (std::size_t i = 0; ok && i < n; ++i) {
      ok = s.Ptilde[i].size() == T + 2 && s.Ktilde[i].size() == T + 1;
    }
    if (!ok) throw FormatError("gains: sequence lengths do not match the horizon");
    return out;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("gains: ") + e.what());
  }
}

LoadedGains load_gains(const std::string& path) { return gains_from_json(read_json_file(path)); }

}  // namespace netlqr
