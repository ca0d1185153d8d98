#include "netlqr/model_io.hpp"

#include <fstream>
#include <sstream>

#include "netlqr/errors.hpp"

namespace netlqr {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw FormatError(what + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw FormatError(what + ": rows must be non-empty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Json& row = j[r];
    if (!row.is_array() || row.size() != cols) throw FormatError(what + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw FormatError(what + ": entries must be numbers");
      m(static_cast<Index>(r), static_cast<Index>(c)) = row[c].get<double>();
    }
  }
  if (!m.allFinite()) throw FormatError(what + ": entries must be finite");
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw FormatError(what + ": expected a non-empty array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw FormatError(what + ": entries must be numbers");
    v(static_cast<Index>(k)) = j[k].get<double>();
  }
  if (!v.allFinite()) throw FormatError(what + ": entries must be finite");
  return v;
}

bool is_matrix_json(const Json& j) {
  return j.is_array() && !j.empty() && j.front().is_array() && !j.front().empty() &&
         j.front().front().is_number();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << h;
  return s.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

Json model_to_json(const ModelSpec& model) {
  Json j;
  j["format"] = kModelFormat;
  const Dims& d = model.dims;
  Json du = Json::array({d.d_u0});
  for (Index v : d.d_u) du.push_back(v);
  j["dims"] = {{"n_subsystems", d.n_subsystems()}, {"d_x", d.d_x}, {"d_u", du}};
  j["horizon"] = d.horizon;

  Json plants = Json::array();
  for (const auto& pl : model.plants) {
    plants.push_back({{"A", matrix_to_json(pl.A)},
                      {"B_local", matrix_to_json(pl.B_local)},
                      {"B_remote", matrix_to_json(pl.B_remote)}});
  }
  j["plants"] = std::move(plants);

  if (model.costs.size() == 1) {
    j["costs"] = {{"shared_R", matrix_to_json(model.costs.front())}};
  } else {
    Json seq = Json::array();
    for (const auto& r : model.costs) seq.push_back(matrix_to_json(r));
    j["costs"] = {{"per_step_R", std::move(seq)}};
  }

  Json mu0 = Json::array(), sigma0 = Json::array(), sigma_w = Json::array();
  for (std::size_t i = 0; i < model.noise.mu0.size(); ++i) {
    mu0.push_back(vector_to_json(model.noise.mu0[i]));
    sigma0.push_back(matrix_to_json(model.noise.sigma0[i]));
    const auto& seq = model.noise.sigma_w[i];
    if (seq.size() == 1) {
      sigma_w.push_back(matrix_to_json(seq.front()));
    } else {
      Json steps = Json::array();
      for (const auto& s : seq) steps.push_back(matrix_to_json(s));
      sigma_w.push_back(std::move(steps));
    }
  }
  j["noise"] = {{"mu0", mu0}, {"sigma0", sigma0}, {"sigma_w", sigma_w},
                {"family", to_string(model.noise.family)}};
  j["channel"] = {{"p", model.channel.p}};
  return j;
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

ModelSpec parse_model(const Json& j) {
  if (!j.is_object()) throw FormatError("model: document must be a JSON object");
  const Json& fmt = field(j, "format", "model");
  if (!fmt.is_string() || fmt.get<std::string>() != kModelFormat) {
    throw FormatError(std::string("model: format must be '") + kModelFormat + "'");
  }
  ModelSpec m;
  const Json& dims = field(j, "dims", "model");
  const int n = field(dims, "n_subsystems", "dims").get<int>();
  m.dims.d_x = field(dims, "d_x", "dims").get<std::vector<Index>>();
  const auto du = field(dims, "d_u", "dims").get<std::vector<Index>>();
  if (static_cast<int>(m.dims.d_x.size()) != n || static_cast<int>(du.size()) != n + 1) {
    throw FormatError("dims: d_x needs N entries and d_u needs N+1 entries");
  }
  m.dims.d_u0 = du.front();
  m.dims.d_u.assign(du.begin() + 1, du.end());
  m.dims.horizon = field(j, "horizon", "model").get<int>();

  for (const auto& pl : field(j, "plants", "model")) {
    m.plants.push_back({matrix_from_json(field(pl, "A", "plant"), "plant.A"),
                        matrix_from_json(field(pl, "B_local", "plant"), "plant.B_local"),
                        matrix_from_json(field(pl, "B_remote", "plant"), "plant.B_remote")});
  }

  const Json& costs = field(j, "costs", "model");
  if (costs.contains("shared_R")) {
    m.costs.push_back(matrix_from_json(costs.at("shared_R"), "costs.shared_R"));
  } else if (costs.contains("per_step_R")) {
    for (const auto& r : costs.at("per_step_R")) {
      m.costs.push_back(matrix_from_json(r, "costs.per_step_R"));
    }
  } else {
    throw FormatError("costs: expected 'shared_R' or 'per_step_R'");
  }

  const Json& noise = field(j, "noise", "model");
  for (const auto& v : field(noise, "mu0", "noise")) {
    m.noise.mu0.push_back(vector_from_json(v, "noise.mu0"));
  }
  for (const auto& s : field(noise, "sigma0", "noise")) {
    m.noise.sigma0.push_back(matrix_from_json(s, "noise.sigma0"));
  }
  for (const auto& s : field(noise, "sigma_w", "noise")) {
    std::vector<Matrix> seq;
    if (is_matrix_json(s)) {
      seq.push_back(matrix_from_json(s, "noise.sigma_w"));
    } else {
      for (const auto& step : s) seq.push_back(matrix_from_json(step, "noise.sigma_w"));
    }
    m.noise.sigma_w.push_back(std::move(seq));
  }
  m.noise.family = noise_family_from_string(field(noise, "family", "noise").get<std::string>());
  m.channel.p = field(field(j, "channel", "model"), "p", "channel").get<std::vector<double>>();
  symmetrize_in_place(m);
  return m;
}

}  // namespace

ModelSpec model_from_json(const Json& j) {
  try {
    return parse_model(j);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

ModelSpec load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

void save_model(const std::string& path, const ModelSpec& model) {
  write_json_file(path, model_to_json(model));
}

std::string model_hash(const ModelSpec& model) { return fnv1a_hex(model_to_json(model).dump()); }

}  // namespace netlqr
