#include "netlqr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "netlqr/errors.hpp"

namespace netlqr {

namespace {

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

template <class T>
bool all_same(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!same(a[k], b[k])) return false;
  }
  return true;
}

std::string shape(const Matrix& m) {
  std::ostringstream s;
  s << m.rows() << "x" << m.cols();
  return s.str();
}

}  // namespace

Index Dims::total_x() const { return std::accumulate(d_x.begin(), d_x.end(), Index{0}); }

Index Dims::total_u() const { return d_u0 + std::accumulate(d_u.begin(), d_u.end(), Index{0}); }

Index Dims::x_offset(int i) const {
  return std::accumulate(d_x.begin(), d_x.begin() + i, Index{0});
}

Index Dims::u_offset(int i) const {
  return d_u0 + std::accumulate(d_u.begin(), d_u.begin() + i, Index{0});
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Custom: return "custom";
  }
  return "gaussian";
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseFamily::Gaussian;
  if (s == "uniform") return NoiseFamily::Uniform;
  if (s == "custom" || s == "custom-sampler") return NoiseFamily::Custom;
  throw FormatError("unknown noise family '" + s + "'");
}

bool NoiseSpec::operator==(const NoiseSpec& o) const {
  if (family != o.family || !all_same(mu0, o.mu0) || !all_same(sigma0, o.sigma0)) return false;
  if (sigma_w.size() != o.sigma_w.size()) return false;
  for (std::size_t i = 0; i < sigma_w.size(); ++i) {
    if (!all_same(sigma_w[i], o.sigma_w[i])) return false;
  }
  return true;
}

bool ModelSpec::operator==(const ModelSpec& o) const {
  return dims == o.dims && plants == o.plants && all_same(costs, o.costs) && noise == o.noise &&
         channel == o.channel;
}

Matrix CostBlocks::xx() const {
  const Index nx = dims_.total_x();
  return r_.topLeftCorner(nx, nx);
}

Matrix CostBlocks::xu() const {
  const Index nx = dims_.total_x();
  return r_.topRightCorner(nx, dims_.total_u());
}

Matrix CostBlocks::uu() const {
  const Index nu = dims_.total_u();
  return r_.bottomRightCorner(nu, nu);
}

Matrix CostBlocks::xx_local(int i) const {
  const Index off = dims_.x_offset(i);
  return r_.block(off, off, dims_.d_x[i], dims_.d_x[i]);
}

Matrix CostBlocks::xu_local(int i) const {
  const Index col = dims_.total_x() + dims_.u_offset(i);
  return r_.block(dims_.x_offset(i), col, dims_.d_x[i], dims_.d_u[i]);
}

Matrix CostBlocks::uu_local(int i) const {
  const Index off = dims_.total_x() + dims_.u_offset(i);
  return r_.block(off, off, dims_.d_u[i], dims_.d_u[i]);
}

std::vector<Violation> validate(const ModelSpec& model) {
  std::vector<Violation> out;
  auto report = [&out](std::string code, std::string where, std::string message) {
    out.push_back({std::move(code), std::move(where), std::move(message)});
  };

  const Dims& dims = model.dims;
  const int n = dims.n_subsystems();
  const int horizon = dims.horizon;

  // Dimension sanity gates everything else: later checks index by these.
  if (n < 1) report("dims_invalid", "dims", "n_subsystems must be at least 1");
  if (horizon < 0) report("dims_invalid", "dims.horizon", "horizon must be >= 0");
  if (dims.d_u0 < 1) report("dims_invalid", "dims.d_u[0]", "remote action dimension must be >= 1");
  if (static_cast<int>(dims.d_u.size()) != n) {
    report("dims_invalid", "dims.d_u", "expected one local action dimension per subsystem");
  }
  for (int i = 0; i < n; ++i) {
    if (dims.d_x[i] < 1) report("dims_invalid", "dims.d_x", "state dimensions must be >= 1");
    if (i < static_cast<int>(dims.d_u.size()) && dims.d_u[i] < 1) {
      report("dims_invalid", "dims.d_u", "action dimensions must be >= 1");
    }
  }
  if (!out.empty()) return out;

  const auto steps = static_cast<std::size_t>(horizon) + 1;
  auto count_ok = [steps](std::size_t c) { return c == 1 || c == steps; };

  if (static_cast<int>(model.plants.size()) != n) {
    report("count_mismatch", "plants", "expected one plant block per subsystem");
  }
  if (!count_ok(model.costs.size())) {
    report("count_mismatch", "costs", "expected one shared R or T+1 per-step R_t");
  }
  if (static_cast<int>(model.noise.mu0.size()) != n ||
      static_cast<int>(model.noise.sigma0.size()) != n ||
      static_cast<int>(model.noise.sigma_w.size()) != n) {
    report("count_mismatch", "noise", "expected mu0/sigma0/sigma_w per subsystem");
  } else {
    for (int i = 0; i < n; ++i) {
      if (!count_ok(model.noise.sigma_w[i].size())) {
        report("count_mismatch", "noise.sigma_w[" + std::to_string(i) + "]",
               "expected one shared or T+1 per-step covariances");
      }
    }
  }
  if (static_cast<int>(model.channel.p.size()) != n) {
    report("count_mismatch", "channel.p", "expected one failure probability per uplink");
  }
  if (!out.empty()) return out;

  for (int i = 0; i < n; ++i) {
    const auto& pl = model.plants[i];
    const std::string where = "plants[" + std::to_string(i) + "]";
    const Index dx = dims.d_x[i];
    if (pl.A.rows() != dx || pl.A.cols() != dx) {
      report("dim_mismatch", where + ".A", "got " + shape(pl.A));
    }
    if (pl.B_local.rows() != dx || pl.B_local.cols() != dims.d_u[i]) {
      report("dim_mismatch", where + ".B_local", "got " + shape(pl.B_local));
    }
    if (pl.B_remote.rows() != dx || pl.B_remote.cols() != dims.d_u0) {
      report("dim_mismatch", where + ".B_remote", "got " + shape(pl.B_remote));
    }
    if (!pl.A.allFinite() || !pl.B_local.allFinite() || !pl.B_remote.allFinite()) {
      report("non_finite", where, "plant matrices must be finite");
    }
    const std::string nwhere = "noise[" + std::to_string(i) + "]";
    if (model.noise.mu0[i].size() != dx) report("dim_mismatch", nwhere + ".mu0", "wrong length");
    if (model.noise.sigma0[i].rows() != dx || model.noise.sigma0[i].cols() != dx) {
      report("dim_mismatch", nwhere + ".sigma0", "got " + shape(model.noise.sigma0[i]));
    } else if (!model.noise.sigma0[i].allFinite()) {
      report("non_finite", nwhere + ".sigma0", "covariance must be finite");
    } else if (!is_psd(model.noise.sigma0[i])) {
      report("cov_not_PSD", nwhere + ".sigma0", "initial covariance is not PSD");
    }
    for (std::size_t t = 0; t < model.noise.sigma_w[i].size(); ++t) {
      const Matrix& s = model.noise.sigma_w[i][t];
      const std::string w = nwhere + ".sigma_w[" + std::to_string(t) + "]";
      if (s.rows() != dx || s.cols() != dx) {
        report("dim_mismatch", w, "got " + shape(s));
      } else if (!s.allFinite()) {
        report("non_finite", w, "covariance must be finite");
      } else if (!is_psd(s)) {
        report("cov_not_PSD", w, "noise covariance is not PSD");
      }
    }
    const double p = model.channel.p[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      report("prob_out_of_range", "channel.p[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
  }

  const Index size = dims.total_x() + dims.total_u();
  for (std::size_t t = 0; t < model.costs.size(); ++t) {
    const Matrix& r = model.costs[t];
    const std::string where = "costs[" + std::to_string(t) + "]";
    if (r.rows() != size || r.cols() != size) {
      report("dim_mismatch", where, "got " + shape(r) + ", expected " + std::to_string(size));
      continue;
    }
    if (!r.allFinite()) {
      report("non_finite", where, "cost matrix must be finite");
      continue;
    }
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      report("not_symmetric", where, "R must be symmetric");
    }
    if (!is_psd(r)) report("R_not_PSD", where, "R is not PSD");
    if (!is_pd(CostBlocks(dims, r).uu())) report("RUU_not_PD", where, "R^UU is not PD");
  }
  return out;
}

void require_valid(const ModelSpec& model) {
  const auto violations = validate(model);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid model:";
  for (const auto& v : violations) msg << " [" << v.code << " at " << v.where << ": " << v.message << "]";
  throw ValidationError(msg.str());
}

void symmetrize_in_place(ModelSpec& model) {
  for (auto& r : model.costs) {
    if (r.rows() == r.cols()) r = symmetrize(r);
  }
  for (auto& s : model.noise.sigma0) {
    if (s.rows() == s.cols()) s = symmetrize(s);
  }
  for (auto& seq : model.noise.sigma_w) {
    for (auto& s : seq) {
      if (s.rows() == s.cols()) s = symmetrize(s);
    }
  }
}

GlobalDynamics assemble_global(const ModelSpec& model) {
  require_valid(model);
  const Dims& dims = model.dims;
  GlobalDynamics g;
  g.A = Matrix::Zero(dims.total_x(), dims.total_x());
  g.B = Matrix::Zero(dims.total_x(), dims.total_u());
  for (int i = 0; i < dims.n_subsystems(); ++i) {
    const Index row = dims.x_offset(i);
    const auto& pl = model.plants[i];
    g.A.block(row, row, dims.d_x[i], dims.d_x[i]) = pl.A;
    g.B.block(row, 0, dims.d_x[i], dims.d_u0) = pl.B_remote;
    g.B.block(row, dims.u_offset(i), dims.d_x[i], dims.d_u[i]) = pl.B_local;
  }
  return g;
}

namespace {

Matrix uniform_matrix(Index rows, Index cols, double lo, double hi, Rng& rng) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = lo + (hi - lo) * uniform01(rng);
  }
  return m;
}

Matrix uniform_symmetric(Index d, double lo, double hi, Rng& rng) {
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = r; c < d; ++c) {
      m(r, c) = lo + (hi - lo) * uniform01(rng);
      m(c, r) = m(r, c);
    }
  }
  return m;
}

}  // namespace

Matrix random_pd_matrix(Index d, double lo, double hi, PdSampling method, Rng& rng,
                        const std::string& context) {
  if (method == PdSampling::Rejection) {
    for (int attempt = 0; attempt < kPdRetryCap; ++attempt) {
      Matrix m = uniform_symmetric(d, lo, hi, rng);
      if (is_pd(m)) return m;
    }
    throw GenerationError(context + ": no PD matrix after " + std::to_string(kPdRetryCap) +
                          " rejection-sampling attempts");
  }
  Matrix m = uniform_symmetric(d, lo, hi, rng);
  const double margin = (hi - lo) / 20.0;
  const double lambda_min = min_symmetric_eigenvalue(m);
  if (lambda_min < margin) m.diagonal().array() += margin - lambda_min;
  return m;
}

ModelSpec random_model(const Dims& dims, const RandomModelOptions& options) {
  if (!(options.lo < options.hi)) throw GenerationError("random_model: entry range needs lo < hi");
  const int n = dims.n_subsystems();
  if (n < 1 || static_cast<int>(dims.d_u.size()) != n || dims.horizon < 0) {
    throw GenerationError("random_model: invalid dimensions");
  }
  Rng rng = make_rng(options.seed, 0, Stream::Generation);

  ModelSpec m;
  m.dims = dims;
  for (int i = 0; i < n; ++i) {
    PlantBlock pl;
    pl.A = uniform_matrix(dims.d_x[i], dims.d_x[i], options.lo, options.hi, rng);
    pl.B_local = uniform_matrix(dims.d_x[i], dims.d_u[i], options.lo, options.hi, rng);
    pl.B_remote = uniform_matrix(dims.d_x[i], dims.d_u0, options.lo, options.hi, rng);
    m.plants.push_back(std::move(pl));
  }
  const Index size = dims.total_x() + dims.total_u();
  const int count = options.per_step_cost ? dims.horizon + 1 : 1;
  for (int t = 0; t < count; ++t) {
    m.costs.push_back(random_pd_matrix(size, options.lo, options.hi, options.pd, rng,
                                       "random_model: R_t at t=" + std::to_string(t)));
  }
  for (int i = 0; i < n; ++i) {
    m.noise.mu0.push_back(Vector::Zero(dims.d_x[i]));
    m.noise.sigma0.push_back(Matrix::Identity(dims.d_x[i], dims.d_x[i]));
    m.noise.sigma_w.push_back({Matrix::Identity(dims.d_x[i], dims.d_x[i])});
  }
  m.noise.family = options.family;
  m.channel.p.assign(n, options.p);
  return m;
}

ModelSpec scalar_test_instance() {
  ModelSpec m;
  m.dims.d_x = {1};
  m.dims.d_u0 = 1;
  m.dims.d_u = {1};
  m.dims.horizon = 2;
  m.plants.push_back({Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0),
                      Matrix::Constant(1, 1, 1.0)});
  m.costs.push_back(Matrix::Identity(3, 3));
  m.noise.mu0 = {Vector::Constant(1, 1.0)};
  m.noise.sigma0 = {Matrix::Constant(1, 1, 1.0)};
  m.noise.sigma_w = {{Matrix::Constant(1, 1, 1.0)}};
  m.channel.p = {0.5};
  return m;
}

}  // namespace netlqr
