#include "etcons/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "etcons/errors.hpp"
#include "etcons/kernels.hpp"

namespace etcons {

bool ParameterBox::contains(std::span<const double> theta) const {
  if (theta.size() != lower.size()) return false;
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (!(theta[i] >= lower[i] && theta[i] <= upper[i])) return false;
  return true;
}

void SystemModel::validate() const {
  if (state_dim == 0 || input_dim == 0) throw ModelError(name + ": state and input dimensions must be positive");
  if (!f || !jacobian) throw ModelError(name + ": vector field and Jacobian are required");
  if (B.rows() != state_dim || B.cols() != input_dim) throw ModelError(name + ": B must be n×m");
  if (omega.lower.size() != omega.upper.size()) throw ModelError(name + ": malformed parameter box");
  if (theta_true.size() != param_dim() || theta_hat.size() != param_dim())
    throw ModelError(name + ": expected " + std::to_string(param_dim()) + " parameter(s)");
  if (!omega.contains(theta_true)) throw ModelError(name + ": theta lies outside the parameter box");
  if (!omega.contains(theta_hat)) throw ModelError(name + ": theta_hat lies outside the parameter box");
}

Vector eval_f(const SystemModel& model, std::span<const double> x, std::span<const double> theta) {
  if (x.size() != model.state_dim) throw ModelError("eval_f: state dimension mismatch");
  if (theta.size() != model.param_dim()) throw ModelError("eval_f: parameter dimension mismatch");
  return model.f(x, theta);
}

Matrix eval_jacobian(const SystemModel& model, std::span<const double> x, std::span<const double> theta) {
  if (x.size() != model.state_dim) throw ModelError("eval_jacobian: state dimension mismatch");
  if (theta.size() != model.param_dim()) throw ModelError("eval_jacobian: parameter dimension mismatch");
  return model.jacobian(x, theta);
}

SystemModel paper_system(double theta, double theta_hat) {
  SystemModel m;
  m.name = "paper-sys";
  m.state_dim = 2;
  m.input_dim = 1;
  m.f = [](std::span<const double> z, std::span<const double> p) {
    const double th = p[0];
    const double c2 = std::cos(z[1]);
    return Vector{z[1] + th * c2, -z[0] + th * c2 + th * th * std::cos(z[0]) * std::sin(z[0])};
  };
  m.jacobian = [](std::span<const double> z, std::span<const double> p) {
    const double th = p[0];
    const double s2 = std::sin(z[1]);
    // d/dz₁ [cos z₁ sin z₁] = cos 2z₁
    return Matrix{{0.0, 1.0 - th * s2}, {-1.0 + th * th * std::cos(2.0 * z[0]), -th * s2}};
  };
  m.B = Matrix{{0.0}, {-1.0}};
  m.theta_true = {theta};
  m.theta_hat = {theta_hat};
  m.omega = {{0.0}, {1.0}};
  m.validate();
  return m;
}

SystemModel zero_model() {
  SystemModel m;
  m.name = "zero-2d";
  m.state_dim = 2;
  m.input_dim = 2;
  m.f = [](std::span<const double>, std::span<const double>) { return Vector{0.0, 0.0}; };
  m.jacobian = [](std::span<const double>, std::span<const double>) { return Matrix(2, 2); };
  m.B = Matrix::identity(2);
  m.validate();
  return m;
}

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, ModelFactory> factories;

  Registry() {
    factories["paper-sys"] = [](const Vector& theta, const Vector& theta_hat) {
      if (theta.size() != 1 || theta_hat.size() != 1)
        throw ModelError("paper-sys takes exactly one parameter (theta)");
      return paper_system(theta[0], theta_hat[0]);
    };
    factories["zero-2d"] = [](const Vector& theta, const Vector& theta_hat) {
      if (!theta.empty() || !theta_hat.empty()) throw ModelError("zero-2d takes no parameters");
      return zero_model();
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_model(const std::string& name, ModelFactory factory) {
  Registry& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[name] = std::move(factory);
}

SystemModel make_model(const std::string& name, const Vector& theta, const Vector& theta_hat) {
  ModelFactory factory;
  {
    Registry& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.factories.find(name);
    if (it == r.factories.end()) throw ModelError("unknown model '" + name + "'");
    factory = it->second;
  }
  SystemModel m = factory(theta, theta_hat);
  m.validate();
  return m;
}

std::vector<std::string> model_names() {
  Registry& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.factories) names.push_back(name);
  return names;
}

StateGrid StateGrid::stepped(const Vector& lower, const Vector& upper, double step) {
  if (lower.size() != upper.size()) throw ModelError("grid bounds differ in dimension");
  if (!(step > 0.0)) throw ModelError("grid step must be positive");
  StateGrid g;
  for (std::size_t d = 0; d < lower.size(); ++d) {
    Vector axis;
    for (std::size_t k = 0;; ++k) {
      const double v = lower[d] + static_cast<double>(k) * step;
      if (v > upper[d] + 1e-12) break;
      axis.push_back(v);
    }
    g.axes.push_back(std::move(axis));
  }
  return g;
}

StateGrid StateGrid::uniform(const Vector& lower, const Vector& upper, std::size_t points_per_axis) {
  if (lower.size() != upper.size()) throw ModelError("grid bounds differ in dimension");
  StateGrid g;
  for (std::size_t d = 0; d < lower.size(); ++d) {
    Vector axis(points_per_axis);
    for (std::size_t k = 0; k < points_per_axis; ++k)
      axis[k] = points_per_axis == 1 ? lower[d]
                                     : lower[d] + (upper[d] - lower[d]) * static_cast<double>(k) /
                                                      static_cast<double>(points_per_axis - 1);
    g.axes.push_back(std::move(axis));
  }
  return g;
}

StateGrid StateGrid::bounding(const std::vector<Vector>& points, double inflate, std::size_t points_per_axis) {
  if (points.empty()) throw ModelError("bounding grid needs at least one point");
  const std::size_t n = points.front().size();
  Vector lo(n, INFINITY), hi(n, -INFINITY);
  for (const Vector& p : points) {
    if (p.size() != n) throw ModelError("bounding grid: points differ in dimension");
    for (std::size_t d = 0; d < n; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    const double centre = 0.5 * (lo[d] + hi[d]);
    const double half = std::max(0.5 * (hi[d] - lo[d]) * (1.0 + inflate), 1e-3);
    lo[d] = centre - half;
    hi[d] = centre + half;
  }
  return uniform(lo, hi, points_per_axis);
}

std::size_t StateGrid::size() const {
  if (axes.empty()) return 0;
  std::size_t s = 1;
  for (const Vector& a : axes) s *= a.size();
  return s;
}

Vector StateGrid::point(std::size_t flat_index) const {
  // Last axis varies fastest.
  Vector p(axes.size());
  for (std::size_t d = axes.size(); d-- > 0;) {
    const std::size_t len = axes[d].size();
    p[d] = axes[d][flat_index % len];
    flat_index /= len;
  }
  return p;
}

namespace {

void validate_certificate(const SystemModel& model, const CmfCertificate& cert) {
  const std::size_t n = model.state_dim;
  if (cert.P.rows() != n || cert.P.cols() != n) throw CertificateError("P must be n×n");
  if (!is_symmetric(cert.P)) throw CertificateError("P must be symmetric");
  if (!(lambda_min(cert.P) > 0.0)) throw CertificateError("P must be positive definite");
  if (!(cert.rho >= 0.0) || !std::isfinite(cert.rho)) throw CertificateError("rho must be non-negative");
  if (!(cert.q > 0.0) || !std::isfinite(cert.q)) throw CertificateError("q must be positive");
}

void validate_grid(const StateGrid& grid, const std::vector<Vector>& thetas, std::size_t n) {
  if (grid.size() == 0) throw ModelError("state grid is empty");
  if (grid.dim() != n) throw ModelError("state grid dimension differs from the model");
  if (thetas.empty()) throw ModelError("parameter sample set is empty");
}

// qP − ρPBBᵀP
Matrix cmf_constant_part(const SystemModel& model, const CmfCertificate& cert) {
  const Matrix pb = cert.P * model.B;
  return cert.q * cert.P - cert.rho * (pb * pb.transpose());
}

}  // namespace

Matrix cmf_matrix(const SystemModel& model, const CmfCertificate& cert, std::span<const double> x,
                  std::span<const double> theta) {
  const Matrix j = eval_jacobian(model, x, theta);
  return j.transpose() * cert.P + cert.P * j + cmf_constant_part(model, cert);
}

CmfReport check_cmf_generic(const SystemModel& model, const CmfCertificate& cert, const StateGrid& grid,
                            const std::vector<Vector>& thetas) {
  validate_certificate(model, cert);
  validate_grid(grid, thetas, model.state_dim);
  const Matrix constant = cmf_constant_part(model, cert);
  CmfReport report;
  report.kernel = "jacobi";
  report.worst_margin = -INFINITY;
  for (const Vector& theta : thetas) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vector x = grid.point(k);
      const Matrix j = eval_jacobian(model, x, theta);
      const double margin = lambda_max(j.transpose() * cert.P + cert.P * j + constant);
      ++report.points_checked;
      if (margin > report.worst_margin) {
        report.worst_margin = margin;
        report.worst_x = x;
        report.worst_theta = theta;
      }
    }
  }
  report.holds = report.worst_margin <= kCmfTolerance;
  return report;
}

CmfReport check_cmf(const SystemModel& model, const CmfCertificate& cert, const StateGrid& grid,
                    const std::vector<Vector>& thetas) {
  if (model.state_dim != 2) return check_cmf_generic(model, cert, grid, thetas);
  validate_certificate(model, cert);
  validate_grid(grid, thetas, model.state_dim);

  const Matrix constant = cmf_constant_part(model, cert);
  kernels::CmfConstants2 k;
  k.p00 = cert.P(0, 0);
  k.p01 = cert.P(0, 1);
  k.p11 = cert.P(1, 1);
  k.c00 = constant(0, 0);
  k.c01 = 0.5 * (constant(0, 1) + constant(1, 0));
  k.c11 = constant(1, 1);

  const kernels::GridKernels& kern = kernels::active_kernels();
  const std::size_t count = grid.size();
  Vector j00(count), j01(count), j10(count), j11(count), margins(count);

  CmfReport report;
  report.kernel = std::string(kern.name);
  report.worst_margin = -INFINITY;
  for (const Vector& theta : thetas) {
    for (std::size_t i = 0; i < count; ++i) {
      const Matrix j = eval_jacobian(model, grid.point(i), theta);
      j00[i] = j(0, 0);
      j01[i] = j(0, 1);
      j10[i] = j(1, 0);
      j11[i] = j(1, 1);
    }
    kern.cmf_margins({j00, j01, j10, j11}, k, margins);
    const std::size_t best = kernels::argmax(margins);
    report.points_checked += count;
    if (margins[best] > report.worst_margin) {
      report.worst_margin = margins[best];
      report.worst_x = grid.point(best);
      report.worst_theta = theta;
    }
  }
  report.holds = report.worst_margin <= kCmfTolerance;
  return report;
}

LipschitzData estimate_lipschitz(const SystemModel& model, const StateGrid& grid) {
  if (grid.size() == 0) throw ModelError("estimate_lipschitz: empty grid");
  if (grid.dim() != model.state_dim) throw ModelError("estimate_lipschitz: grid dimension differs from the model");

  const std::size_t count = grid.size();
  LipschitzData out;
  const std::vector<Vector> thetas{model.theta_true, model.theta_hat};

  if (model.state_dim == 2) {
    const kernels::GridKernels& kern = kernels::active_kernels();
    Vector j00(count), j01(count), j10(count), j11(count), norms(count);
    for (const Vector& theta : thetas) {
      for (std::size_t i = 0; i < count; ++i) {
        const Matrix j = eval_jacobian(model, grid.point(i), theta);
        j00[i] = j(0, 0);
        j01[i] = j(0, 1);
        j10[i] = j(1, 0);
        j11[i] = j(1, 1);
      }
      kern.spectral_norms({j00, j01, j10, j11}, norms);
      out.raw_k = std::max(out.raw_k, norms[kernels::argmax(norms)]);
    }
    Vector dx(count), dy(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Vector x = grid.point(i);
      const Vector d = subtract(eval_f(model, x, model.theta_hat), eval_f(model, x, model.theta_true));
      dx[i] = d[0];
      dy[i] = d[1];
    }
    kern.norms2(dx, dy, norms);
    out.raw_delta = norms[kernels::argmax(norms)];
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const Vector x = grid.point(i);
      for (const Vector& theta : thetas) out.raw_k = std::max(out.raw_k, spectral_norm(eval_jacobian(model, x, theta)));
      out.raw_delta = std::max(
          out.raw_delta, norm2(subtract(eval_f(model, x, model.theta_hat), eval_f(model, x, model.theta_true))));
    }
  }
  out.k = kLipschitzSafetyFactor * out.raw_k;
  out.delta = kLipschitzSafetyFactor * out.raw_delta;
  return out;
}

}  // namespace etcons
