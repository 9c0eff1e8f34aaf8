#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "etcons/linalg.hpp"

namespace etcons {

using VectorField = std::function<Vector(std::span<const double> x, std::span<const double> theta)>;
using JacobianField = std::function<Matrix(std::span<const double> x, std::span<const double> theta)>;

struct ParameterBox {
  Vector lower;
  Vector upper;

  std::size_t dim() const noexcept { return lower.size(); }
  bool contains(std::span<const double> theta) const;
};

// Input-affine agent model ẋ = f(x, θ) + B u. Immutable after construction;
// f and jacobian must be pure.
struct SystemModel {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  VectorField f;
  JacobianField jacobian;
  Matrix B;
  Vector theta_true;
  Vector theta_hat;
  ParameterBox omega;

  std::size_t param_dim() const noexcept { return omega.dim(); }
  // Throws ModelError when shapes disagree or θ, θ̂ leave Ω.
  void validate() const;
};

// Dimension-checked evaluation; throws ModelError on mismatch.
Vector eval_f(const SystemModel& model, std::span<const double> x, std::span<const double> theta);
Matrix eval_jacobian(const SystemModel& model, std::span<const double> x, std::span<const double> theta);

// Built-in two-state system with scalar θ:
//   f(z, θ) = (z₂ + θ cos z₂,  −z₁ + θ cos z₂ + θ² cos z₁ sin z₁),  B = (0, −1)ᵀ,  Ω = [0, 1].
SystemModel paper_system(double theta, double theta_hat);
// f ≡ 0 with B = I (n = m = 2) and no parameters.
SystemModel zero_model();

using ModelFactory = std::function<SystemModel(const Vector& theta, const Vector& theta_hat)>;

// Registry keyed by name: "paper-sys", "zero-2d", plus anything registered at runtime.
void register_model(const std::string& name, ModelFactory factory);
SystemModel make_model(const std::string& name, const Vector& theta, const Vector& theta_hat);
std::vector<std::string> model_names();

// Cartesian product grid; axes[d] lists the sample coordinates of dimension d.
struct StateGrid {
  std::vector<Vector> axes;

  // lower + k·step for every k with lower + k·step ≤ upper (+1e-12 slack).
  static StateGrid stepped(const Vector& lower, const Vector& upper, double step);
  static StateGrid uniform(const Vector& lower, const Vector& upper, std::size_t points_per_axis);
  // Bounding box of the points, each half-width inflated by `inflate` (relative).
  static StateGrid bounding(const std::vector<Vector>& points, double inflate, std::size_t points_per_axis);

  std::size_t dim() const noexcept { return axes.size(); }
  std::size_t size() const;
  Vector point(std::size_t flat_index) const;
};

struct CmfCertificate {
  Matrix P;
  double rho = 0.0;
  double q = 0.0;
};

struct CmfReport {
  bool holds = false;
  double worst_margin = 0.0;
  Vector worst_x;
  Vector worst_theta;
  std::size_t points_checked = 0;
  std::string kernel;  // "scalar", "avx2", "neon" or "jacobi"
};

inline constexpr double kCmfTolerance = 1e-9;

// Worst λmax(JᵀP + PJ − ρPBBᵀP + qP) over every (x, θ) pair of grid × thetas.
// holds iff the worst value ≤ kCmfTolerance. Two-state models use the batched
// closed-form kernels; other sizes use Jacobi eigenvalues per point.
// Throws CertificateError when P is not symmetric positive definite, ρ < 0 or q ≤ 0;
// ModelError on an empty grid or theta list.
CmfReport check_cmf(const SystemModel& model, const CmfCertificate& cert, const StateGrid& grid,
                    const std::vector<Vector>& thetas);
// Same, always through the generic Jacobi path.
CmfReport check_cmf_generic(const SystemModel& model, const CmfCertificate& cert, const StateGrid& grid,
                            const std::vector<Vector>& thetas);
// The CMF matrix expression at one point.
Matrix cmf_matrix(const SystemModel& model, const CmfCertificate& cert, std::span<const double> x,
                  std::span<const double> theta);

struct LipschitzData {
  double k = 0.0;
  double delta = 0.0;
  double raw_k = 0.0;      // grid maximum before the safety factor
  double raw_delta = 0.0;
};

inline constexpr double kLipschitzSafetyFactor = 1.05;

// k = 1.05 · max ‖∂f/∂x(x, θ)‖₂ over the grid for θ ∈ {θ, θ̂};
// Δ = 1.05 · max |f(x, θ̂) − f(x, θ)|. Throws ModelError on an empty grid.
LipschitzData estimate_lipschitz(const SystemModel& model, const StateGrid& grid);

}  // namespace etcons
