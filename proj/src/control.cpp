#include "etcons/control.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "etcons/errors.hpp"

namespace etcons {

std::string_view to_string(CtcVariant variant) {
  return variant == CtcVariant::asymptotic ? "asymptotic" : "practical";
}

CtcVariant parse_ctc(std::string_view name) {
  if (name == "asymptotic" || name == "asym") return CtcVariant::asymptotic;
  if (name == "practical" || name == "zeno") return CtcVariant::practical;
  throw ConfigError("trigger.ctc", "must be 'asymptotic' or 'practical', got '" + std::string(name) + "'");
}

namespace {

std::string indexed(const char* field, std::size_t i) {
  return std::string("trigger.") + field + "[" + std::to_string(i) + "]";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void check_gain_condition(double kappa1, double rho, double mu) {
  const double bound = rho / (2.0 * mu);
  if (!(kappa1 > bound))
    throw ConfigError("trigger.kappa1", "kappa1 must exceed rho/(2*mu) = " + fmt(bound) + " (got " + fmt(kappa1) + ")");
}

TriggerParams build_trigger_params(const Laplacian& lap, const Matrix& B, const Matrix& P,
                                   const TriggerSettings& settings) {
  const std::size_t n_agents = lap.n_agents();
  const std::size_t n = P.rows();
  if (!P.square() || B.rows() != n) throw ConfigError("certificate.P", "P must be n×n with n = rows(B)");

  if (!(settings.kappa1 > 0.0)) throw ConfigError("trigger.kappa1", "kappa1 must be positive");
  if (!(settings.kappa2 > 0.0)) throw ConfigError("trigger.kappa2", "kappa2 must be positive");
  if (settings.sigma.size() != n_agents)
    throw ConfigError("trigger.sigma", "expected " + std::to_string(n_agents) + " values");
  for (std::size_t i = 0; i < n_agents; ++i)
    if (!(settings.sigma[i] > 0.0 && settings.sigma[i] < 1.0))
      throw ConfigError(indexed("sigma", i), "requires 0 < sigma_i < 1 (got " + fmt(settings.sigma[i]) + ")");

  TriggerParams p;
  p.variant = settings.variant;
  p.kappa1 = settings.kappa1;
  p.kappa2 = settings.kappa2;
  p.kappa = settings.kappa1 + settings.kappa2;
  p.sigma = settings.sigma;

  const double eps_max = 1.0 / lap.lambda_max;
  p.epsilon = settings.epsilon.value_or(lap.epsilon);
  if (!(p.epsilon > 0.0 && p.epsilon <= eps_max))
    throw ConfigError("trigger.epsilon", "requires 0 < epsilon <= 1/lambda_max(L) = " + fmt(eps_max));

  if (settings.b) {
    if (settings.b->size() != n_agents)
      throw ConfigError("trigger.b", "expected " + std::to_string(n_agents) + " values");
    p.b = *settings.b;
  } else {
    p.b.resize(n_agents);
    for (std::size_t i = 0; i < n_agents; ++i) p.b[i] = 1.0 / (5.0 * lap.degree(i));
  }
  for (std::size_t i = 0; i < n_agents; ++i) {
    const double upper = 1.0 / (2.0 * lap.degree(i));
    if (!(p.b[i] > 0.0 && p.b[i] < upper))
      throw ConfigError(indexed("b", i), "requires 0 < b_i < 1/(2*l_ii) = " + fmt(upper));
  }

  p.xi = settings.xi;
  if (!(p.xi >= 0.0) || !std::isfinite(p.xi)) throw ConfigError("trigger.xi", "xi must be finite and non-negative");
  if (p.variant == CtcVariant::practical && !(p.xi > 0.0))
    throw ConfigError("trigger.xi", "the practical CTC requires xi > 0 (use the asymptotic CTC for xi = 0)");
  if (p.variant == CtcVariant::asymptotic && p.xi != 0.0)
    throw ConfigError("trigger.xi", "the asymptotic CTC has no offset; xi must be 0");

  p.BtP = B.transpose() * P;
  p.BBtP = B * p.BtP;
  p.PBBtP = p.BtP.transpose() * p.BtP;

  const double kappa = p.kappa;
  const double k2eps = p.kappa2 * p.epsilon;
  const double N = static_cast<double>(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    const double lii = lap.degree(i);
    const double bi = p.b[i];
    const double r = 2.0 * kappa;
    const double th = 2.0 * k2eps * (1.0 - 2.0 * lii * bi);
    const double s = 2.0 * kappa * lii * bi + 2.0 * kappa * lii / bi +
                     k2eps * (4.0 * lii / bi - N * lap.M[i] * (bi / 2.0 + 1.0 / (2.0 * bi)));
    p.r_coeff.push_back(r);
    p.theta_coeff.push_back(th);
    p.s_coeff.push_back(s);
    p.R.push_back(r * p.PBBtP);
    p.Theta.push_back(th * p.PBBtP);
    p.S.push_back(s * p.PBBtP);
  }
  return p;
}

Vector control_input(std::size_t i, const EstimatorBank& bank, const Laplacian& lap, const TriggerParams& params) {
  if (i == 0) throw UsageError("control_input: the leader (agent 1) is uncontrolled");
  if (i >= lap.n_agents()) throw UsageError("control_input: unknown agent");
  const std::size_t m = params.BtP.rows();
  Vector u(m, 0.0);
  // Σⱼ l_ij αⱼ rewritten as Σⱼ≠ᵢ l_ij (αⱼ − αᵢ) using the zero row sum, so that
  // identical estimates give exactly zero instead of rounding residue.
  const Vector alpha_i = params.BtP * bank.estimate(i);
  for (std::size_t j = 0; j < lap.n_agents(); ++j) {
    const double lij = lap.L(i, j);
    if (j == i || lij == 0.0) continue;
    const Vector alpha = params.BtP * bank.estimate(j);
    for (std::size_t c = 0; c < m; ++c) u[c] += lij * (alpha[c] - alpha_i[c]);
  }
  for (double& v : u) v *= -params.kappa;
  return u;
}

Vector compute_wi(std::size_t i, const EstimatorBank& bank, const Laplacian& lap) {
  const Vector& self = bank.estimate(i);
  Vector w(self.size(), 0.0);
  for (std::size_t j = 0; j < lap.n_agents(); ++j) {
    const double lij = lap.L(i, j);
    if (j == i || lij == 0.0) continue;
    const Vector& other = bank.estimate(j);
    for (std::size_t c = 0; c < w.size(); ++c) w[c] += lij * (other[c] - self[c]);
  }
  return w;
}

double compute_delta(std::size_t i, std::span<const double> e, std::span<const double> w,
                     const TriggerParams& params) {
  return quadratic_form(e, params.S[i]) + std::abs(bilinear(w, params.R[i], e));
}

double trigger_threshold(std::size_t i, std::span<const double> w, const TriggerParams& params) {
  const double base = params.sigma[i] * quadratic_form(w, params.Theta[i]);
  return params.variant == CtcVariant::practical ? base + params.xi : base;
}

bool ctc_fire_asymptotic(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i) {
  return delta - params.sigma[i] * quadratic_form(w, params.Theta[i]) > 0.0;
}

bool ctc_fire_practical(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i) {
  if (!(params.xi > 0.0)) throw ConfigError("trigger.xi", "the practical CTC requires xi > 0");
  return delta - params.sigma[i] * quadratic_form(w, params.Theta[i]) - params.xi > 0.0;
}

bool ctc_fire(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i) {
  return params.variant == CtcVariant::practical ? ctc_fire_practical(delta, w, params, i)
                                                 : ctc_fire_asymptotic(delta, w, params, i);
}

double error_growth_rate(double k, double kappa, double bbtp_norm, double w_max, double delta) {
  if (!(k > 0.0)) throw UsageError("error_growth_rate: Lipschitz constant must be positive");
  return kappa * bbtp_norm * (w_max + delta) / k;
}

double tau_lower_bound(double k, double nu, double S_norm, double R_norm, double w_max, double xi) {
  if (!(k > 0.0)) throw UsageError("tau_lower_bound: k must be positive");
  if (!(xi > 0.0)) throw UsageError("tau_lower_bound: xi must be positive");
  if (!(nu > 0.0)) throw DegenerateError("tau_lower_bound: nu = 0, the error never grows");
  const double c1 = S_norm * nu * nu;
  if (!(c1 > 0.0)) throw DegenerateError("tau_lower_bound: c1 = 0, the bound is unbounded");
  const double c2 = w_max * R_norm * nu;
  // sqrt(a + β²) − β = a / (sqrt(a + β²) + β), with a = ξ/c₁ and β = c₂/(2c₁).
  const double a = xi / c1;
  const double beta = c2 / (2.0 * c1);
  const double gap = a / (std::sqrt(a + beta * beta) + beta);
  return std::log1p(gap) / k;
}

double practical_consensus_bound(std::size_t n_agents, double xi, double q, const Matrix& P) {
  const double pmin = lambda_min(P);
  if (!(pmin > 0.0)) throw CertificateError("practical_consensus_bound: P must be positive definite");
  if (!(q > 0.0)) throw CertificateError("practical_consensus_bound: q must be positive");
  return static_cast<double>(n_agents) * xi / (q * pmin);
}

}  // namespace etcons
