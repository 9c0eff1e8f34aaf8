#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "etcons/dynamics.hpp"
#include "etcons/estimation.hpp"
#include "etcons/graph.hpp"

namespace etcons {

enum class CtcVariant { asymptotic, practical };

std::string_view to_string(CtcVariant variant);
// Accepts "asymptotic"/"asym" and "practical"/"zeno".
CtcVariant parse_ctc(std::string_view name);

// User-facing trigger settings; b and epsilon fall back to (5·l_ii)⁻¹ and 1/λmax(L).
struct TriggerSettings {
  CtcVariant variant = CtcVariant::asymptotic;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Vector sigma;
  std::optional<Vector> b;
  std::optional<double> epsilon;
  double xi = 0.0;
};

// Fully derived per-agent trigger data. Every agent-indexed member is 0-based.
struct TriggerParams {
  CtcVariant variant = CtcVariant::asymptotic;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa = 0.0;
  Vector sigma;
  Vector b;
  double epsilon = 0.0;
  double xi = 0.0;

  Matrix BtP;    // BᵀP, m×n
  Matrix BBtP;   // BBᵀP, n×n
  Matrix PBBtP;  // PBBᵀP, n×n

  // Rᵢ, Θᵢ and Sᵢ are scalar multiples of PBBᵀP; the scalars are kept for auditing.
  Vector r_coeff;
  Vector theta_coeff;
  Vector s_coeff;
  std::vector<Matrix> R;
  std::vector<Matrix> Theta;
  std::vector<Matrix> S;

  std::size_t n_agents() const noexcept { return sigma.size(); }
};

// Throws ConfigError (field named "trigger.*") when a setting leaves its admissible
// range: 0 < σᵢ < 1, 0 < bᵢ < 1/(2 l_ii), 0 < ε ≤ 1/λmax(L), κ₁, κ₂ > 0, ξ ≥ 0,
// and ξ > 0 for the practical CTC, ξ = 0 for the asymptotic one.
TriggerParams build_trigger_params(const Laplacian& lap, const Matrix& B, const Matrix& P,
                                   const TriggerSettings& settings);

// κ₁ > ρ/(2μ); throws ConfigError naming the bound otherwise.
void check_gain_condition(double kappa1, double rho, double mu);

// uᵢ = −κ Σⱼ l_ij BᵀP x̂ⱼⁱ over j with l_ij ≠ 0. Throws UsageError for the leader (i = 0).
Vector control_input(std::size_t i, const EstimatorBank& bank, const Laplacian& lap, const TriggerParams& params);

// wᵢ = Σⱼ l_ij (x̂ⱼⁱ − x̂ᵢⁱ). Throws TopologyError when a needed estimate is missing.
Vector compute_wi(std::size_t i, const EstimatorBank& bank, const Laplacian& lap);

// δᵢ = eᵢᵀSᵢeᵢ + |wᵢᵀRᵢeᵢ|
double compute_delta(std::size_t i, std::span<const double> e, std::span<const double> w,
                     const TriggerParams& params);

// σᵢ wᵢᵀΘᵢwᵢ, plus ξ under the practical CTC.
double trigger_threshold(std::size_t i, std::span<const double> w, const TriggerParams& params);

bool ctc_fire_asymptotic(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i);
// Throws ConfigError when ξ ≤ 0.
bool ctc_fire_practical(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i);
// Dispatches on params.variant.
bool ctc_fire(double delta, std::span<const double> w, const TriggerParams& params, std::size_t i);

// ν = κ |BBᵀP| (w_max + Δ)/k
double error_growth_rate(double k, double kappa, double bbtp_norm, double w_max, double delta);

// Minimum inter-event time of the practical CTC,
//   τ = (1/k) log( sqrt(ξ/c₁ + c₂²/(4c₁²)) + 1 − c₂/(2c₁) ),  c₁ = |S|ν²,  c₂ = w_max |R| ν.
// Evaluated in a cancellation-free form. Throws UsageError when k ≤ 0 or ξ ≤ 0, and
// DegenerateError when ν = 0 or c₁ = 0 (the error never grows).
double tau_lower_bound(double k, double nu, double S_norm, double R_norm, double w_max, double xi);

// N ξ / (q λmin(P))
double practical_consensus_bound(std::size_t n_agents, double xi, double q, const Matrix& P);

}  // namespace etcons
