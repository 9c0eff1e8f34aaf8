#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "etcons/control.hpp"
#include "etcons/errors.hpp"

using namespace etcons;

namespace {

const Matrix kP{{5, 2}, {2, 1}};
const Matrix kB{{0}, {-1}};

Graph fig1() { return Graph::from_edges(5, {{1, 2}, {2, 3}, {2, 5}, {3, 4}}); }

TriggerSettings paper_settings(CtcVariant v = CtcVariant::asymptotic) {
  TriggerSettings s;
  s.variant = v;
  s.kappa1 = 0.1;
  s.kappa2 = 5.0;
  s.sigma = {0.8, 0.9, 0.9, 0.9, 0.9};
  s.xi = v == CtcVariant::practical ? 20.0 : 0.0;
  return s;
}

// PBBᵀP for B = (0, −1)ᵀ: (P B)(P B)ᵀ with P B = −(2, 1).
const double kPBBtP[2][2] = {{4, 2}, {2, 1}};

std::string config_error_field(const Laplacian& lap, const TriggerSettings& s) {
  try {
    build_trigger_params(lap, kB, kP, s);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("gain matrices against term-by-term scalars") {
  const Laplacian lap = build_laplacian(fig1());
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings());
  const double kappa = 5.1, eps = 1.0 / lap.lambda_max;
  const int N = 5;
  CHECK(p.kappa == kappa);
  CHECK(p.epsilon == eps);
  for (std::size_t i = 0; i < 5; ++i) {
    const double lii = lap.L(i, i);
    const double b = 1.0 / (5.0 * lii);
    CHECK(p.b[i] == doctest::Approx(b).epsilon(1e-15));
    double Mi = 0;
    for (std::size_t j = 0; j < 5; ++j) Mi += lap.L(i, j) * lap.L(i, j);
    const double r = 2.0 * kappa;
    const double th = 2.0 * 5.0 * eps * (1.0 - 2.0 * lii * b);
    const double term1 = 2.0 * kappa * lii * b;
    const double term2 = 2.0 * kappa * lii / b;
    const double term3 = 5.0 * eps * (4.0 * lii / b - N * Mi * (b / 2.0 + 1.0 / (2.0 * b)));
    const double s = term1 + term2 + term3;
    CHECK(std::abs(p.r_coeff[i] - r) <= 1e-12 * std::abs(r));
    CHECK(std::abs(p.theta_coeff[i] - th) <= 1e-12 * std::abs(th));
    CHECK(std::abs(p.s_coeff[i] - s) <= 1e-12 * std::abs(s));
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::abs(p.R[i](a, c) - r * kPBBtP[a][c]) <= 1e-12 * std::abs(r * 4));
        CHECK(std::abs(p.Theta[i](a, c) - th * kPBBtP[a][c]) <= 1e-12 * std::abs(th * 4));
        CHECK(std::abs(p.S[i](a, c) - s * kPBBtP[a][c]) <= 1e-12 * std::abs(s * 4));
      }
    // Θᵢ is PSD because bᵢ < 1/(2 l_ii).
    CHECK(lambda_min(p.Theta[i]) >= -1e-12);
  }
}

TEST_CASE("control input on two agents") {
  const Laplacian lap = build_laplacian(Graph::from_edges(2, {{1, 2}}));
  TriggerSettings s;
  s.kappa1 = 0.1;
  s.kappa2 = 5.0;
  s.sigma = {0.5, 0.5};
  const TriggerParams p = build_trigger_params(lap, kB, kP, s);
  const auto banks = make_banks(Graph::from_edges(2, {{1, 2}}), {{1, 0}, {0, 0}}, {});
  const Vector u = control_input(1, banks[1], lap, p);
  REQUIRE(u.size() == 1);
  CHECK(u[0] == doctest::Approx(-10.2).epsilon(1e-14));
  CHECK_THROWS_AS(control_input(0, banks[0], lap, p), UsageError);
}

TEST_CASE("w on two agents") {
  const Graph g = Graph::from_edges(2, {{1, 2}});
  const Laplacian lap = build_laplacian(g);
  auto banks = make_banks(g, {{0, 0}, {1, 1}}, {});
  CHECK(compute_wi(1, banks[1], lap) == Vector{1, 1});
  banks[1].estimates[0] = {2, 0};
  CHECK(compute_wi(1, banks[1], lap) == Vector{-1, 1});
  banks[1].estimates[0] = {0, 0};
  banks[1].estimates[1] = {1, 1};
  // w₂ = l₂₁ (x̂₁ − x̂₂) = −1 · (−1, −1)
  CHECK(compute_wi(1, banks[1], lap) == Vector{1, 1});
}

TEST_CASE("consensus estimates give zero control and zero w") {
  const Graph g = fig1();
  const Laplacian lap = build_laplacian(g);
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings());
  const auto banks = make_banks(g, std::vector<Vector>(5, Vector{0.3, -1.7}), {});
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(norm2(compute_wi(i, banks[i], lap)) == 0.0);
    CHECK(control_input(i, banks[i], lap, p)[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("summation form of w equals the Kronecker matrix form on random instances") {
  std::mt19937_64 rng(1000);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> w(0.2, 2.0);
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t N = 2 + inst % 6, n = 1 + inst % 3;
    std::vector<Edge> edges;
    for (std::size_t v = 2; v <= N; ++v) edges.push_back({v - 1 - (inst % (v - 1)) % (v - 1), v, w(rng)});
    if (N > 2) edges.push_back({1, N, w(rng)});
    const Graph graph = Graph::from_edges(N, edges);
    const Laplacian lap = build_laplacian(graph);
    std::vector<Vector> xs(N, Vector(n));
    for (auto& x : xs)
      for (auto& v : x) v = g(rng);
    auto banks = make_banks(graph, xs, {});
    // Perturb the bank of each agent so estimates differ from true states.
    for (auto& b : banks)
      for (auto& [j, est] : b.estimates)
        for (auto& v : est) v += 0.1 * g(rng);
    for (std::size_t i = 0; i < N; ++i) {
      // Stack the estimates seen by agent i (zeros for untracked agents) and apply
      // row block i of (L ⊗ Iₙ): Σⱼ l_ij x̂ⱼ = Σⱼ l_ij (x̂ⱼ − x̂ᵢ) by zero row sums.
      Vector stacked(N * n, 0.0);
      for (const auto& [j, est] : banks[i].estimates)
        for (std::size_t c = 0; c < n; ++c) stacked[j * n + c] = est[c];
      Vector oracle(n, 0.0);
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t c = 0; c < n; ++c) oracle[c] += lap.L(i, j) * stacked[j * n + c];
      const Vector wi = compute_wi(i, banks[i], lap);
      for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(wi[c] - oracle[c]) <= 1e-12);
    }
  }
}

TEST_CASE("control equals -kappa B^T P w on random estimates") {
  const Graph graph = fig1();
  const Laplacian lap = build_laplacian(graph);
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings());
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0, 1);
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<Vector> xs(5, Vector(2));
    for (auto& x : xs)
      for (auto& v : x) v = 3 * g(rng);
    auto banks = make_banks(graph, xs, {});
    for (auto& b : banks)
      for (auto& [j, est] : b.estimates)
        for (auto& v : est) v += g(rng);
    for (std::size_t i = 1; i < 5; ++i) {
      const Vector w = compute_wi(i, banks[i], lap);
      const double phi = -p.kappa * (-2.0 * w[0] - 1.0 * w[1]);  // BᵀP = (−2, −1)
      CHECK(std::abs(control_input(i, banks[i], lap, p)[0] - phi) <= 1e-12 * std::max(1.0, std::abs(phi)));
    }
  }
}

TEST_CASE("delta and its oracle") {
  const Laplacian lap = build_laplacian(fig1());
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings());
  CHECK(compute_delta(1, Vector{0, 0}, Vector{3, 4}, p) == 0.0);
  const Vector e{0.3, -0.2};
  const double eSe = p.s_coeff[1] * (4 * e[0] * e[0] + 4 * e[0] * e[1] + e[1] * e[1]);
  CHECK(compute_delta(1, e, Vector{0, 0}, p) == doctest::Approx(eSe).epsilon(1e-14));

  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 1);
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t i = inst % 5;
    const Vector ei{g(rng), g(rng)}, wi{g(rng), g(rng)};
    // (PB)ᵀx = −(2x₀ + x₁), so xᵀ PBBᵀP y = (2x₀ + x₁)(2y₀ + y₁).
    const double pe = 2 * ei[0] + ei[1], pw = 2 * wi[0] + wi[1];
    const double oracle = p.s_coeff[i] * pe * pe + std::abs(p.r_coeff[i] * pw * pe);
    const double got = compute_delta(i, ei, wi, p);
    CHECK(std::abs(got - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("asymptotic CTC predicate") {
  const Laplacian lap = build_laplacian(fig1());
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings());
  const Vector w{0.7, -0.1};
  CHECK_FALSE(ctc_fire_asymptotic(0.0, w, p, 2));
  CHECK(ctc_fire_asymptotic(1e-6, Vector{0, 0}, p, 2));
  const double boundary = p.sigma[2] * quadratic_form(w, p.Theta[2]);
  CHECK(trigger_threshold(2, w, p) == boundary);
  CHECK_FALSE(ctc_fire_asymptotic(boundary, w, p, 2));
  CHECK(ctc_fire_asymptotic(std::nextafter(boundary, 1e9), w, p, 2));
  CHECK(ctc_fire(1e-6, Vector{0, 0}, p, 0));
}

TEST_CASE("practical CTC predicate") {
  const Laplacian lap = build_laplacian(fig1());
  const TriggerParams p = build_trigger_params(lap, kB, kP, paper_settings(CtcVariant::practical));
  const Vector zero{0, 0};
  CHECK_FALSE(ctc_fire_practical(0.0, Vector{5, 5}, p, 1));
  CHECK(ctc_fire_practical(20.001, zero, p, 1));
  CHECK_FALSE(ctc_fire_practical(19.999, zero, p, 1));
  CHECK_FALSE(ctc_fire(19.999, zero, p, 1));
  CHECK(trigger_threshold(1, zero, p) == 20.0);

  const TriggerParams asym = build_trigger_params(lap, kB, kP, paper_settings());
  CHECK_THROWS_AS(ctc_fire_practical(1.0, zero, asym, 1), ConfigError);
}

TEST_CASE("setting validation names the field") {
  const Laplacian lap = build_laplacian(fig1());
  TriggerSettings s = paper_settings();
  s.sigma[2] = 1.2;
  CHECK(config_error_field(lap, s) == "trigger.sigma[2]");
  s = paper_settings();
  s.sigma[0] = 0.0;
  CHECK(config_error_field(lap, s) == "trigger.sigma[0]");
  s = paper_settings();
  s.sigma.pop_back();
  CHECK(config_error_field(lap, s) == "trigger.sigma");
  s = paper_settings();
  s.b = Vector{0.2, 0.1, 0.2, 0.2, 0.6};  // l₅₅ = 1, so b₅ must stay below 1/2
  CHECK(config_error_field(lap, s) == "trigger.b[4]");
  s = paper_settings();
  s.epsilon = 1.01 / lap.lambda_max;
  CHECK(config_error_field(lap, s) == "trigger.epsilon");
  s = paper_settings();
  s.kappa1 = 0.0;
  CHECK(config_error_field(lap, s) == "trigger.kappa1");
  s = paper_settings();
  s.kappa2 = -1.0;
  CHECK(config_error_field(lap, s) == "trigger.kappa2");
  s = paper_settings(CtcVariant::practical);
  s.xi = 0.0;
  CHECK(config_error_field(lap, s) == "trigger.xi");
  s = paper_settings();
  s.xi = 3.0;
  CHECK(config_error_field(lap, s) == "trigger.xi");
  s = paper_settings();
  s.epsilon = 0.5 / lap.lambda_max;
  CHECK(config_error_field(lap, s).empty());
}

TEST_CASE("gain condition message") {
  const double mu = build_laplacian(fig1()).mu;
  CHECK_NOTHROW(check_gain_condition(0.1, 0.02, mu));
  try {
    check_gain_condition(0.01, 0.02, mu);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "trigger.kappa1");
    CHECK(std::string(e.what()).find("kappa1 must exceed rho/(2*mu) = ") != std::string::npos);
  }
}

TEST_CASE("variant names") {
  CHECK(parse_ctc("asym") == CtcVariant::asymptotic);
  CHECK(parse_ctc("zeno") == CtcVariant::practical);
  CHECK(parse_ctc("practical") == CtcVariant::practical);
  CHECK(to_string(CtcVariant::asymptotic) == "asymptotic");
  CHECK_THROWS_AS(parse_ctc("eventually"), ConfigError);
}

TEST_CASE("minimum inter-event time closed form") {
  // k = 1, c₁ = |S|ν² = 1, c₂ = w_max|R|ν = 0, ξ = 3  ->  log(√3 + 1)
  const double tau = tau_lower_bound(1.0, 1.0, 1.0, 7.0, 0.0, 3.0);
  CHECK(tau == doctest::Approx(1.00505253874238100902).epsilon(1e-14));

  // Same value from the bounding dynamics: ē' = k ē + k ν, ē(0) = 0, and
  // δ̄ = c₁(ē/ν)² + c₂(ē/ν); locate the first crossing of ξ by fine Euler.
  const double k = 1.0, nu = 1.0, c1 = 1.0, c2 = 0.0, xi = 3.0, h = 1e-6;
  double e = 0, t = 0, prev = 0;
  while (true) {
    const double s = e / nu;
    const double dbar = c1 * s * s + c2 * s;
    if (dbar >= xi) break;
    prev = t;
    e += h * (k * e + k * nu);
    t += h;
  }
  CHECK(std::abs(t - tau) <= 1e-4);
  (void)prev;

  // The same crossing with a non-zero c₂: w_max = 2, |R| = 1.5, ν = 0.5, |S| = 4, k = 3.
  const double tau2 = tau_lower_bound(3.0, 0.5, 4.0, 1.5, 2.0, 20.0);
  const double c1b = 4.0 * 0.25, c2b = 2.0 * 1.5 * 0.5;
  e = 0;
  t = 0;
  while (c1b * (e / 0.5) * (e / 0.5) + c2b * (e / 0.5) < 20.0) {
    e += 1e-7 * (3.0 * e + 3.0 * 0.5);
    t += 1e-7;
  }
  CHECK(std::abs(t - tau2) <= 1e-5);
}

TEST_CASE("tau limits, positivity and errors") {
  double last = INFINITY;
  for (double xi : {1.0, 1e-2, 1e-4, 1e-8, 1e-12}) {
    const double tau = tau_lower_bound(1.0, 1.0, 1.0, 1.0, 0.0, xi);
    CHECK(tau > 0.0);
    CHECK(tau < last);
    last = tau;
  }
  CHECK(last < 1e-5);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int s = 0; s < 10000; ++s) {
    const double tau = tau_lower_bound(std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)),
                                       std::exp(u(rng)), std::exp(u(rng)));
    CHECK(tau > 0.0);
  }
  CHECK_THROWS_AS(tau_lower_bound(0.0, 1, 1, 1, 1, 1), UsageError);
  CHECK_THROWS_AS(tau_lower_bound(1, 1, 1, 1, 1, 0.0), UsageError);
  CHECK_THROWS_AS(tau_lower_bound(1, 0.0, 1, 1, 1, 1), DegenerateError);
  CHECK_THROWS_AS(tau_lower_bound(1, 1, 0.0, 1, 1, 1), DegenerateError);
}

TEST_CASE("error growth rate") {
  CHECK(error_growth_rate(2.0, 5.1, 3.0, 1.0, 0.5) == doctest::Approx(5.1 * 3.0 * 1.5 / 2.0));
}

TEST_CASE("practical consensus bound") {
  CHECK(practical_consensus_bound(5, 20.0, 1.0, kP) == doctest::Approx(100.0 / (3.0 - 2.0 * std::sqrt(2.0))));
  CHECK(practical_consensus_bound(5, 20.0, 1.0, kP) == doctest::Approx(582.84).epsilon(1e-5));
  CHECK(practical_consensus_bound(5, 0.0, 1.0, kP) == 0.0);
  CHECK(practical_consensus_bound(5, 40.0, 1.0, kP) == doctest::Approx(2 * practical_consensus_bound(5, 20.0, 1.0, kP)));
}
