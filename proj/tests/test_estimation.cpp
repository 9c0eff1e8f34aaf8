#include <doctest.h>

#include "etcons/errors.hpp"
#include "etcons/estimation.hpp"
#include "oracles.hpp"

using namespace etcons;

namespace {

Graph fig1() { return Graph::from_edges(5, {{1, 2}, {2, 3}, {2, 5}, {3, 4}}); }

std::vector<Vector> x0() { return {{0.95, 0.63}, {-0.70, -0.73}, {-0.33, -0.54}, {-0.25, 0.02}, {0.86, 0.01}}; }

}  // namespace

TEST_CASE("banks track self and neighbours") {
  const auto banks = make_banks(fig1(), x0(), {0.4});
  REQUIRE(banks.size() == 5);
  CHECK(banks[1].estimates.size() == 4);  // agent 2: itself, 1, 3, 5
  CHECK(banks[3].estimates.size() == 2);  // agent 4: itself, 3
  CHECK(banks[1].estimate(4) == x0()[4]);
  CHECK_FALSE(banks[3].has(0));
  CHECK_THROWS_AS(banks[3].estimate(0), TopologyError);
}

TEST_CASE("zero field leaves estimates unchanged") {
  const SystemModel zero = zero_model();
  const auto banks = make_banks(Graph::from_edges(2, {{1, 2}}), {{1, 2}, {3, 4}}, {});
  for (Integrator method : {Integrator::euler, Integrator::rk4}) {
    const EstimatorBank next = propagate(banks[0], zero, 0.01, method);
    CHECK(next.estimates == banks[0].estimates);
  }
}

TEST_CASE("one RK4 step matches a fine-step reference") {
  const SystemModel m = paper_system(0.5, 0.4);
  const auto banks = make_banks(Graph::from_edges(2, {{1, 2}}), {{0, 0}, {0, 0}}, {0.4});
  const EstimatorBank next = propagate(banks[0], m, 0.01, Integrator::rk4);
  const auto ref = oracle::rk4([](const std::vector<double>& z) { return oracle::paper_f(z, 0.4); }, {0, 0}, 1e-5, 1000);
  CHECK(next.self()[0] == doctest::Approx(ref[0]).epsilon(1e-9));
  CHECK(next.self()[1] == doctest::Approx(ref[1]).epsilon(1e-9));
  CHECK(std::abs(next.self()[0] - ref[0]) <= 1e-9);
  CHECK(std::abs(next.self()[1] - ref[1]) <= 1e-9);
}

TEST_CASE("forward Euler step") {
  const SystemModel m = paper_system(0.5, 0.4);
  const auto banks = make_banks(Graph::from_edges(2, {{1, 2}}), {{0, 0}, {0, 0}}, {0.4});
  const EstimatorBank next = propagate(banks[0], m, 0.01, Integrator::euler);
  // f((0,0), 0.4) = (0.4, 0.4)
  CHECK(next.self()[0] == doctest::Approx(0.004));
  CHECK(next.self()[1] == doctest::Approx(0.004));
}

TEST_CASE("banks of different owners stay identical for a shared agent") {
  const SystemModel m = paper_system(0.5, 0.4);
  auto banks = make_banks(fig1(), x0(), {0.4});
  for (int s = 0; s < 200; ++s)
    for (auto& b : banks) b = propagate(b, m, 0.01, Integrator::rk4);
  // Agent 2 is estimated by 1, 3 and 5 as well as by itself.
  for (std::size_t owner : {0, 2, 4}) CHECK(banks[owner].estimate(1) == banks[1].self());
  CHECK(banks[3].estimate(2) == banks[2].self());
}

TEST_CASE("broadcast resets the sender and its neighbours only") {
  auto banks = make_banks(fig1(), x0(), {0.4});
  const Vector state{9, 9};
  const auto before = banks;
  apply_broadcast(banks, fig1(), 1, state);
  CHECK(banks[1].self() == state);
  for (std::size_t i : {0, 2, 4}) CHECK(banks[i].estimate(1) == state);
  CHECK(banks[3].estimates == before[3].estimates);
  CHECK(banks[0].self() == before[0].self());
  CHECK_THROWS_AS(apply_broadcast(banks, fig1(), 7, state), TopologyError);
}

TEST_CASE("an isolated agent only updates its own estimate") {
  const Graph g = Graph::from_edges(3, {{1, 2}});
  auto banks = make_banks(g, {{0, 0}, {1, 1}, {2, 2}}, {});
  const auto before = banks;
  apply_broadcast(banks, g, 2, Vector{5, 5});
  CHECK(banks[2].self() == Vector{5, 5});
  CHECK(banks[0].estimates == before[0].estimates);
  CHECK(banks[1].estimates == before[1].estimates);
}

TEST_CASE("propagation errors") {
  const SystemModel m = paper_system(0.5, 0.4);
  auto banks = make_banks(Graph::from_edges(2, {{1, 2}}), {{0, 0}, {0, 0}}, {0.4});
  CHECK_THROWS_AS(propagate(banks[0], m, 0.0, Integrator::rk4), ModelError);
  CHECK_THROWS_AS(propagate(banks[0], m, -0.01, Integrator::rk4), ModelError);
  banks[0].estimates[0] = {1e308, 1e308};
  CHECK_THROWS_AS(propagate(banks[0], m, 1e10, Integrator::euler), NumericsError);
}

TEST_CASE("integrator names") {
  CHECK(parse_integrator("rk4") == Integrator::rk4);
  CHECK(parse_integrator("euler") == Integrator::euler);
  CHECK(to_string(Integrator::rk4) == "rk4");
  CHECK_THROWS_AS(parse_integrator("midpoint"), ConfigError);
}
