#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "etcons/dynamics.hpp"
#include "etcons/errors.hpp"
#include "etcons/kernels.hpp"

using namespace etcons;
using namespace etcons::kernels;

namespace {

struct Soa {
  Vector a, b, c, d;
  Batch2x2 view() const { return {a, b, c, d}; }
};

Soa random_batch(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-4, 4);
  Soa s;
  for (std::size_t k = 0; k < n; ++k) {
    s.a.push_back(u(rng));
    s.b.push_back(u(rng));
    s.c.push_back(u(rng));
    s.d.push_back(u(rng));
  }
  return s;
}

bool bit_equal(const Vector& x, const Vector& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

std::vector<SimdLevel> levels() {
  std::vector<SimdLevel> out;
  for (SimdLevel l : {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon})
    if (available(l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  CHECK(available(SimdLevel::scalar));
  CHECK(kernels_for(SimdLevel::scalar).name == "scalar");
  CHECK(available(detect_simd_level()));
  MESSAGE("active kernel: " << active_kernels().name);
}

TEST_CASE("unavailable levels are refused") {
  for (SimdLevel l : {SimdLevel::avx2, SimdLevel::neon})
    if (!available(l)) CHECK_THROWS_AS(kernels_for(l), UsageError);
}

TEST_CASE("scalar kernel values against direct formulas") {
  const Vector a{1}, b{2}, c{0}, d{0};
  Vector out(1);
  scalar_kernels().spectral_norms({a, b, c, d}, out);
  CHECK(out[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  scalar_kernels().norms2(Vector{3}, Vector{4}, out);
  CHECK(out[0] == 5.0);
  // J = 0, C = I  ->  λmax = 1
  const CmfConstants2 k{1, 0, 1, 1, 0, 1};
  scalar_kernels().cmf_margins({c, c, c, c}, k, out);
  CHECK(out[0] == 1.0);
}

TEST_CASE("every SIMD variant is bit-identical to the scalar reference") {
  std::mt19937_64 rng(99);
  const CmfConstants2 k{5, 2, 1, 1.02, 1.96, 0.98};
  for (SimdLevel level : levels()) {
    const GridKernels& simd = kernels_for(level);
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 1000}) {
      const Soa s = random_batch(rng, n);
      Vector ref(n), got(n);
      scalar_kernels().cmf_margins(s.view(), k, ref);
      simd.cmf_margins(s.view(), k, got);
      CHECK(bit_equal(ref, got));
      scalar_kernels().spectral_norms(s.view(), ref);
      simd.spectral_norms(s.view(), got);
      CHECK(bit_equal(ref, got));
      scalar_kernels().norms2(s.a, s.b, ref);
      simd.norms2(s.a, s.b, got);
      CHECK(bit_equal(ref, got));
    }
  }
}

TEST_CASE("edge values survive every variant identically") {
  const Vector a{0.0, -0.0, 1e300, 1e-300, INFINITY}, z(5, 0.0);
  for (SimdLevel level : levels()) {
    Vector ref(5), got(5);
    scalar_kernels().norms2(a, z, ref);
    kernels_for(level).norms2(a, z, got);
    CHECK(bit_equal(ref, got));
  }
}

TEST_CASE("grid verification results do not depend on the kernel") {
  const SystemModel m = paper_system(0.5, 0.4);
  const StateGrid g = StateGrid::uniform({-3, -3}, {3, 3}, 61);
  const CmfReport a = check_cmf(m, {Matrix{{5, 2}, {2, 1}}, 0.02, 1.0}, g, {Vector{0.5}, Vector{0.4}});
  const CmfReport b = check_cmf(m, {Matrix{{5, 2}, {2, 1}}, 0.02, 1.0}, g, {Vector{0.5}, Vector{0.4}});
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.kernel == active_kernels().name);
}

TEST_CASE("argmax") {
  CHECK(argmax(Vector{1, 3, 3, 2}) == 1);
  CHECK(argmax(Vector{}) == 0);
}
