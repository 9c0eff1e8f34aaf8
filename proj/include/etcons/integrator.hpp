#pragma once

#include <span>
#include <string_view>

#include "etcons/linalg.hpp"

namespace etcons {

enum class Integrator { euler, rk4 };

std::string_view to_string(Integrator integrator);
// Throws ConfigError for anything but "euler" or "rk4".
Integrator parse_integrator(std::string_view name);

// One fixed step of ẋ = rhs(x). The evaluation order is fixed, so the same
// inputs give bit-identical outputs wherever this is called.
template <class Rhs>
Vector integrate_step(Integrator method, Rhs&& rhs, std::span<const double> x, double h) {
  const std::size_t n = x.size();
  Vector out(x.begin(), x.end());
  if (method == Integrator::euler) {
    const Vector k1 = rhs(std::span<const double>(x));
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h * k1[i];
    return out;
  }
  const double half = 0.5 * h;
  Vector stage(n);
  const Vector k1 = rhs(std::span<const double>(x));
  for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + half * k1[i];
  const Vector k2 = rhs(std::span<const double>(stage));
  for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + half * k2[i];
  const Vector k3 = rhs(std::span<const double>(stage));
  for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + h * k3[i];
  const Vector k4 = rhs(std::span<const double>(stage));
  const double sixth = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace etcons
