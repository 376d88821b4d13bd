#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hamstep/hamiltonian.hpp"
#include "hamstep/state.hpp"

namespace testing {

inline std::mt19937_64 rng(std::uint64_t seed = 20240917) { return std::mt19937_64(seed); }

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Classical RK4 on y' = J grad H(y), used as an independent reference flow.
inline hamstep::StateVector rk4_flow(const hamstep::Hamiltonian& H, const hamstep::StateVector& y0, double t,
                                     int steps) {
  const double h = t / steps;
  const std::size_t n = y0.size();
  std::vector<double> y(y0.values()), k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto f = [&](const std::vector<double>& x, std::vector<double>& out) {
    const auto g = H.gradient(std::span<const double>(x));
    hamstep::apply_j(g, out);
  };
  for (int s = 0; s < steps; ++s) {
    f(y, k1);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    f(tmp, k2);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    f(tmp, k3);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
    f(tmp, k4);
    for (std::size_t j = 0; j < n; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return hamstep::StateVector(std::move(y));
}

}  // namespace testing
