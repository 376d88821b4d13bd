#pragma once

#include <array>
#include <span>
#include <vector>

#include "hamstep/state.hpp"

namespace hamstep {

/// Weights (w0, w1, w2) with gamma(c) = w0*y0 + w1*y1 + w2*z for the quadratic
/// through y0, y1, z at tau = 0, 1/2, 1. The weights sum to one.
[[nodiscard]] constexpr std::array<double, 3> basis_weights(double c) noexcept {
  return {1.0 - 3.0 * c + 2.0 * c * c, 4.0 * c * (1.0 - c), c * (2.0 * c - 1.0)};
}

/// Quadratic curve gamma(tau) on [0, 1] through (0, y0), (1/2, y1), (1, z).
///
/// Holds views of the three states; they must outlive the curve. tau outside
/// [0, 1] is accepted and extrapolates, which the diagnostics use.
class QuadraticCurve {
 public:
  QuadraticCurve(std::span<const double> y0, std::span<const double> y1, std::span<const double> z);

  [[nodiscard]] std::size_t dim() const noexcept { return y0_.size(); }
  [[nodiscard]] std::span<const double> y0() const noexcept { return y0_; }
  [[nodiscard]] std::span<const double> y1() const noexcept { return y1_; }
  [[nodiscard]] std::span<const double> z() const noexcept { return z_; }

  void eval(double tau, std::span<double> out) const;
  [[nodiscard]] std::vector<double> eval(double tau) const;

  /// gamma'(tau) = (z - y0) + 2 (z - 2 y1 + y0)(2 tau - 1).
  void derivative(double tau, std::span<double> out) const;
  [[nodiscard]] std::vector<double> derivative(double tau) const;

  /// Second difference z - 2 y1 + y0.
  [[nodiscard]] std::vector<double> second_difference() const;

 private:
  std::span<const double> y0_;
  std::span<const double> y1_;
  std::span<const double> z_;
};

}  // namespace hamstep
