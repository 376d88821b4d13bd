#include "hamstep/interpolant.hpp"

#include "hamstep/errors.hpp"

namespace hamstep {

QuadraticCurve::QuadraticCurve(std::span<const double> y0, std::span<const double> y1,
                               std::span<const double> z)
    : y0_(y0), y1_(y1), z_(z) {
  if (y1.size() != y0.size() || z.size() != y0.size()) {
    throw DimensionMismatch("curve states must share one dimension");
  }
}

void QuadraticCurve::eval(double tau, std::span<double> out) const {
  if (out.size() != dim()) throw DimensionMismatch("curve output has wrong length");
  const auto [w0, w1, w2] = basis_weights(tau);
  for (std::size_t i = 0; i < dim(); ++i) out[i] = w0 * y0_[i] + w1 * y1_[i] + w2 * z_[i];
}

std::vector<double> QuadraticCurve::eval(double tau) const {
  std::vector<double> out(dim());
  eval(tau, out);
  return out;
}

void QuadraticCurve::derivative(double tau, std::span<double> out) const {
  if (out.size() != dim()) throw DimensionMismatch("curve output has wrong length");
  const double s = 2.0 * (2.0 * tau - 1.0);
  for (std::size_t i = 0; i < dim(); ++i) {
    out[i] = (z_[i] - y0_[i]) + s * (z_[i] - 2.0 * y1_[i] + y0_[i]);
  }
}

std::vector<double> QuadraticCurve::derivative(double tau) const {
  std::vector<double> out(dim());
  derivative(tau, out);
  return out;
}

std::vector<double> QuadraticCurve::second_difference() const {
  std::vector<double> out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = z_[i] - 2.0 * y1_[i] + y0_[i];
  return out;
}

}  // namespace hamstep
