#include "hamstep/state.hpp"

#include <cmath>
#include <string>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

void validate(const std::vector<double>& v) {
  if (v.empty() || v.size() % 2 != 0) {
    throw DimensionMismatch("state vector must have even positive length, got " +
                            std::to_string(v.size()));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("state vector has a non-finite entry");
  }
}

}  // namespace

StateVector::StateVector(std::vector<double> entries) : entries_(std::move(entries)) {
  validate(entries_);
}

StateVector::StateVector(std::initializer_list<double> entries) : entries_(entries) {
  validate(entries_);
}

StateVector::StateVector(std::span<const double> entries)
    : entries_(entries.begin(), entries.end()) {
  validate(entries_);
}

void apply_j(std::span<const double> v, std::span<double> out) {
  if (v.size() % 2 != 0) throw DimensionMismatch("apply_j needs an even-length vector");
  if (out.size() != v.size()) throw DimensionMismatch("apply_j output size mismatch");
  const std::size_t m = v.size() / 2;
  for (std::size_t i = 0; i < m; ++i) {
    const double q = v[i];
    out[i] = v[m + i];
    out[m + i] = -q;
  }
}

std::vector<double> apply_j(std::span<const double> v) {
  std::vector<double> out(v.size());
  apply_j(v, out);
  return out;
}

}  // namespace hamstep
