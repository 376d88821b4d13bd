#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hamstep {

/// A point y = (q_1..q_m, p_1..p_m) of phase space.
///
/// Construction checks that the length is even and positive and that every
/// entry is finite; the values themselves are not constrained afterwards.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<double> entries);
  StateVector(std::initializer_list<double> entries);
  explicit StateVector(std::span<const double> entries);

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  /// Number of degrees of freedom m.
  [[nodiscard]] std::size_t dof() const noexcept { return entries_.size() / 2; }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  [[nodiscard]] double operator[](std::size_t i) const { return entries_[i]; }

  [[nodiscard]] std::span<const double> span() const noexcept { return entries_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return entries_; }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<double> entries_;
};

/// y -> J y with J = [[0, I], [-I, 0]]. Throws DimensionMismatch on odd length.
[[nodiscard]] std::vector<double> apply_j(std::span<const double> v);
void apply_j(std::span<const double> v, std::span<double> out);

}  // namespace hamstep
