#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hamstep/state.hpp"

namespace hamstep {

using Exponents = std::vector<unsigned>;

/// Sparse polynomial in (q_1..q_m, p_1..p_m).
///
/// Terms live in an exponent-vector -> coefficient map. Zero coefficients are
/// dropped and repeated exponent vectors are summed on construction, so the
/// stored representation is canonical. The partial derivatives are
/// differentiated once here and reused for every gradient evaluation.
class PolynomialHamiltonian {
 public:
  struct Term {
    double coefficient = 0.0;
    Exponents exponents;
  };

  PolynomialHamiltonian(std::size_t dof, const std::vector<Term>& terms);

  [[nodiscard]] std::size_t dof() const noexcept { return dof_; }
  [[nodiscard]] std::size_t dim() const noexcept { return 2 * dof_; }
  /// Maximum total degree over the stored terms; 0 for constants and the zero polynomial.
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] std::vector<Term> terms() const;

  /// Term-by-term sum of coefficient * prod y_j^e_j.
  [[nodiscard]] double evaluate(std::span<const double> y) const;
  /// Nested Horner scheme over the variables in order. Independent of evaluate().
  [[nodiscard]] double evaluate_horner(std::span<const double> y) const;
  void gradient(std::span<const double> y, std::span<double> out) const;

  [[nodiscard]] PolynomialHamiltonian operator+(const PolynomialHamiltonian& other) const;

 private:
  struct FlatTerm {
    double coefficient;
    std::vector<std::pair<std::size_t, unsigned>> factors;  // (variable, power), power > 0
  };

  void check_dim(std::span<const double> y) const;

  std::size_t dof_;
  int degree_ = 0;
  std::map<Exponents, double> terms_;
  std::vector<FlatTerm> flat_;
  std::vector<std::vector<FlatTerm>> partials_;
};

/// Energy function together with its gradient.
///
/// Either wraps a polynomial (and then knows its degree) or a pair of
/// callbacks. Immutable and cheap to copy; copies share the implementation.
class Hamiltonian {
 public:
  using EnergyFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  explicit Hamiltonian(PolynomialHamiltonian poly);
  Hamiltonian(std::size_t dof, EnergyFn energy, GradientFn gradient);

  [[nodiscard]] std::size_t dof() const noexcept { return dof_; }
  [[nodiscard]] std::size_t dim() const noexcept { return 2 * dof_; }
  /// Present iff the Hamiltonian is a polynomial.
  [[nodiscard]] std::optional<int> poly_degree() const noexcept;
  [[nodiscard]] const PolynomialHamiltonian* polynomial() const noexcept { return poly_.get(); }

  [[nodiscard]] double energy(std::span<const double> y) const;
  void gradient(std::span<const double> y, std::span<double> out) const;
  [[nodiscard]] std::vector<double> gradient(std::span<const double> y) const;

  [[nodiscard]] double energy(const StateVector& y) const { return energy(y.span()); }
  [[nodiscard]] std::vector<double> gradient(const StateVector& y) const {
    return gradient(y.span());
  }

 private:
  void check_dim(std::span<const double> y) const;

  std::size_t dof_;
  std::shared_ptr<const PolynomialHamiltonian> poly_;
  EnergyFn energy_;
  GradientFn gradient_;
};

/// Largest componentwise gap between gradient() and a central difference of energy().
[[nodiscard]] double gradient_fd_mismatch(const Hamiltonian& h, std::span<const double> y,
                                          double step = 1e-6);

}  // namespace hamstep
