#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamstep/hamiltonian.hpp"
#include "hamstep/state.hpp"

namespace hamstep {

/// A Hamiltonian with an initial condition and whatever reference data is known.
struct ProblemSpec {
  std::string name;
  Hamiltonian hamiltonian;
  StateVector y0;
  /// Exact flow t -> y(t) from y0 at t = 0, when available.
  std::function<StateVector(double)> reference_solution;
  double default_t_end = 10.0;
  /// Period of the exact orbit, when it is known in closed form.
  std::optional<double> period;

  [[nodiscard]] std::optional<int> poly_degree() const { return hamiltonian.poly_degree(); }
};

/// H = p^2/2 + q^2/2 - q^3/6, y0 = (q, p) = (0, 1), t in [0, 10].
[[nodiscard]] ProblemSpec cubic_pendulum();

/// H = p^3/3 - p/2 + q^6/30 + q^4/4 - q^3/3 + 1/6, y0 = (q, p) = (0.2, 0.5), t in [0, 250].
[[nodiscard]] ProblemSpec fhp_sextic();

/// Two-body problem H = |p|^2/2 - 1/|q| started at pericenter of an orbit of
/// eccentricity e, semi-major axis 1 and period 2 pi. Throws InvalidArgument unless 0 <= e < 1.
///
/// The reference solution comes from Kepler's equation E - e sin E = t.
[[nodiscard]] ProblemSpec kepler(double e = 0.6);

/// H = p^2/2 + q^2/2, y0 = (0, 1), exact flow (sin t, cos t).
[[nodiscard]] ProblemSpec harmonic_oscillator();

/// Names accepted by make_problem: pendulum3, fhp6, kepler, sho.
[[nodiscard]] std::vector<std::string> builtin_problem_names();

/// Builds a built-in problem by name. `kepler_e` is only used for "kepler".
[[nodiscard]] ProblemSpec make_problem(std::string_view name, double kepler_e = 0.6);

/// Problem from user-supplied polynomial terms. Throws DimensionMismatch when y0
/// does not match the polynomial.
[[nodiscard]] ProblemSpec polynomial_problem(std::string name, PolynomialHamiltonian poly, StateVector y0,
                                             double default_t_end);

}  // namespace hamstep
