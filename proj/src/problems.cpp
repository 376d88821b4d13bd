#include "hamstep/problems.hpp"

#include <cmath>
#include <numbers>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

using Term = PolynomialHamiltonian::Term;

// Newton on E - e sin E = M with M reduced to [-pi, pi]; the 2 pi multiple is added back.
double solve_kepler_equation(double mean_anomaly, double e) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double turns = std::round(mean_anomaly / two_pi);
  const double m = mean_anomaly - turns * two_pi;
  double E = e > 0.8 ? (m < 0.0 ? -std::numbers::pi : std::numbers::pi) : m + e * std::sin(m);
  for (int it = 0; it < 50; ++it) {
    const double dE = (E - e * std::sin(E) - m) / (1.0 - e * std::cos(E));
    E -= dE;
    if (std::abs(dE) <= 1e-16) break;
  }
  return E + turns * two_pi;
}

}  // namespace

ProblemSpec cubic_pendulum() {
  PolynomialHamiltonian poly(1, {Term{0.5, {0, 2}}, Term{0.5, {2, 0}}, Term{-1.0 / 6.0, {3, 0}}});
  return ProblemSpec{"pendulum3", Hamiltonian(std::move(poly)), StateVector{0.0, 1.0}, {}, 10.0, std::nullopt};
}

ProblemSpec fhp_sextic() {
  PolynomialHamiltonian poly(1, {
                                    Term{1.0 / 3.0, {0, 3}},
                                    Term{-0.5, {0, 1}},
                                    Term{1.0 / 30.0, {6, 0}},
                                    Term{0.25, {4, 0}},
                                    Term{-1.0 / 3.0, {3, 0}},
                                    Term{1.0 / 6.0, {0, 0}},
                                });
  return ProblemSpec{"fhp6", Hamiltonian(std::move(poly)), StateVector{0.2, 0.5}, {}, 250.0, std::nullopt};
}

ProblemSpec kepler(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw InvalidArgument("eccentricity must lie in [0, 1)");

  auto energy = [](std::span<const double> y) {
    return 0.5 * (y[2] * y[2] + y[3] * y[3]) - 1.0 / std::hypot(y[0], y[1]);
  };
  auto gradient = [](std::span<const double> y, std::span<double> g) {
    const double r = std::hypot(y[0], y[1]);
    const double r3 = r * r * r;
    g[0] = y[0] / r3;
    g[1] = y[1] / r3;
    g[2] = y[2];
    g[3] = y[3];
  };
  auto exact = [e](double t) {
    const double E = solve_kepler_equation(t, e);
    const double root = std::sqrt(1.0 - e * e);
    const double denom = 1.0 - e * std::cos(E);
    return StateVector{std::cos(E) - e, root * std::sin(E), -std::sin(E) / denom, root * std::cos(E) / denom};
  };

  StateVector y0{1.0 - e, 0.0, 0.0, std::sqrt((1.0 + e) / (1.0 - e))};
  return ProblemSpec{"kepler", Hamiltonian(2, energy, gradient), std::move(y0), exact, 50.0,
                     2.0 * std::numbers::pi};
}

ProblemSpec harmonic_oscillator() {
  PolynomialHamiltonian poly(1, {Term{0.5, {0, 2}}, Term{0.5, {2, 0}}});
  auto exact = [](double t) { return StateVector{std::sin(t), std::cos(t)}; };
  return ProblemSpec{"sho", Hamiltonian(std::move(poly)), StateVector{0.0, 1.0}, exact, 10.0,
                     2.0 * std::numbers::pi};
}

std::vector<std::string> builtin_problem_names() { return {"pendulum3", "fhp6", "kepler", "sho"}; }

ProblemSpec make_problem(std::string_view name, double kepler_e) {
  if (name == "pendulum3") return cubic_pendulum();
  if (name == "fhp6") return fhp_sextic();
  if (name == "kepler") return kepler(kepler_e);
  if (name == "sho") return harmonic_oscillator();
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

ProblemSpec polynomial_problem(std::string name, PolynomialHamiltonian poly, StateVector y0, double default_t_end) {
  if (y0.size() != poly.dim()) throw DimensionMismatch("initial state does not match the polynomial dimension");
  if (!(default_t_end > 0.0)) throw InvalidArgument("default end time must be positive");
  return ProblemSpec{std::move(name), Hamiltonian(std::move(poly)), std::move(y0), {}, default_t_end,
                     std::nullopt};
}

}  // namespace hamstep
