#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hamstep/hamiltonian.hpp"
#include "hamstep/interpolant.hpp"
#include "hamstep/quadrature.hpp"
#include "hamstep/state.hpp"

namespace hamstep {

enum class MethodKind {
  Mk,            ///< two-step energy-preserving method with the O(h^5) correction G
  MkLinear,      ///< its linear part (G = 0)
  Hbvm4,         ///< one-step order-4 HBVM, also used as the starter
  TrapezoidalK,  ///< order-2 k-stage trapezoidal method
};

enum class Predictor {
  Extrapolate,   ///< z0 = 2 y1 - y0
  LinearMethod,  ///< solve the linear two-step method first and start from its solution
};

[[nodiscard]] std::string_view to_string(MethodKind k) noexcept;
/// Parses "mk", "mk-lin", "hbvm4" or "trap".
[[nodiscard]] MethodKind parse_method_kind(std::string_view s);

/// Stopping rule for every fixed-point sweep in the library.
///
/// A sweep is accepted when max|z_{s+1} - z_s| <= tol * (1 + max|y0|). It is
/// declared divergent once max_iter sweeps have run or an iterate grows past
/// 1e6 * (1 + max|y0|).
struct FixedPointControls {
  double tol = 1e-14;
  int max_iter = 200;
};

struct MethodConfig {
  MethodKind kind = MethodKind::Mk;
  QuadratureRule rule = QuadratureRule::make(NodeFamily::Lobatto, 5);
  FixedPointControls fixed_point{};
  Predictor predictor = Predictor::Extrapolate;
  bool drift_correct = false;
  double a_norm_floor = 1e-14;

  /// Throws InvalidArgument on a non-positive tolerance, iteration cap or floor.
  void validate() const;
};

/// Diagnostics of one accepted point.
struct StepRecord {
  double t = 0.0;
  StateVector y;
  double energy_error = 0.0;  ///< H(y) - H(y0) with y0 the trajectory's initial point
  /// r at the accepted point; NaN for one-step methods, where it is not defined.
  double residual = std::numeric_limits<double>::quiet_NaN();
  int fp_iterations = 0;
  double correction_norm = 0.0;      ///< ||G||_2 at the accepted point
  bool degenerate_gradient = false;  ///< ||a|| fell below the floor; G was dropped
  bool drift_correction_skipped = false;
};

/// The two quadrature sums of the discrete line integral along a curve:
///   a = sum_i b_i grad H(gamma(c_i)),  w = sum_i b_i (2 c_i - 1) grad H(gamma(c_i)).
struct LineIntegrals {
  std::vector<double> a;
  std::vector<double> w;
};

[[nodiscard]] LineIntegrals line_integrals(const Hamiltonian& H, const QuadratureRule& rule,
                                           const QuadraticCurve& curve);

/// a(z) = sum_i b_i grad H(gamma(c_i)).
[[nodiscard]] std::vector<double> a_of_z(const Hamiltonian& H, const QuadratureRule& rule,
                                         const QuadraticCurve& curve);

/// r(z) = -2 (z - 2 y1 + y0)^T sum_i b_i (2 c_i - 1) grad H(gamma(c_i)).
[[nodiscard]] double residual_r(const Hamiltonian& H, const QuadratureRule& rule,
                                const QuadraticCurve& curve);

/// G = r / ||a||^2 * a. Throws DegenerateGradient when ||a||_2 < floor.
[[nodiscard]] std::vector<double> correction_g(const Hamiltonian& H, const QuadratureRule& rule,
                                               const QuadraticCurve& curve, double floor = 1e-14);

/// Discrete line integral (z - y0)^T a + 2 (z - 2 y1 + y0)^T w, which equals
/// H(z) - H(y0) whenever the rule integrates the integrand exactly.
[[nodiscard]] double discrete_energy_change(const Hamiltonian& H, const QuadratureRule& rule,
                                            const QuadraticCurve& curve);

/// Per-sweep increments max|z_{s+1} - z_s|, for convergence diagnostics.
using SweepTrace = std::vector<double>;

/// One step of the corrected two-step method: given y0 ~ y(t) and y1 ~ y(t+h),
/// solves z = y0 + 2hJ a(z) + G(y0, y1, z) by fixed-point iteration.
/// The returned record has t = 0 and energy_error relative to H(y0).
[[nodiscard]] StepRecord step_mk(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0,
                                 const StateVector& y1, double h, SweepTrace* trace = nullptr);

/// Same with G = 0. The record still reports r at the accepted point.
[[nodiscard]] StepRecord step_mk_linear(const Hamiltonian& H, const MethodConfig& cfg,
                                        const StateVector& y0, const StateVector& y1, double h,
                                        SweepTrace* trace = nullptr);

struct HbvmStep {
  StateVector u1;  ///< stage at t + h, accurate to O(h^4)
  StateVector u2;  ///< endpoint at t + 2h, accurate to O(h^5)
  int fp_iterations = 0;
};

/// Order-4 HBVM over [t, t + 2h]: the two orthogonality conditions
///   u2 - y0 = 2 h J a,   u2 - 2 u1 + y0 = 3 h J w
/// solved by simultaneous fixed-point iteration on (u1, u2).
[[nodiscard]] HbvmStep step_hbvm4(const Hamiltonian& H, const QuadratureRule& rule, const StateVector& y0,
                                  double h, const FixedPointControls& controls = {});

/// k-stage trapezoidal step y1 = y0 + h J sum_i b_i grad H((1 - c_i) y0 + c_i y1).
[[nodiscard]] StateVector step_trapezoidal_k(const Hamiltonian& H, const QuadratureRule& rule,
                                             const StateVector& y0, double h,
                                             const FixedPointControls& controls = {},
                                             int* iterations = nullptr);

/// One gradient-descent step towards the level set H = H0:
///   y* = y - (H(y) - H0) grad H(y) / ||grad H(y)||^2.
/// Throws DegenerateGradient when ||grad H(y)||_2 < floor.
[[nodiscard]] StateVector drift_correct(const Hamiltonian& H, const StateVector& y, double H0,
                                        double floor = 1e-14);

enum class Starter { Hbvm4, Exact };

struct IntegrateOptions {
  Starter starter = Starter::Hbvm4;
  /// Exact solution used when starter == Exact.
  std::function<StateVector(double)> exact;
  double t0 = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> records;  ///< records[n] holds t0 + n h; records[0] is the initial point
  double h = 0.0;
  double initial_energy = 0.0;

  [[nodiscard]] double max_abs_energy_error() const;
  [[nodiscard]] int degenerate_steps() const;
};

/// Advances y0 by n_steps steps of size h.
///
/// For the two-step kinds, y1 comes from one order-4 HBVM step of total length h
/// (or the exact solution), then (y_n, y_{n+1}) -> y_{n+2}. Errors from a step
/// are rethrown with the step index in the message.
[[nodiscard]] Trajectory integrate(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0,
                                   double h, int n_steps, const IntegrateOptions& options = {});

}  // namespace hamstep
