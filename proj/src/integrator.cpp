#include "hamstep/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

// eta_1 = 2 and eta_2 = 3 give the order-4 member of the family.
constexpr double kEta1 = 2.0;
constexpr double kEta2 = 3.0;
constexpr double kBlowUpFactor = 1e6;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Evaluates the line-integral sums a and w along gamma through (y0, y1, z).
//
// Node weights are computed once per rule. Nodes where gamma(c) is exactly y0
// or y1 (c = 0 and c = 1/2 for odd Lobatto rules) take the gradient cached by
// bind() instead of re-evaluating grad H.
class NodeSweep {
 public:
  NodeSweep(const Hamiltonian& H, const QuadratureRule& rule) : H_(H), n_(H.dim()) {
    const auto c = rule.nodes();
    const auto b = rule.weights();
    for (std::size_t i = 0; i < c.size(); ++i) {
      Node node{b[i], b[i] * (2.0 * c[i] - 1.0), basis_weights(c[i]), Source::Curve};
      if (node.basis == std::array<double, 3>{1.0, 0.0, 0.0}) node.source = Source::Y0;
      if (node.basis == std::array<double, 3>{0.0, 1.0, 0.0}) node.source = Source::Y1;
      nodes_.push_back(node);
    }
    g0_.resize(n_);
    g1_.resize(n_);
    point_.resize(n_);
    grad_.resize(n_);
  }

  // Caches grad H(y0), and grad H(y1) when y1 stays fixed across sweeps.
  void bind(std::span<const double> y0, std::span<const double> y1, bool y1_fixed) {
    H_.gradient(y0, g0_);
    y1_cached_ = y1_fixed;
    if (y1_fixed) H_.gradient(y1, g1_);
  }

  void evaluate(std::span<const double> y0, std::span<const double> y1, std::span<const double> z,
                std::span<double> a, std::span<double> w) {
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(w.begin(), w.end(), 0.0);
    for (const auto& node : nodes_) {
      std::span<const double> g;
      if (node.source == Source::Y0) {
        g = g0_;
      } else if (node.source == Source::Y1 && y1_cached_) {
        g = g1_;
      } else {
        const auto [w0, w1, w2] = node.basis;
        for (std::size_t j = 0; j < n_; ++j) point_[j] = w0 * y0[j] + w1 * y1[j] + w2 * z[j];
        H_.gradient(point_, grad_);
        g = grad_;
      }
      for (std::size_t j = 0; j < n_; ++j) {
        a[j] += node.b * g[j];
        w[j] += node.bw * g[j];
      }
    }
  }

 private:
  enum class Source { Curve, Y0, Y1 };
  struct Node {
    double b;
    double bw;
    std::array<double, 3> basis;
    Source source;
  };

  const Hamiltonian& H_;
  std::size_t n_;
  std::vector<Node> nodes_;
  std::vector<double> g0_, g1_, point_, grad_;
  bool y1_cached_ = false;
};

void check_step_inputs(const Hamiltonian& H, std::span<const double> y0, double h) {
  if (y0.size() != H.dim()) {
    throw DimensionMismatch("state has length " + std::to_string(y0.size()) + ", Hamiltonian expects " +
                            std::to_string(H.dim()));
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("stepsize must be positive and finite");
}

void check_iterate(std::span<const double> z, double scale, int sweep) {
  if (!all_finite(z) || max_abs(z) > kBlowUpFactor * scale) {
    throw FixedPointDivergence("fixed-point iterate blew up at sweep " + std::to_string(sweep) +
                               "; reduce the stepsize");
  }
}

[[noreturn]] void throw_not_converged(int max_iter, double last_increment) {
  throw FixedPointDivergence("fixed-point iteration did not converge in " + std::to_string(max_iter) +
                             " sweeps (last increment " + std::to_string(last_increment) +
                             "); reduce the stepsize");
}

struct TwoStepOutcome {
  std::vector<double> z;
  std::vector<double> increment;  // z - y0 as computed before rounding into z
  int iterations = 0;
  bool degenerate = false;
};

// Fixed-point sweep for z = y0 + 2hJ a(z) [+ G(z)] starting at z0.
TwoStepOutcome solve_two_step(NodeSweep& sweep, std::span<const double> y0, std::span<const double> y1,
                              std::vector<double> z, double h, bool corrected, const MethodConfig& cfg,
                              int max_iter, SweepTrace* trace) {
  const std::size_t n = y0.size();
  const double scale = 1.0 + max_abs(y0);
  const double tol = cfg.fixed_point.tol * scale;
  const double floor2 = cfg.a_norm_floor * cfg.a_norm_floor;
  std::vector<double> a(n), w(n), ja(n), next(n), d2(n), delta(n);

  TwoStepOutcome out;
  double increment = 0.0;
  for (int s = 1; s <= max_iter; ++s) {
    sweep.evaluate(y0, y1, z, a, w);
    apply_j(a, ja);
    double factor = 0.0;
    if (corrected) {
      for (std::size_t j = 0; j < n; ++j) d2[j] = z[j] - 2.0 * y1[j] + y0[j];
      const double r = -2.0 * dot(d2, w);
      const double na2 = dot(a, a);
      if (na2 < floor2) {
        out.degenerate = true;
      } else {
        factor = r / na2;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      delta[j] = 2.0 * h * ja[j] + factor * a[j];
      next[j] = y0[j] + delta[j];
    }
    check_iterate(next, scale, s);
    increment = max_abs_diff(next, z);
    if (trace) trace->push_back(increment);
    std::swap(z, next);
    if (increment <= tol) {
      out.z = std::move(z);
      out.increment = std::move(delta);
      out.iterations = s;
      return out;
    }
  }
  throw_not_converged(cfg.fixed_point.max_iter, increment);
}

// Both predictor phases share one iteration budget, so fp_iterations <= max_iter.
StepRecord two_step(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0,
                    const StateVector& y1, double h, bool corrected, SweepTrace* trace,
                    std::vector<double>* increment = nullptr) {
  cfg.validate();
  check_step_inputs(H, y0.span(), h);
  if (y1.size() != y0.size()) throw DimensionMismatch("y0 and y1 differ in length");

  NodeSweep sweep(H, cfg.rule);
  sweep.bind(y0.span(), y1.span(), true);
  const std::size_t n = y0.size();

  std::vector<double> z0(n);
  for (std::size_t j = 0; j < n; ++j) z0[j] = 2.0 * y1[j] - y0[j];
  int iterations = 0;
  bool degenerate = false;
  if (corrected && cfg.predictor == Predictor::LinearMethod) {
    auto lin = solve_two_step(sweep, y0.span(), y1.span(), std::move(z0), h, false, cfg,
                              cfg.fixed_point.max_iter, trace);
    z0 = std::move(lin.z);
    iterations += lin.iterations;
  }
  auto sol = solve_two_step(sweep, y0.span(), y1.span(), std::move(z0), h, corrected, cfg,
                            cfg.fixed_point.max_iter - iterations, trace);
  iterations += sol.iterations;
  degenerate = sol.degenerate;
  if (increment) *increment = std::move(sol.increment);

  StepRecord rec;
  rec.y = StateVector(std::move(sol.z));
  rec.fp_iterations = iterations;
  rec.energy_error = H.energy(rec.y) - H.energy(y0);

  // Diagnostics at the accepted point.
  std::vector<double> a(n), w(n);
  sweep.evaluate(y0.span(), y1.span(), rec.y.span(), a, w);
  std::vector<double> d2(n);
  for (std::size_t j = 0; j < n; ++j) d2[j] = rec.y[j] - 2.0 * y1[j] + y0[j];
  rec.residual = -2.0 * dot(d2, w);
  const double na = norm2(a);
  if (na < cfg.a_norm_floor) {
    degenerate = degenerate || corrected;
  } else if (corrected) {
    rec.correction_norm = std::abs(rec.residual) / na;
  }
  rec.degenerate_gradient = degenerate;
  return rec;
}

}  // namespace

std::string_view to_string(MethodKind k) noexcept {
  switch (k) {
    case MethodKind::Mk: return "mk";
    case MethodKind::MkLinear: return "mk-lin";
    case MethodKind::Hbvm4: return "hbvm4";
    case MethodKind::TrapezoidalK: return "trap";
  }
  return "unknown";
}

MethodKind parse_method_kind(std::string_view s) {
  if (s == "mk") return MethodKind::Mk;
  if (s == "mk-lin") return MethodKind::MkLinear;
  if (s == "hbvm4") return MethodKind::Hbvm4;
  if (s == "trap") return MethodKind::TrapezoidalK;
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

void MethodConfig::validate() const {
  if (!(fixed_point.tol > 0.0)) throw InvalidArgument("fixed-point tolerance must be positive");
  if (fixed_point.max_iter < 1) throw InvalidArgument("fixed-point iteration cap must be at least 1");
  if (!(a_norm_floor > 0.0)) throw InvalidArgument("gradient norm floor must be positive");
}

LineIntegrals line_integrals(const Hamiltonian& H, const QuadratureRule& rule, const QuadraticCurve& curve) {
  if (curve.dim() != H.dim()) throw DimensionMismatch("curve dimension does not match the Hamiltonian");
  NodeSweep sweep(H, rule);
  sweep.bind(curve.y0(), curve.y1(), true);
  LineIntegrals li{std::vector<double>(H.dim()), std::vector<double>(H.dim())};
  sweep.evaluate(curve.y0(), curve.y1(), curve.z(), li.a, li.w);
  return li;
}

std::vector<double> a_of_z(const Hamiltonian& H, const QuadratureRule& rule, const QuadraticCurve& curve) {
  return line_integrals(H, rule, curve).a;
}

double residual_r(const Hamiltonian& H, const QuadratureRule& rule, const QuadraticCurve& curve) {
  const auto li = line_integrals(H, rule, curve);
  return -2.0 * dot(curve.second_difference(), li.w);
}

std::vector<double> correction_g(const Hamiltonian& H, const QuadratureRule& rule, const QuadraticCurve& curve,
                                 double floor) {
  const auto li = line_integrals(H, rule, curve);
  const double na = norm2(li.a);
  if (na < floor) throw DegenerateGradient("||a(z)|| is below the floor; the correction is undefined");
  const double r = -2.0 * dot(curve.second_difference(), li.w);
  std::vector<double> g(li.a);
  for (double& x : g) x *= r / (na * na);
  return g;
}

double discrete_energy_change(const Hamiltonian& H, const QuadratureRule& rule, const QuadraticCurve& curve) {
  const auto li = line_integrals(H, rule, curve);
  std::vector<double> chord(curve.dim());
  for (std::size_t j = 0; j < chord.size(); ++j) chord[j] = curve.z()[j] - curve.y0()[j];
  return dot(chord, li.a) + 2.0 * dot(curve.second_difference(), li.w);
}

StepRecord step_mk(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0, const StateVector& y1,
                   double h, SweepTrace* trace) {
  return two_step(H, cfg, y0, y1, h, true, trace);
}

StepRecord step_mk_linear(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0,
                          const StateVector& y1, double h, SweepTrace* trace) {
  return two_step(H, cfg, y0, y1, h, false, trace);
}

HbvmStep step_hbvm4(const Hamiltonian& H, const QuadratureRule& rule, const StateVector& y0, double h,
                    const FixedPointControls& controls) {
  check_step_inputs(H, y0.span(), h);
  const std::size_t n = y0.size();
  const double scale = 1.0 + max_abs(y0.span());
  const double tol = controls.tol * scale;

  NodeSweep sweep(H, rule);
  sweep.bind(y0.span(), {}, false);

  // Explicit Euler guesses for the stage and the endpoint.
  std::vector<double> f0(n);
  apply_j(H.gradient(y0), f0);
  std::vector<double> u1(n), u2(n);
  for (std::size_t j = 0; j < n; ++j) {
    u1[j] = y0[j] + h * f0[j];
    u2[j] = y0[j] + 2.0 * h * f0[j];
  }

  std::vector<double> a(n), w(n), ja(n), jw(n), u1n(n), u2n(n);
  double increment = 0.0;
  for (int s = 1; s <= controls.max_iter; ++s) {
    sweep.evaluate(y0.span(), u1, u2, a, w);
    apply_j(a, ja);
    apply_j(w, jw);
    for (std::size_t j = 0; j < n; ++j) {
      u2n[j] = y0[j] + kEta1 * h * ja[j];
      u1n[j] = 0.5 * (u2n[j] + y0[j] - kEta2 * h * jw[j]);
    }
    check_iterate(u1n, scale, s);
    check_iterate(u2n, scale, s);
    increment = std::max(max_abs_diff(u1n, u1), max_abs_diff(u2n, u2));
    std::swap(u1, u1n);
    std::swap(u2, u2n);
    if (increment <= tol) return HbvmStep{StateVector(std::move(u1)), StateVector(std::move(u2)), s};
  }
  throw_not_converged(controls.max_iter, increment);
}

StateVector step_trapezoidal_k(const Hamiltonian& H, const QuadratureRule& rule, const StateVector& y0, double h,
                               const FixedPointControls& controls, int* iterations) {
  check_step_inputs(H, y0.span(), h);
  const std::size_t n = y0.size();
  const double scale = 1.0 + max_abs(y0.span());
  const double tol = controls.tol * scale;
  const auto c = rule.nodes();
  const auto b = rule.weights();

  std::vector<double> y1(n), next(n), point(n), grad(n), sum(n), jsum(n);
  apply_j(H.gradient(y0), jsum);
  for (std::size_t j = 0; j < n; ++j) y1[j] = y0[j] + h * jsum[j];

  double increment = 0.0;
  for (int s = 1; s <= controls.max_iter; ++s) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) point[j] = (1.0 - c[i]) * y0[j] + c[i] * y1[j];
      H.gradient(point, grad);
      for (std::size_t j = 0; j < n; ++j) sum[j] += b[i] * grad[j];
    }
    apply_j(sum, jsum);
    for (std::size_t j = 0; j < n; ++j) next[j] = y0[j] + h * jsum[j];
    check_iterate(next, scale, s);
    increment = max_abs_diff(next, y1);
    std::swap(y1, next);
    if (increment <= tol) {
      if (iterations) *iterations = s;
      return StateVector(std::move(y1));
    }
  }
  throw_not_converged(controls.max_iter, increment);
}

StateVector drift_correct(const Hamiltonian& H, const StateVector& y, double H0, double floor) {
  const auto g = H.gradient(y);
  const double ng = norm2(g);
  if (ng < floor) throw DegenerateGradient("||grad H|| is below the floor; drift correction skipped");
  const double alpha = (H.energy(y) - H0) / ng;
  std::vector<double> out(y.values());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= alpha * g[j] / ng;
  return StateVector(std::move(out));
}

double Trajectory::max_abs_energy_error() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, std::abs(r.energy_error));
  return m;
}

int Trajectory::degenerate_steps() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const StepRecord& r) { return r.degenerate_gradient; }));
}

Trajectory integrate(const Hamiltonian& H, const MethodConfig& cfg, const StateVector& y0, double h, int n_steps,
                     const IntegrateOptions& options) {
  cfg.validate();
  check_step_inputs(H, y0.span(), h);
  if (n_steps < 1) throw InvalidArgument("need at least one step");
  if (options.starter == Starter::Exact && !options.exact) {
    throw InvalidArgument("exact starter requested without an exact solution");
  }

  Trajectory traj;
  traj.h = h;
  traj.initial_energy = H.energy(y0);
  traj.records.reserve(static_cast<std::size_t>(n_steps) + 1);

  StepRecord first;
  first.t = options.t0;
  first.y = y0;
  traj.records.push_back(first);

  // Stamps time and energy, applies the optional drift correction, stores.
  auto accept = [&](StepRecord rec, int n) {
    rec.t = options.t0 + n * h;
    if (cfg.drift_correct) {
      try {
        rec.y = drift_correct(H, rec.y, traj.initial_energy, cfg.a_norm_floor);
      } catch (const DegenerateGradient&) {
        rec.drift_correction_skipped = true;
      }
    }
    rec.energy_error = H.energy(rec.y) - traj.initial_energy;
    traj.records.push_back(std::move(rec));
  };

  auto one_step = [&](const StateVector& from) {
    StepRecord rec;
    if (cfg.kind == MethodKind::TrapezoidalK) {
      rec.y = step_trapezoidal_k(H, cfg.rule, from, h, cfg.fixed_point, &rec.fp_iterations);
    } else {
      // A starter step of total length h is the HBVM over [t, t + 2 (h/2)].
      auto hb = step_hbvm4(H, cfg.rule, from, 0.5 * h, cfg.fixed_point);
      rec.y = std::move(hb.u2);
      rec.fp_iterations = hb.fp_iterations;
    }
    return rec;
  };

  {
    const bool two_step_kind = cfg.kind == MethodKind::Mk || cfg.kind == MethodKind::MkLinear;
    if (!two_step_kind) {
      for (int n = 1; n <= n_steps; ++n) {
        try {
          accept(one_step(traj.records.back().y), n);
        } catch (const Error& e) {
          rethrow_with_context(e, "step " + std::to_string(n));
        }
      }
      return traj;
    }

    try {
      if (options.starter == Starter::Exact) {
        StepRecord rec;
        rec.y = options.exact(options.t0 + h);
        accept(std::move(rec), 1);
      } else {
        accept(one_step(y0), 1);
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "starter step");
    }

    // y_{n+1} = y_{n-1} + increment is accumulated with compensated summation,
    // one compensation vector for each of the even and odd subsequences.
    const bool corrected = cfg.kind == MethodKind::Mk;
    const std::size_t dim = y0.size();
    std::array<std::vector<double>, 2> carry{std::vector<double>(dim), std::vector<double>(dim)};
    std::vector<double> increment, sum(dim);
    for (int n = 2; n <= n_steps; ++n) {
      const auto& prev = traj.records[n - 2].y;
      const auto& curr = traj.records[n - 1].y;
      try {
        auto rec = two_step(H, cfg, prev, curr, h, corrected, nullptr, &increment);
        auto& c = carry[n % 2];
        for (std::size_t j = 0; j < dim; ++j) {
          const double d = increment[j] + c[j];
          sum[j] = prev[j] + d;
          c[j] = d - (sum[j] - prev[j]);
        }
        rec.y = StateVector(sum);
        if (cfg.drift_correct) std::fill(c.begin(), c.end(), 0.0);
        accept(std::move(rec), n);
      } catch (const Error& e) {
        rethrow_with_context(e, "step " + std::to_string(n));
      }
    }
  }
  return traj;
}

}  // namespace hamstep
