#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hamstep/integrator.hpp"
#include "hamstep/problems.hpp"
#include "hamstep/quadrature.hpp"

namespace hamstep {

/// log2(err_coarse / err_fine); empty unless both errors are positive and finite.
[[nodiscard]] std::optional<double> estimate_order(double err_coarse, double err_fine);

struct ConvergenceRow {
  double h = 0.0;
  std::optional<double> final_error;
  std::optional<double> order_estimate;
  std::optional<double> max_energy_error;
  std::optional<double> final_residual;
  std::optional<double> residual_order;
  std::string status = "ok";  ///< "ok" or the failure message of this row
};

struct ConvergenceReport {
  std::string problem;
  std::string method;
  /// Where the reference came from and how the error was normalised, e.g.
  /// "exact solution; absolute error" or "self-reference h=...; error relative to |y_ref|=...".
  std::string reference;
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceOptions {
  /// Self-reference stepsize is min(h_list) / refinement when the problem has no exact solution.
  int reference_refinement = 8;
  /// Run the independent (h, reference) cells on separate threads.
  bool parallel = true;
};

/// Integrates `problem` once per stepsize and tabulates the final-time error,
/// its observed order, the maximum energy error and the residual r at the last
/// point. The error is ||y_N - y_ref(t_end)||_2, divided by ||y_ref|| when that
/// exceeds one. A failing row records its message and leaves the others intact.
[[nodiscard]] ConvergenceReport run_convergence(const ProblemSpec& problem, const MethodConfig& cfg,
                                                const std::vector<double>& h_list, double t_end,
                                                const ConvergenceOptions& options = {});

struct DriftSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> abs_energy_error;
  std::string status = "ok";
};

struct DriftReport {
  std::string problem;
  double h = 0.0;
  std::vector<DriftSeries> series;
};

struct LabeledConfig {
  std::string label;
  MethodConfig config;
};

/// One |H(y_n) - H(y_0)| series per configuration on a shared time grid.
[[nodiscard]] DriftReport run_drift(const ProblemSpec& problem, const std::vector<LabeledConfig>& configs,
                                    double h, double t_end, bool parallel = true);

/// Parses "mk:lobatto:5,mk-lin:lobatto:5:dc" into labelled configurations. Each
/// item is method:family:k with an optional trailing ":dc" for drift correction.
[[nodiscard]] std::vector<LabeledConfig> parse_config_list(std::string_view spec,
                                                           const FixedPointControls& controls = {});

/// Number of steps t_end / h; throws InvalidArgument unless it is a positive integer.
[[nodiscard]] int step_count(double t_end, double h);

// Serialisation. Reals are printed with 17 significant digits so that parsing
// reproduces them exactly; absent values are empty CSV fields or JSON null.

[[nodiscard]] std::string format_real(double x);
[[nodiscard]] std::string to_csv(const ConvergenceReport& report);
[[nodiscard]] std::string to_json(const ConvergenceReport& report);
[[nodiscard]] ConvergenceReport parse_convergence_csv(std::string_view csv);
[[nodiscard]] std::string to_csv(const DriftReport& report);
[[nodiscard]] std::string to_csv(const Trajectory& traj);
[[nodiscard]] std::string to_json(const Trajectory& traj);
[[nodiscard]] std::string to_json(const QuadratureRule& rule);

}  // namespace hamstep
