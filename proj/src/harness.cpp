#include "hamstep/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <sstream>

#include <json.hpp>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct CellResult {
  std::optional<Trajectory> traj;
  std::string status = "ok";
};

CellResult run_cell(const ProblemSpec& problem, const MethodConfig& cfg, double h, double t_end) {
  CellResult out;
  try {
    const int n = step_count(t_end, h);
    IntegrateOptions opts;
    out.traj = integrate(problem.hamiltonian, cfg, problem.y0, h, n, opts);
  } catch (const Error& e) {
    out.status = e.what();
  }
  return out;
}

template <class F>
auto launch(bool parallel, F&& f) {
  return std::async(parallel ? std::launch::async : std::launch::deferred, std::forward<F>(f));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_real(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_opt_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw InvalidArgument("malformed number '" + s + "' in CSV");
  return v;
}

nlohmann::json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json json_opt(const std::optional<double>& x) { return x ? json_real(*x) : nlohmann::json(nullptr); }

constexpr const char* kConvergenceHeader =
    "problem,method,h,final_error,order_estimate,max_energy_error,final_residual,residual_order,status,reference";

}  // namespace

std::optional<double> estimate_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0) || !std::isfinite(err_coarse) || !std::isfinite(err_fine)) {
    return std::nullopt;
  }
  return std::log2(err_coarse / err_fine);
}

int step_count(double t_end, double h) {
  if (!(h > 0.0) || !(t_end > 0.0)) throw InvalidArgument("stepsize and end time must be positive");
  const double n = std::round(t_end / h);
  if (n < 1.0 || std::abs(n * h - t_end) > 1e-9 * t_end) {
    throw InvalidArgument("end time " + format_real(t_end) + " is not an integer multiple of h = " +
                          format_real(h));
  }
  return static_cast<int>(n);
}

ConvergenceReport run_convergence(const ProblemSpec& problem, const MethodConfig& cfg,
                                  const std::vector<double>& h_list, double t_end,
                                  const ConvergenceOptions& options) {
  if (h_list.empty()) throw InvalidArgument("empty stepsize list");
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    if (std::abs(h_list[i] - 0.5 * h_list[i - 1]) > 1e-12 * h_list[i - 1]) {
      throw InvalidArgument("stepsizes must form a halving sequence");
    }
  }
  if (options.reference_refinement < 1) throw InvalidArgument("reference refinement must be positive");
  for (double h : h_list) (void)step_count(t_end, h);

  ConvergenceReport report;
  report.problem = problem.name;
  report.method = std::string(to_string(cfg.kind)) + ":" + std::string(to_string(cfg.rule.family())) + ":" +
                  std::to_string(cfg.rule.size());

  std::vector<std::future<CellResult>> cells;
  cells.reserve(h_list.size());
  for (double h : h_list) {
    cells.push_back(launch(options.parallel, [&problem, &cfg, h, t_end] { return run_cell(problem, cfg, h, t_end); }));
  }

  std::vector<double> y_ref;
  std::string ref_failure;
  if (problem.reference_solution) {
    y_ref = problem.reference_solution(t_end).values();
    report.reference = "exact solution";
  } else {
    const double h_ref = h_list.back() / options.reference_refinement;
    report.reference = "self-reference h=" + format_real(h_ref);
    auto ref = run_cell(problem, cfg, h_ref, t_end);
    if (ref.traj) {
      y_ref = ref.traj->records.back().y.values();
    } else {
      ref_failure = "reference run failed: " + ref.status;
    }
  }
  const double ref_norm = norm2(y_ref);
  if (!y_ref.empty()) {
    report.reference += ref_norm > 1.0 ? "; error relative to |y_ref|=" + format_real(ref_norm) : "; absolute error";
  }

  std::optional<double> prev_err;
  std::optional<double> prev_res;
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    auto cell = cells[i].get();
    ConvergenceRow row;
    row.h = h_list[i];
    if (!cell.traj) {
      row.status = cell.status;
    } else {
      const auto& last = cell.traj->records.back();
      row.max_energy_error = cell.traj->max_abs_energy_error();
      if (std::isfinite(last.residual)) row.final_residual = last.residual;
      if (!y_ref.empty()) {
        std::vector<double> diff(y_ref.size());
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = last.y[j] - y_ref[j];
        double err = norm2(diff);
        if (ref_norm > 1.0) err /= ref_norm;
        row.final_error = err;
      } else {
        row.status = ref_failure;
      }
    }
    if (prev_err && row.final_error) row.order_estimate = estimate_order(*prev_err, *row.final_error);
    if (prev_res && row.final_residual) {
      row.residual_order = estimate_order(std::abs(*prev_res), std::abs(*row.final_residual));
    }
    prev_err = row.final_error;
    prev_res = row.final_residual;
    report.rows.push_back(std::move(row));
  }
  return report;
}

DriftReport run_drift(const ProblemSpec& problem, const std::vector<LabeledConfig>& configs, double h,
                      double t_end, bool parallel) {
  if (configs.empty()) throw InvalidArgument("no configurations given");
  (void)step_count(t_end, h);

  std::vector<std::future<CellResult>> cells;
  for (const auto& lc : configs) {
    cells.push_back(launch(parallel, [&problem, &lc, h, t_end] { return run_cell(problem, lc.config, h, t_end); }));
  }

  DriftReport report;
  report.problem = problem.name;
  report.h = h;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto cell = cells[i].get();
    DriftSeries s;
    s.label = configs[i].label;
    s.status = cell.status;
    if (cell.traj) {
      for (const auto& r : cell.traj->records) {
        s.t.push_back(r.t);
        s.abs_energy_error.push_back(std::abs(r.energy_error));
      }
    }
    report.series.push_back(std::move(s));
  }
  return report;
}

std::vector<LabeledConfig> parse_config_list(std::string_view spec, const FixedPointControls& controls) {
  std::vector<LabeledConfig> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    std::string_view raw = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    raw = raw.substr(first, raw.find_last_not_of(" \t") - first + 1);
    const std::string item(raw);

    std::vector<std::string> parts;
    std::stringstream ss(item);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "dc")) {
      throw InvalidArgument("bad configuration '" + item + "', expected method:family:k[:dc]");
    }
    MethodConfig cfg;
    cfg.kind = parse_method_kind(parts[0]);
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InvalidArgument("bad node count in '" + item + "'");
    }
    cfg.rule = QuadratureRule::make(parse_node_family(parts[1]), k);
    cfg.fixed_point = controls;
    cfg.drift_correct = parts.size() == 4;
    out.push_back({item, cfg});
  }
  if (out.empty()) throw InvalidArgument("empty configuration list");
  return out;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const ConvergenceReport& report) {
  std::string out = std::string(kConvergenceHeader) + "\n";
  for (const auto& r : report.rows) {
    out += csv_field(report.problem) + "," + csv_field(report.method) + "," + format_real(r.h) + "," +
           opt_real(r.final_error) + "," + opt_real(r.order_estimate) + "," + opt_real(r.max_energy_error) + "," +
           opt_real(r.final_residual) + "," + opt_real(r.residual_order) + "," + csv_field(r.status) + "," +
           csv_field(report.reference) + "\n";
  }
  return out;
}

ConvergenceReport parse_convergence_csv(std::string_view csv) {
  ConvergenceReport report;
  std::size_t pos = 0;
  bool header = true;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    const auto line = csv.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != kConvergenceHeader) throw InvalidArgument("unexpected convergence CSV header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw InvalidArgument("convergence CSV row has " + std::to_string(f.size()) + " fields");
    report.problem = f[0];
    report.method = f[1];
    report.reference = f[9];
    ConvergenceRow row;
    row.h = parse_opt_real(f[2]).value_or(0.0);
    row.final_error = parse_opt_real(f[3]);
    row.order_estimate = parse_opt_real(f[4]);
    row.max_energy_error = parse_opt_real(f[5]);
    row.final_residual = parse_opt_real(f[6]);
    row.residual_order = parse_opt_real(f[7]);
    row.status = f[8];
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["problem"] = report.problem;
  j["method"] = report.method;
  j["reference"] = report.reference;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"h", r.h},
                         {"final_error", json_opt(r.final_error)},
                         {"order_estimate", json_opt(r.order_estimate)},
                         {"max_energy_error", json_opt(r.max_energy_error)},
                         {"final_residual", json_opt(r.final_residual)},
                         {"residual_order", json_opt(r.residual_order)},
                         {"status", r.status}});
  }
  return j.dump(2) + "\n";
}

std::string to_csv(const DriftReport& report) {
  std::string out = "config,t,abs_h_error\n";
  for (const auto& s : report.series) {
    const std::string label = csv_field(s.label);
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      out += label + "," + format_real(s.t[i]) + "," + format_real(s.abs_energy_error[i]) + "\n";
    }
  }
  return out;
}

std::string to_csv(const Trajectory& traj) {
  std::string out = "t";
  const std::size_t dim = traj.records.empty() ? 0 : traj.records.front().y.size();
  for (std::size_t j = 0; j < dim / 2; ++j) out += ",q" + std::to_string(j + 1);
  for (std::size_t j = 0; j < dim / 2; ++j) out += ",p" + std::to_string(j + 1);
  out += ",energy_error,residual,fp_iterations,correction_norm\n";
  for (const auto& r : traj.records) {
    out += format_real(r.t);
    for (double x : r.y.values()) out += "," + format_real(x);
    out += "," + format_real(r.energy_error) + "," + (std::isfinite(r.residual) ? format_real(r.residual) : "") +
           "," + std::to_string(r.fp_iterations) + "," + format_real(r.correction_norm) + "\n";
  }
  return out;
}

std::string to_json(const Trajectory& traj) {
  nlohmann::json j;
  j["h"] = traj.h;
  j["initial_energy"] = traj.initial_energy;
  j["records"] = nlohmann::json::array();
  for (const auto& r : traj.records) {
    j["records"].push_back({{"t", r.t},
                            {"y", r.y.values()},
                            {"energy_error", json_real(r.energy_error)},
                            {"residual", json_real(r.residual)},
                            {"fp_iterations", r.fp_iterations},
                            {"correction_norm", json_real(r.correction_norm)},
                            {"degenerate_gradient", r.degenerate_gradient}});
  }
  return j.dump(2) + "\n";
}

std::string to_json(const QuadratureRule& rule) {
  nlohmann::json j;
  j["family"] = std::string(to_string(rule.family()));
  j["k"] = rule.size();
  j["nodes"] = std::vector<double>(rule.nodes().begin(), rule.nodes().end());
  j["weights"] = std::vector<double>(rule.weights().begin(), rule.weights().end());
  j["degree_of_precision"] = rule.degree_of_precision();
  j["verified_degree"] = rule.verified_degree();
  return j.dump(2) + "\n";
}

}  // namespace hamstep
