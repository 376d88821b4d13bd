// Command-line driver for the hamstep library. Talks to the library only
// through the C interface.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hamstep/hamstep.h"

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(hs_status st) {
  if (st != HS_OK) throw CliError(std::string(hs_status_string(st)) + ": " + hs_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ProblemPtr = std::unique_ptr<hs_problem, Deleter<hs_problem, hs_problem_free>>;
using RulePtr = std::unique_ptr<hs_rule, Deleter<hs_rule, hs_rule_free>>;
using TrajectoryPtr = std::unique_ptr<hs_trajectory, Deleter<hs_trajectory, hs_trajectory_free>>;
using ConvergencePtr = std::unique_ptr<hs_convergence, Deleter<hs_convergence, hs_convergence_free>>;
using DriftPtr = std::unique_ptr<hs_drift, Deleter<hs_drift, hs_drift_free>>;

std::string take_string(char* s) {
  std::string out(s);
  hs_string_free(s);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw CliError("write to '" + path + "' failed");
}

// A user polynomial file looks like
//   {"dof": 1, "terms": [[0.5, [0, 2]], [0.5, [2, 0]]], "y0": [0, 1], "t_end": 10}
ProblemPtr load_polynomial(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CliError("cannot read problem file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CliError("problem file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    const auto dof = j.at("dof").get<std::size_t>();
    std::vector<double> coefs;
    std::vector<unsigned> exps;
    for (const auto& term : j.at("terms")) {
      coefs.push_back(term.at(0).get<double>());
      const auto e = term.at(1).get<std::vector<unsigned>>();
      if (e.size() != 2 * dof) throw CliError("term exponent vector must have 2*dof entries");
      exps.insert(exps.end(), e.begin(), e.end());
    }
    const auto y0 = j.at("y0").get<std::vector<double>>();
    if (y0.size() != 2 * dof) throw CliError("y0 must have 2*dof entries");
    const double t_end = j.value("t_end", 10.0);
    const std::string name = j.value("name", std::filesystem::path(path).stem().string());
    hs_problem* p = nullptr;
    check(hs_problem_polynomial(name.c_str(), dof, coefs.size(), coefs.data(), exps.data(), y0.data(), t_end, &p));
    return ProblemPtr(p);
  } catch (const nlohmann::json::exception& e) {
    throw CliError("problem file '" + path + "': " + e.what());
  }
}

ProblemPtr load_problem(const std::string& name, double eccentricity) {
  if (name.ends_with(".json") || std::filesystem::exists(name)) return load_polynomial(name);
  hs_problem* p = nullptr;
  check(hs_problem_builtin(name.c_str(), eccentricity, &p));
  return ProblemPtr(p);
}

double parse_real(const std::string& s) {
  static const std::regex power(R"(\s*2\^(-?\d+)\s*)");
  std::smatch m;
  if (std::regex_match(s, m, power)) return std::ldexp(1.0, std::stoi(m[1]));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw CliError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw CliError("not a number: '" + s + "'");
  return v;
}

// "2^-1..2^-8" expands to the halving sequence; otherwise a comma-separated list.
std::vector<double> parse_h_list(const std::string& s) {
  static const std::regex range(R"(\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*)");
  std::smatch m;
  std::vector<double> out;
  if (std::regex_match(s, m, range)) {
    const int from = std::stoi(m[1]);
    const int to = std::stoi(m[2]);
    if (to > from) throw CliError("h-list range must decrease, e.g. 2^-1..2^-8");
    for (int e = from; e >= to; --e) out.push_back(std::ldexp(1.0, e));
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_real(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw CliError("empty h-list");
  return out;
}

struct MethodArgs {
  std::string method = "mk";
  std::string nodes = "lobatto";
  int k = 0;
  double fp_tol = 1e-14;
  int fp_max_iter = 200;
  std::string predictor = "extrapolate";
  bool drift_correct = false;
};

void add_method_options(CLI::App* cmd, MethodArgs& a, bool with_method) {
  if (with_method) {
    cmd->add_option("--method", a.method, "mk | mk-lin | hbvm4 | trap")->capture_default_str();
    cmd->add_option("--nodes", a.nodes, "lobatto | gauss | uniform")->capture_default_str();
    cmd->add_option("--k", a.k, "node count (default: smallest exact rule for polynomial problems, 9 otherwise)");
    cmd->add_option("--predictor", a.predictor, "extrapolate | linear")->capture_default_str();
    cmd->add_flag("--drift-correct", a.drift_correct, "project each point back towards H = H(y0)");
  }
  cmd->add_option("--fp-tol", a.fp_tol, "fixed-point tolerance (scaled by 1 + max|y0|)")->capture_default_str();
  cmd->add_option("--fp-max-iter", a.fp_max_iter, "fixed-point sweep cap")->capture_default_str();
}

hs_config make_config(const MethodArgs& a, const hs_problem* p) {
  hs_config cfg;
  hs_config_default(&cfg);
  check(hs_parse_method(a.method.c_str(), &cfg.method));
  check(hs_parse_family(a.nodes.c_str(), &cfg.family));
  cfg.k = a.k;
  if (cfg.k == 0) {
    const int deg = hs_problem_degree(p);
    if (deg >= 1) {
      check(hs_required_nodes(cfg.family, deg, &cfg.k));
    } else {
      cfg.k = 9;
    }
  }
  cfg.fp_tol = a.fp_tol;
  cfg.fp_max_iter = a.fp_max_iter;
  if (a.predictor == "linear") {
    cfg.predictor = HS_PREDICT_LINEAR_METHOD;
  } else if (a.predictor != "extrapolate") {
    throw CliError("unknown predictor '" + a.predictor + "'");
  }
  cfg.drift_correct = a.drift_correct ? 1 : 0;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-step energy-preserving integrators for canonical Hamiltonian systems"};
  app.require_subcommand(1);
  // -h would clash with the stepsize option --h.
  app.set_help_flag("--help", "print this help message and exit");

  std::string problem = "pendulum3";
  double eccentricity = 0.6;
  std::optional<double> t_end;
  std::string out;
  std::string format = "csv";
  MethodArgs margs;

  auto add_problem = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print this help message and exit");
    cmd->add_option("--problem", problem, "pendulum3 | fhp6 | kepler | sho | polynomial JSON file")
        ->capture_default_str();
    cmd->add_option("--ecc", eccentricity, "Kepler eccentricity")->capture_default_str();
    cmd->add_option("--t-end", t_end, "end time (default: the problem's interval)");
    cmd->add_option("--out", out, "output file (default: stdout)");
  };

  double h = 0.0;
  auto* integrate_cmd = app.add_subcommand("integrate", "single run, one record per step");
  add_problem(integrate_cmd);
  add_method_options(integrate_cmd, margs, true);
  integrate_cmd->add_option("--h", h, "stepsize")->required();
  integrate_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string h_list = "2^-1..2^-8";
  auto* converge_cmd = app.add_subcommand("converge", "error and order table over a halving sequence of h");
  add_problem(converge_cmd);
  add_method_options(converge_cmd, margs, true);
  converge_cmd->add_option("--h-list", h_list, "e.g. 2^-1..2^-8 or 0.5,0.25,0.125")->capture_default_str();
  converge_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string configs;
  auto* drift_cmd = app.add_subcommand("drift", "|H(y_n) - H(y_0)| series for several methods");
  add_problem(drift_cmd);
  add_method_options(drift_cmd, margs, false);
  drift_cmd->add_option("--configs", configs, "method:family:k[:dc], comma separated")->required();
  drift_cmd->add_option("--h", h, "stepsize")->required();

  std::string family = "lobatto";
  int k = 5;
  auto* quad_cmd = app.add_subcommand("quadrature", "print a quadrature rule on [0, 1] as JSON");
  quad_cmd->set_help_flag("--help", "print this help message and exit");
  quad_cmd->add_option("--family", family, "lobatto | gauss | uniform")->capture_default_str();
  quad_cmd->add_option("--k", k, "node count")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*quad_cmd) {
      hs_family fam;
      check(hs_parse_family(family.c_str(), &fam));
      hs_rule* r = nullptr;
      check(hs_rule_create(fam, k, &r));
      RulePtr rule(r);
      char* json = nullptr;
      check(hs_rule_json(rule.get(), &json));
      std::cout << take_string(json);
      return 0;
    }

    auto p = load_problem(problem, eccentricity);
    const double t = t_end.value_or(hs_problem_default_t_end(p.get()));
    const hs_format fmt = format == "json" ? HS_FORMAT_JSON : HS_FORMAT_CSV;
    char* text = nullptr;

    if (*integrate_cmd) {
      const auto cfg = make_config(margs, p.get());
      hs_trajectory* tr = nullptr;
      check(hs_integrate(p.get(), &cfg, h, t, &tr));
      TrajectoryPtr traj(tr);
      check(hs_trajectory_format(traj.get(), fmt, &text));
    } else if (*converge_cmd) {
      const auto cfg = make_config(margs, p.get());
      const auto hs = parse_h_list(h_list);
      hs_convergence* c = nullptr;
      check(hs_converge(p.get(), &cfg, hs.data(), hs.size(), t, &c));
      ConvergencePtr report(c);
      check(hs_convergence_format(report.get(), fmt, &text));
    } else if (*drift_cmd) {
      hs_drift* d = nullptr;
      check(hs_drift_run(p.get(), configs.c_str(), margs.fp_tol, margs.fp_max_iter, h, t, &d));
      DriftPtr report(d);
      check(hs_drift_format(report.get(), &text));
    }
    emit(take_string(text), out);
  } catch (const CliError& e) {
    std::cerr << "hamstep: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
