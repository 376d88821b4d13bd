// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hamstep/harness.hpp"
#include "hamstep/integrator.hpp"
#include "hamstep/problems.hpp"
#include "hamstep/quadrature.hpp"
#include "support.hpp"

using namespace hamstep;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(int id, const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  detail.precision(4);
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail << " [" << secs << " s]";
  report(id, name, ok, detail.str());
}

MethodConfig config(MethodKind kind, NodeFamily family, int k) {
  MethodConfig cfg;
  cfg.kind = kind;
  cfg.rule = QuadratureRule::make(family, k);
  return cfg;
}

std::vector<double> halvings(int from, int to) {
  std::vector<double> hs;
  for (int e = from; e <= to; ++e) hs.push_back(std::ldexp(1.0, -e));
  return hs;
}

bool within(double x, double target, double tol) { return std::isfinite(x) && std::abs(x - target) <= tol; }

double value(const std::optional<double>& x) { return x ? *x : NAN; }

bool all_ok(const ConvergenceReport& r, std::ostringstream& d) {
  for (const auto& row : r.rows) {
    if (row.status != "ok") {
      d << " h=" << row.h << " failed: " << row.status;
      return false;
    }
  }
  return true;
}

// Table 1, M5 column, h = 2^-3 .. 2^-8.
const double kTable1Error[] = {1.6e-6, 9.5e-8, 5.9e-9, 3.6e-10, 2.3e-11, 1.4e-12};

bool table1_mk(std::ostringstream& d) {
  // 2^-2 is included only so that the 2^-3 row carries an order estimate.
  const auto r = run_convergence(cubic_pendulum(), config(MethodKind::Mk, NodeFamily::Lobatto, 5), halvings(2, 8), 10.0);
  bool ok = all_ok(r, d);
  d << "error/paper";
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const double ratio = value(row.final_error) / kTable1Error[i - 1];
    const double order = value(row.order_estimate);
    const double energy = value(row.max_energy_error);
    d << " " << ratio;
    ok = ok && within(ratio, 1.0, 0.5) && within(order, 4.0, 0.3) && energy <= 1e-12;
  }
  d << "; orders";
  for (std::size_t i = 1; i < r.rows.size(); ++i) d << " " << value(r.rows[i].order_estimate);
  double emax = 0.0;
  for (const auto& row : r.rows) emax = std::max(emax, value(row.max_energy_error));
  d << "; max energy error " << emax;
  return ok && emax <= 1e-12;
}

bool table1_mk_linear(std::ostringstream& d) {
  const auto r =
      run_convergence(cubic_pendulum(), config(MethodKind::MkLinear, NodeFamily::Lobatto, 5), halvings(2, 8), 10.0);
  bool ok = all_ok(r, d);
  d << "orders";
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double order = value(r.rows[i].order_estimate);
    d << " " << order;
    ok = ok && within(order, 4.0, 0.3);
  }
  const double e4 = value(r.rows[2].max_energy_error);
  d << "; energy at 2^-4 " << e4 << " (paper 4.8883e-7)";
  ok = ok && e4 >= 4.8883e-7 / 3.0 && e4 <= 4.8883e-7 * 3.0;
  d << "; log2 energy ratios";
  for (std::size_t i = 2; i < r.rows.size(); ++i) {
    const double rate = std::log2(value(r.rows[i - 1].max_energy_error) / value(r.rows[i].max_energy_error));
    d << " " << rate;
    ok = ok && within(rate, 4.0, 0.3);
  }
  return ok;
}

bool table2(std::ostringstream& d) {
  const auto r = run_convergence(fhp_sextic(), config(MethodKind::Mk, NodeFamily::Lobatto, 7), halvings(1, 8), 250.0);
  bool ok = all_ok(r, d);
  double emax = 0.0;
  for (const auto& row : r.rows) emax = std::max(emax, value(row.max_energy_error));
  d << "max energy error " << emax;
  ok = ok && emax <= 1e-12;
  d << "; residual orders";
  for (const auto& row : r.rows) {
    if (row.h > 0.0625 || row.h < 0.0078125) continue;
    const double order = value(row.residual_order);
    d << " " << order;
    ok = ok && order >= 4.5 && order <= 5.5;
  }
  // The 2^-2 estimate (5.92 here and in the paper) compares against h = 1/2 and
  // is not yet asymptotic; the order window starts at 2^-3.
  d << "; solution orders (2^-2 excluded:";
  for (const auto& row : r.rows) {
    if (!row.order_estimate) continue;
    const double order = *row.order_estimate;
    if (row.h > 0.125) {
      d << " " << order << ")";
      continue;
    }
    d << " " << order;
    ok = ok && within(order, 4.0, 0.3);
  }
  return ok;
}

bool kepler_nodes(std::ostringstream& d) {
  const auto p = kepler(0.6);
  double prev = INFINITY;
  bool ok = true;
  d << "max energy error k=3,5,7,9:";
  for (int k : {3, 5, 7, 9}) {
    const auto traj = integrate(p.hamiltonian, config(MethodKind::Mk, NodeFamily::Lobatto, k), p.y0, 0.05, 1000);
    const double e = traj.max_abs_energy_error();
    d << " " << e;
    ok = ok && e < prev;
    prev = e;
  }
  return ok && prev <= 1e-12;
}

bool drift(std::ostringstream& d) {
  const auto p = kepler(0.6);
  auto cfg = config(MethodKind::Mk, NodeFamily::Lobatto, 9);
  cfg.drift_correct = true;
  const auto traj = integrate(p.hamiltonian, cfg, p.y0, 0.05, 100000);
  const double e = traj.max_abs_energy_error();
  d << "M9 with correction, 100000 steps: max|H-H0| " << e;
  return e <= 1e-12;
}

bool milne_simpson(std::ostringstream& d) {
  const auto sho = harmonic_oscillator();
  const auto cfg = config(MethodKind::MkLinear, NodeFamily::Lobatto, 3);
  double worst = 0.0;
  for (double h : {0.2, 0.1, 0.05, 0.01}) {
    StateVector y0 = sho.y0;
    StateVector y1 = sho.reference_solution(h);
    for (int n = 0; n < 200; ++n) {
      const auto rec = step_mk_linear(sho.hamiltonian, cfg, y0, y1, h);
      // y2 - y0 = (h/3) J (y0 + 4 y1 + y2), solved in closed form.
      const double s = h / 3.0;
      const double rq = y0[0] + s * (y0[1] + 4.0 * y1[1]);
      const double rp = y0[1] - s * (y0[0] + 4.0 * y1[0]);
      const double det = 1.0 + s * s;
      const std::vector<double> ms{(rq + s * rp) / det, (rp - s * rq) / det};
      worst = std::max(worst, testing::max_abs_diff(rec.y.values(), ms));
      y0 = y1;
      y1 = rec.y;
    }
  }
  d << "max step deviation " << worst;
  return worst <= 1e-13;
}

bool quadrature_suite(std::ostringstream& d) {
  int rules = 0;
  bool ok = true;
  auto check = [&](NodeFamily f, int k) {
    const auto rule = QuadratureRule::make(f, k);
    const int deg = rule.degree_of_precision();
    auto err = [&](int j) {
      long double s = 0.0L;
      for (int i = 0; i < rule.size(); ++i) s += (long double)rule.weights()[i] * std::pow((long double)rule.nodes()[i], j);
      return (double)std::abs(s - 1.0L / (j + 1));
    };
    bool good = true;
    for (int j = 0; j <= deg; ++j) good = good && err(j) <= 1e-12;
    good = good && err(deg + 1) > 1e-12;
    double sum = 0.0;
    for (double b : rule.weights()) sum += b;
    good = good && std::abs(sum - 1.0) <= 1e-14;
    const int n = rule.size();
    for (int i = 0; i < n; ++i) {
      good = good && std::abs(rule.nodes()[i] + rule.nodes()[n - 1 - i] - 1.0) <= 1e-15;
      good = good && std::abs(rule.weights()[i] - rule.weights()[n - 1 - i]) <= 1e-14;
      if (i > 0) good = good && rule.nodes()[i] > rule.nodes()[i - 1];
    }
    if (!good) d << " failed " << to_string(f) << ":" << k;
    ok = ok && good;
    ++rules;
  };
  for (int k = 2; k <= 9; ++k) check(NodeFamily::Lobatto, k);
  for (int k = 1; k <= 9; ++k) check(NodeFamily::Gauss, k);
  for (int k = 2; k <= 9; ++k) check(NodeFamily::Uniform, k);
  d << rules << " rules checked";
  return ok;
}

bool starter(std::ostringstream& d) {
  const auto pend = cubic_pendulum();
  const double H0 = pend.hamiltonian.energy(pend.y0);
  bool ok = true;
  std::vector<double> errs;
  double emax = 0.0;
  for (double h : halvings(2, 6)) {
    // One starter step of length h spans two half steps.
    const auto step = step_hbvm4(pend.hamiltonian, QuadratureRule::make(NodeFamily::Lobatto, 5), pend.y0, 0.5 * h);
    const auto ref = testing::rk4_flow(pend.hamiltonian, pend.y0, h, 4000);
    errs.push_back(testing::norm2(std::vector<double>{step.u2[0] - ref[0], step.u2[1] - ref[1]}));
    for (int k = 4; k <= 9; ++k) {
      const auto s = step_hbvm4(pend.hamiltonian, QuadratureRule::make(NodeFamily::Lobatto, k), pend.y0, 0.5 * h);
      emax = std::max(emax, std::abs(pend.hamiltonian.energy(s.u2) - H0));
    }
  }
  d << "error ratios (2^-3..2^-6):";
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = errs[i - 1] / errs[i];
    d << " " << ratio;
    ok = ok && ratio >= 24.0 && ratio <= 42.0;
  }
  d << "; max energy error over lobatto 4..9 " << emax;
  return ok && emax <= 1e-13;
}

bool gradients(std::ostringstream& d) {
  auto gen = testing::rng(2024);
  bool ok = true;
  double worst = 0.0;
  for (const auto& name : builtin_problem_names()) {
    const auto p = make_problem(name);
    const auto& H = p.hamiltonian;
    const std::size_t n = p.y0.size();
    for (int trial = 0; trial < 20; ++trial) {
      auto y = testing::random_vector(gen, n, -0.3, 0.3);
      for (std::size_t j = 0; j < n; ++j) y[j] += p.y0[j];
      const auto g = H.gradient(std::span<const double>(y));
      for (std::size_t j = 0; j < n; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(y[j]));
        auto yp = y, ym = y;
        yp[j] += step;
        ym[j] -= step;
        const double fd = (H.energy(StateVector(yp)) - H.energy(StateVector(ym))) / (2.0 * step);
        const double diff = std::abs(fd - g[j]);
        worst = std::max(worst, diff);
        if (diff > 1e-6) {
          ok = false;
          d << " " << name << "[" << j << "] off by " << diff;
        }
      }
    }
  }
  d << builtin_problem_names().size() << " problems x 20 points; worst component " << worst;
  return ok;
}

bool determinism(std::ostringstream& d) {
  const auto cfg = config(MethodKind::Mk, NodeFamily::Lobatto, 7);
  const auto a = to_csv(run_convergence(fhp_sextic(), cfg, halvings(3, 6), 10.0));
  const auto b = to_csv(run_convergence(fhp_sextic(), cfg, halvings(3, 6), 10.0));
  d << a.size() << " bytes, " << (a == b ? "identical" : "different");
  return a == b;
}

}  // namespace

int main() {
  run(1, "Table 1, M5 on the cubic pendulum", table1_mk);
  run(2, "Table 1, M'5 on the cubic pendulum", table1_mk_linear);
  run(3, "Table 2, M7 on the sextic problem", table2);
  run(4, "Kepler node study", kepler_nodes);
  run(5, "drift correction over 1e5 Kepler steps", drift);
  run(6, "Milne-Simpson degeneration", milne_simpson);
  run(7, "quadrature property suite", quadrature_suite);
  run(8, "HBVM-4 starter", starter);
  run(9, "gradient oracle suite", gradients);
  run(10, "determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
