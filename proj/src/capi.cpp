#include "hamstep/hamstep.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "hamstep/errors.hpp"
#include "hamstep/harness.hpp"

using namespace hamstep;

struct hs_problem {
  ProblemSpec spec;
};
struct hs_rule {
  QuadratureRule rule;
};
struct hs_trajectory {
  Trajectory traj;
};
struct hs_convergence {
  ConvergenceReport report;
};
struct hs_drift {
  DriftReport report;
};

namespace {

thread_local std::string last_error;

hs_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return HS_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return HS_ERR_DIMENSION;
    case ErrorCode::Unsupported: return HS_ERR_UNSUPPORTED;
    case ErrorCode::FixedPointDivergence: return HS_ERR_DIVERGENCE;
    case ErrorCode::DegenerateGradient: return HS_ERR_DEGENERATE_GRADIENT;
    case ErrorCode::Io: return HS_ERR_IO;
  }
  return HS_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes and the thread's last error.
template <class F>
hs_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return HS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " must not be null");
}

NodeFamily to_family(hs_family f) {
  switch (f) {
    case HS_LOBATTO: return NodeFamily::Lobatto;
    case HS_GAUSS: return NodeFamily::Gauss;
    case HS_UNIFORM: return NodeFamily::Uniform;
  }
  throw InvalidArgument("unknown node family");
}

MethodKind to_kind(hs_method m) {
  switch (m) {
    case HS_METHOD_MK: return MethodKind::Mk;
    case HS_METHOD_MK_LINEAR: return MethodKind::MkLinear;
    case HS_METHOD_HBVM4: return MethodKind::Hbvm4;
    case HS_METHOD_TRAPEZOIDAL: return MethodKind::TrapezoidalK;
  }
  throw InvalidArgument("unknown method");
}

MethodConfig to_config(const hs_config* c) {
  require(c, "config");
  MethodConfig cfg;
  cfg.kind = to_kind(c->method);
  cfg.rule = QuadratureRule::make(to_family(c->family), c->k);
  cfg.fixed_point.tol = c->fp_tol;
  cfg.fixed_point.max_iter = c->fp_max_iter;
  cfg.predictor = c->predictor == HS_PREDICT_LINEAR_METHOD ? Predictor::LinearMethod : Predictor::Extrapolate;
  cfg.drift_correct = c->drift_correct != 0;
  cfg.a_norm_floor = c->a_norm_floor;
  cfg.validate();
  return cfg;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double or_nan(const std::optional<double>& x) {
  return x ? *x : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

extern "C" {

const char* hs_last_error(void) { return last_error.c_str(); }

const char* hs_status_string(hs_status status) {
  switch (status) {
    case HS_OK: return "ok";
    case HS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HS_ERR_DIMENSION: return "dimension mismatch";
    case HS_ERR_UNSUPPORTED: return "unsupported";
    case HS_ERR_DIVERGENCE: return "fixed-point divergence";
    case HS_ERR_DEGENERATE_GRADIENT: return "degenerate gradient";
    case HS_ERR_IO: return "i/o error";
    case HS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hs_string_free(char* s) { std::free(s); }

hs_status hs_problem_builtin(const char* name, double param, hs_problem** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const double e = std::isnan(param) ? 0.6 : param;
    *out = new hs_problem{make_problem(name, e)};
  });
}

hs_status hs_problem_polynomial(const char* name, size_t dof, size_t n_terms, const double* coefficients,
                                const unsigned* exponents, const double* y0, double default_t_end,
                                hs_problem** out) {
  return guarded([&] {
    require(out, "out");
    require(y0, "y0");
    if (n_terms > 0) {
      require(coefficients, "coefficients");
      require(exponents, "exponents");
    }
    std::vector<PolynomialHamiltonian::Term> terms;
    for (size_t i = 0; i < n_terms; ++i) {
      const unsigned* e = exponents + i * 2 * dof;
      terms.push_back({coefficients[i], Exponents(e, e + 2 * dof)});
    }
    PolynomialHamiltonian poly(dof, terms);
    StateVector y(std::span<const double>(y0, 2 * dof));
    *out = new hs_problem{polynomial_problem(name ? name : "polynomial", std::move(poly), std::move(y),
                                             default_t_end)};
  });
}

void hs_problem_free(hs_problem* p) { delete p; }

size_t hs_problem_dim(const hs_problem* p) { return p ? p->spec.hamiltonian.dim() : 0; }

int hs_problem_degree(const hs_problem* p) {
  if (!p) return -1;
  return p->spec.poly_degree().value_or(-1);
}

double hs_problem_default_t_end(const hs_problem* p) {
  return p ? p->spec.default_t_end : std::numeric_limits<double>::quiet_NaN();
}

hs_status hs_problem_initial_state(const hs_problem* p, double* out) {
  return guarded([&] {
    require(p, "problem");
    require(out, "out");
    const auto& v = p->spec.y0.values();
    std::copy(v.begin(), v.end(), out);
  });
}

hs_status hs_problem_energy(const hs_problem* p, const double* y, double* out) {
  return guarded([&] {
    require(p, "problem");
    require(y, "y");
    require(out, "out");
    *out = p->spec.hamiltonian.energy(std::span<const double>(y, p->spec.hamiltonian.dim()));
  });
}

hs_status hs_problem_gradient(const hs_problem* p, const double* y, double* out) {
  return guarded([&] {
    require(p, "problem");
    require(y, "y");
    require(out, "out");
    const std::size_t n = p->spec.hamiltonian.dim();
    p->spec.hamiltonian.gradient(std::span<const double>(y, n), std::span<double>(out, n));
  });
}

hs_status hs_parse_family(const char* name, hs_family* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    switch (parse_node_family(name)) {
      case NodeFamily::Lobatto: *out = HS_LOBATTO; break;
      case NodeFamily::Gauss: *out = HS_GAUSS; break;
      case NodeFamily::Uniform: *out = HS_UNIFORM; break;
    }
  });
}

hs_status hs_rule_create(hs_family family, int k, hs_rule** out) {
  return guarded([&] {
    require(out, "out");
    *out = new hs_rule{QuadratureRule::make(to_family(family), k)};
  });
}

void hs_rule_free(hs_rule* r) { delete r; }
int hs_rule_size(const hs_rule* r) { return r ? r->rule.size() : 0; }
int hs_rule_degree(const hs_rule* r) { return r ? r->rule.degree_of_precision() : -1; }
int hs_rule_verified_degree(const hs_rule* r) { return r ? r->rule.verified_degree() : -1; }

void hs_rule_nodes(const hs_rule* r, double* out) {
  if (r && out) std::copy(r->rule.nodes().begin(), r->rule.nodes().end(), out);
}

void hs_rule_weights(const hs_rule* r, double* out) {
  if (r && out) std::copy(r->rule.weights().begin(), r->rule.weights().end(), out);
}

hs_status hs_rule_json(const hs_rule* r, char** out) {
  return guarded([&] {
    require(r, "rule");
    require(out, "out");
    *out = dup_string(to_json(r->rule));
  });
}

hs_status hs_required_nodes(hs_family family, int degree, int* k) {
  return guarded([&] {
    require(k, "k");
    *k = required_nodes(to_family(family), degree);
  });
}

void hs_config_default(hs_config* cfg) {
  if (!cfg) return;
  const MethodConfig d;
  cfg->method = HS_METHOD_MK;
  cfg->family = HS_LOBATTO;
  cfg->k = d.rule.size();
  cfg->fp_tol = d.fixed_point.tol;
  cfg->fp_max_iter = d.fixed_point.max_iter;
  cfg->predictor = HS_PREDICT_EXTRAPOLATE;
  cfg->drift_correct = 0;
  cfg->a_norm_floor = d.a_norm_floor;
}

hs_status hs_parse_method(const char* name, hs_method* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    switch (parse_method_kind(name)) {
      case MethodKind::Mk: *out = HS_METHOD_MK; break;
      case MethodKind::MkLinear: *out = HS_METHOD_MK_LINEAR; break;
      case MethodKind::Hbvm4: *out = HS_METHOD_HBVM4; break;
      case MethodKind::TrapezoidalK: *out = HS_METHOD_TRAPEZOIDAL; break;
    }
  });
}

hs_status hs_integrate(const hs_problem* p, const hs_config* cfg, double h, double t_end, hs_trajectory** out) {
  return guarded([&] {
    require(p, "problem");
    require(out, "out");
    const auto config = to_config(cfg);
    const int n = step_count(t_end, h);
    *out = new hs_trajectory{integrate(p->spec.hamiltonian, config, p->spec.y0, h, n)};
  });
}

void hs_trajectory_free(hs_trajectory* t) { delete t; }
size_t hs_trajectory_size(const hs_trajectory* t) { return t ? t->traj.records.size() : 0; }

double hs_trajectory_max_energy_error(const hs_trajectory* t) {
  return t ? t->traj.max_abs_energy_error() : std::numeric_limits<double>::quiet_NaN();
}

hs_status hs_trajectory_record(const hs_trajectory* t, size_t i, hs_step_record* rec, double* y) {
  return guarded([&] {
    require(t, "trajectory");
    if (i >= t->traj.records.size()) throw InvalidArgument("record index out of range");
    const auto& r = t->traj.records[i];
    if (rec) {
      rec->t = r.t;
      rec->energy_error = r.energy_error;
      rec->residual = r.residual;
      rec->fp_iterations = r.fp_iterations;
      rec->correction_norm = r.correction_norm;
      rec->degenerate_gradient = r.degenerate_gradient ? 1 : 0;
    }
    if (y) std::copy(r.y.values().begin(), r.y.values().end(), y);
  });
}

hs_status hs_trajectory_format(const hs_trajectory* t, hs_format fmt, char** out) {
  return guarded([&] {
    require(t, "trajectory");
    require(out, "out");
    *out = dup_string(fmt == HS_FORMAT_JSON ? to_json(t->traj) : to_csv(t->traj));
  });
}

hs_status hs_converge(const hs_problem* p, const hs_config* cfg, const double* h_list, size_t n_h, double t_end,
                      hs_convergence** out) {
  return guarded([&] {
    require(p, "problem");
    require(h_list, "h_list");
    require(out, "out");
    const auto config = to_config(cfg);
    std::vector<double> hs(h_list, h_list + n_h);
    *out = new hs_convergence{run_convergence(p->spec, config, hs, t_end)};
  });
}

void hs_convergence_free(hs_convergence* c) { delete c; }
size_t hs_convergence_size(const hs_convergence* c) { return c ? c->report.rows.size() : 0; }

hs_status hs_convergence_get_row(const hs_convergence* c, size_t i, hs_convergence_row* row) {
  return guarded([&] {
    require(c, "report");
    require(row, "row");
    if (i >= c->report.rows.size()) throw InvalidArgument("row index out of range");
    const auto& r = c->report.rows[i];
    row->h = r.h;
    row->final_error = or_nan(r.final_error);
    row->order_estimate = or_nan(r.order_estimate);
    row->max_energy_error = or_nan(r.max_energy_error);
    row->final_residual = or_nan(r.final_residual);
    row->residual_order = or_nan(r.residual_order);
    row->ok = r.status == "ok" ? 1 : 0;
  });
}

hs_status hs_convergence_format(const hs_convergence* c, hs_format fmt, char** out) {
  return guarded([&] {
    require(c, "report");
    require(out, "out");
    *out = dup_string(fmt == HS_FORMAT_JSON ? to_json(c->report) : to_csv(c->report));
  });
}

hs_status hs_drift_run(const hs_problem* p, const char* configs, double fp_tol, int fp_max_iter, double h,
                   double t_end, hs_drift** out) {
  return guarded([&] {
    require(p, "problem");
    require(configs, "configs");
    require(out, "out");
    const auto list = parse_config_list(configs, FixedPointControls{fp_tol, fp_max_iter});
    for (const auto& lc : list) lc.config.validate();
    *out = new hs_drift{run_drift(p->spec, list, h, t_end)};
  });
}

void hs_drift_free(hs_drift* d) { delete d; }
size_t hs_drift_series_count(const hs_drift* d) { return d ? d->report.series.size() : 0; }

hs_status hs_drift_format(const hs_drift* d, char** out) {
  return guarded([&] {
    require(d, "report");
    require(out, "out");
    *out = dup_string(to_csv(d->report));
  });
}

}  // extern "C"
