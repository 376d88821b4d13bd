/*
 * C interface to the hamstep integrators.
 *
 * Every object is an opaque handle created by a create or run function and
 * released with the matching *_free. Functions return HS_OK or an error code;
 * hs_last_error() then holds a message for the calling thread. Strings
 * returned through char** are allocated by the library and released with
 * hs_string_free.
 */
#ifndef HAMSTEP_H_
#define HAMSTEP_H_

#include <stddef.h>

#if defined(_WIN32)
#define HS_API __declspec(dllexport)
#else
#define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HS_OK = 0,
  HS_ERR_INVALID_ARGUMENT = 1,
  HS_ERR_DIMENSION = 2,
  HS_ERR_UNSUPPORTED = 3,
  HS_ERR_DIVERGENCE = 4,
  HS_ERR_DEGENERATE_GRADIENT = 5,
  HS_ERR_IO = 6,
  HS_ERR_INTERNAL = 99
} hs_status;

typedef enum { HS_LOBATTO = 0, HS_GAUSS = 1, HS_UNIFORM = 2 } hs_family;

typedef enum { HS_METHOD_MK = 0, HS_METHOD_MK_LINEAR = 1, HS_METHOD_HBVM4 = 2, HS_METHOD_TRAPEZOIDAL = 3 } hs_method;

typedef enum { HS_PREDICT_EXTRAPOLATE = 0, HS_PREDICT_LINEAR_METHOD = 1 } hs_predictor;

typedef enum { HS_FORMAT_CSV = 0, HS_FORMAT_JSON = 1 } hs_format;

typedef struct hs_problem hs_problem;
typedef struct hs_rule hs_rule;
typedef struct hs_trajectory hs_trajectory;
typedef struct hs_convergence hs_convergence;
typedef struct hs_drift hs_drift;

typedef struct {
  hs_method method;
  hs_family family;
  int k;
  double fp_tol;
  int fp_max_iter;
  hs_predictor predictor;
  int drift_correct;
  double a_norm_floor;
} hs_config;

typedef struct {
  double t;
  double energy_error;
  double residual; /* NaN where undefined */
  int fp_iterations;
  double correction_norm;
  int degenerate_gradient;
} hs_step_record;

typedef struct {
  double h;
  double final_error;      /* NaN when absent */
  double order_estimate;   /* NaN when absent */
  double max_energy_error; /* NaN when absent */
  double final_residual;   /* NaN when absent */
  double residual_order;   /* NaN when absent */
  int ok;
} hs_convergence_row;

HS_API const char* hs_last_error(void);
HS_API const char* hs_status_string(hs_status status);
HS_API void hs_string_free(char* s);

/* Problems. Built-in names: pendulum3, fhp6, kepler, sho. `param` is the
 * Kepler eccentricity and is ignored otherwise. */
HS_API hs_status hs_problem_builtin(const char* name, double param, hs_problem** out);
/* Polynomial problem with n_terms terms; exponents is row-major n_terms x 2m. */
HS_API hs_status hs_problem_polynomial(const char* name, size_t dof, size_t n_terms, const double* coefficients,
                                       const unsigned* exponents, const double* y0, double default_t_end,
                                       hs_problem** out);
HS_API void hs_problem_free(hs_problem* p);
HS_API size_t hs_problem_dim(const hs_problem* p);
/* Polynomial degree, or -1 for a non-polynomial Hamiltonian. */
HS_API int hs_problem_degree(const hs_problem* p);
HS_API double hs_problem_default_t_end(const hs_problem* p);
HS_API hs_status hs_problem_initial_state(const hs_problem* p, double* out);
HS_API hs_status hs_problem_energy(const hs_problem* p, const double* y, double* out);
HS_API hs_status hs_problem_gradient(const hs_problem* p, const double* y, double* out);

/* Quadrature rules on [0, 1]. */
HS_API hs_status hs_parse_family(const char* name, hs_family* out);
HS_API hs_status hs_rule_create(hs_family family, int k, hs_rule** out);
HS_API void hs_rule_free(hs_rule* r);
HS_API int hs_rule_size(const hs_rule* r);
HS_API int hs_rule_degree(const hs_rule* r);
HS_API int hs_rule_verified_degree(const hs_rule* r);
HS_API void hs_rule_nodes(const hs_rule* r, double* out);
HS_API void hs_rule_weights(const hs_rule* r, double* out);
HS_API hs_status hs_rule_json(const hs_rule* r, char** out);
HS_API hs_status hs_required_nodes(hs_family family, int degree, int* k);

/* Method configuration: Mk on 5 Lobatto nodes, tolerance 1e-14, 200 sweeps. */
HS_API void hs_config_default(hs_config* cfg);
HS_API hs_status hs_parse_method(const char* name, hs_method* out);

/* Single run over [0, t_end] with step h; t_end / h must be an integer. */
HS_API hs_status hs_integrate(const hs_problem* p, const hs_config* cfg, double h, double t_end,
                              hs_trajectory** out);
HS_API void hs_trajectory_free(hs_trajectory* t);
HS_API size_t hs_trajectory_size(const hs_trajectory* t);
HS_API double hs_trajectory_max_energy_error(const hs_trajectory* t);
/* Fills rec and, when y is non-null, the state (hs_problem_dim entries). */
HS_API hs_status hs_trajectory_record(const hs_trajectory* t, size_t i, hs_step_record* rec, double* y);
HS_API hs_status hs_trajectory_format(const hs_trajectory* t, hs_format fmt, char** out);

/* Convergence study over a halving sequence of stepsizes. */
HS_API hs_status hs_converge(const hs_problem* p, const hs_config* cfg, const double* h_list, size_t n_h,
                             double t_end, hs_convergence** out);
HS_API void hs_convergence_free(hs_convergence* c);
HS_API size_t hs_convergence_size(const hs_convergence* c);
HS_API hs_status hs_convergence_get_row(const hs_convergence* c, size_t i, hs_convergence_row* row);
HS_API hs_status hs_convergence_format(const hs_convergence* c, hs_format fmt, char** out);

/* Energy-error series for a list like "mk:lobatto:5,mk-lin:lobatto:5:dc". */
HS_API hs_status hs_drift_run(const hs_problem* p, const char* configs, double fp_tol, int fp_max_iter, double h,
                          double t_end, hs_drift** out);
HS_API void hs_drift_free(hs_drift* d);
HS_API size_t hs_drift_series_count(const hs_drift* d);
HS_API hs_status hs_drift_format(const hs_drift* d, char** out);

#ifdef __cplusplus
}
#endif

#endif /* HAMSTEP_H_ */
