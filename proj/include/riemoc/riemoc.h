/*
 * riemoc — Riemannian optimal-control toolkit.
 *
 * C API over the C++ core: opaque handles, status codes, thread-local
 * error messages. Every object returned through an out-parameter is owned
 * by the caller and released with the matching _destroy/_free function.
 * Functions return RIEMOC_OK on success; on failure the out-parameters are
 * untouched and riemoc_last_error() describes the problem.
 */

#ifndef RIEMOC_H
#define RIEMOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RIEMOC_API __declspec(dllexport)
#else
#define RIEMOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum riemoc_status {
    RIEMOC_OK = 0,
    RIEMOC_ERR_INVALID_ARGUMENT = 1,
    RIEMOC_ERR_PARSE = 2,
    RIEMOC_ERR_EVAL = 3,
    RIEMOC_ERR_SINGULAR_METRIC = 4,
    RIEMOC_ERR_BLOW_UP = 5,
    RIEMOC_ERR_DIMENSION = 6,
    RIEMOC_ERR_IO = 7,
    RIEMOC_ERR_UNSUPPORTED = 8,
    RIEMOC_ERR_INTERNAL = 9
} riemoc_status;

typedef enum riemoc_field_kind {
    RIEMOC_FIELD_SCALAR = 0,
    RIEMOC_FIELD_VECTOR = 1,
    RIEMOC_FIELD_METRIC = 2,           /* g_ij, symmetric */
    RIEMOC_FIELD_INVERSE_METRIC = 3,   /* g^ij, symmetric */
    RIEMOC_FIELD_CONNECTION = 4,       /* Gamma^k_ij, symmetric in (i,j) */
    RIEMOC_FIELD_COSTATE_LOWER = 5,    /* p^k_ij, symmetric in (i,j) */
    RIEMOC_FIELD_COSTATE_UPPER_SYM = 6,/* p^ijk, symmetric in (i,j) */
    RIEMOC_FIELD_COSTATE_UPPER_RAW = 7,/* lambda^ijk, no symmetry */
    RIEMOC_FIELD_CURVATURE = 8         /* R_ijkl */
} riemoc_field_kind;

enum { RIEMOC_PRIMAL = 0, RIEMOC_DUAL = 1 };
enum { RIEMOC_MAXIMIZE = 0, RIEMOC_MINIMIZE = 1 };
enum { RIEMOC_FLUX_DIVERGENCE = 0, RIEMOC_FLUX_LAPLACIAN = 1 };
enum { RIEMOC_BOUNDARY_SIGN_PAPER = 0, RIEMOC_BOUNDARY_SIGN_DERIVED = 1 };
enum { RIEMOC_CHART_CARTESIAN = 0, RIEMOC_CHART_CYLINDRICAL = 1 };

typedef struct riemoc_grid riemoc_grid;
typedef struct riemoc_expr riemoc_expr;
typedef struct riemoc_field riemoc_field;
typedef struct riemoc_report riemoc_report;
typedef struct riemoc_pipe_flow riemoc_pipe_flow;

/* ------------------------------------------------------------------ meta */

RIEMOC_API const char* riemoc_version(void);
/* Message of the most recent failure on this thread ("" if none). */
RIEMOC_API const char* riemoc_last_error(void);
/* 1-based character offset of the most recent parse error, -1 otherwise. */
RIEMOC_API long riemoc_last_error_offset(void);
RIEMOC_API void riemoc_string_free(char* s);

/* ----------------------------------------------------------- expressions */

RIEMOC_API riemoc_status riemoc_expr_parse(const char* src, int n, riemoc_expr** out);
RIEMOC_API riemoc_status riemoc_expr_eval(const riemoc_expr* e, const double* x, int n,
                                          double* out);
/* axis is 1-based */
RIEMOC_API riemoc_status riemoc_expr_diff(const riemoc_expr* e, int axis,
                                          riemoc_expr** out);
/* Canonical rendering; free with riemoc_string_free. */
RIEMOC_API riemoc_status riemoc_expr_to_string(const riemoc_expr* e, char** out);
RIEMOC_API void riemoc_expr_destroy(riemoc_expr* e);

/* ------------------------------------------------------------------ grid */

/* m: per-axis sample counts, each odd and >= 3. */
RIEMOC_API riemoc_status riemoc_grid_create(int n, const double* x0, const double* x1,
                                            const int* m, riemoc_grid** out);
RIEMOC_API void riemoc_grid_destroy(riemoc_grid* g);
RIEMOC_API int riemoc_grid_dim(const riemoc_grid* g);
RIEMOC_API long long riemoc_grid_point_count(const riemoc_grid* g);
RIEMOC_API riemoc_status riemoc_grid_spacing(const riemoc_grid* g, double* h_out);
RIEMOC_API riemoc_status riemoc_grid_point(const riemoc_grid* g, const int* idx,
                                           double* x_out);

/* ---------------------------------------------------------------- fields */

/* One expression per unique component, in canonical (upper-triangle,
 * lexicographic) order; symmetric kinds are mirrored automatically. */
RIEMOC_API riemoc_status riemoc_field_sample(const riemoc_grid* g, riemoc_field_kind kind,
                                             const char* const* exprs, int nexprs,
                                             riemoc_field** out);
/* Dense per-point values (point-major, full component tuples). Asymmetric
 * data for a symmetric kind is rejected. */
RIEMOC_API riemoc_status riemoc_field_from_values(const riemoc_grid* g,
                                                  riemoc_field_kind kind,
                                                  const double* values, long long nvalues,
                                                  riemoc_field** out);
RIEMOC_API void riemoc_field_destroy(riemoc_field* f);
RIEMOC_API int riemoc_field_component_count(const riemoc_field* f);
RIEMOC_API riemoc_status riemoc_field_value(const riemoc_field* f, const int* idx,
                                            int comp, double* out);
/* Off-grid evaluation through the expression backing. */
RIEMOC_API riemoc_status riemoc_field_eval(const riemoc_field* f, const double* x,
                                           int comp, double* out);
/* d(field)/dx^axis, axis 1-based: symbolic when expression-backed, else
 * 2nd-order finite differences. */
RIEMOC_API riemoc_status riemoc_field_partial(const riemoc_field* f, int axis,
                                              riemoc_field** out);
RIEMOC_API riemoc_status riemoc_field_write_csv(const riemoc_field* f, const char* path);
RIEMOC_API riemoc_status riemoc_field_csv_string(const riemoc_field* f, char** out);

/* Composite-Simpson quadrature over the domain (scalar fields). */
RIEMOC_API riemoc_status riemoc_integrate_interior(const riemoc_field* f, double* out);

/* Face integrand: x, 1-based face axis, side -1/+1 (outward normal covector
 * is side * e_axis). */
typedef double (*riemoc_boundary_fn)(const double* x, int axis, int side, void* ctx);
RIEMOC_API riemoc_status riemoc_integrate_boundary(const riemoc_grid* g,
                                                   riemoc_boundary_fn fn, void* ctx,
                                                   double* out);

/* -------------------------------------------------------------- geometry */

/* Outputs are optional (pass NULL to skip). Requires det > 0 everywhere. */
RIEMOC_API riemoc_status riemoc_metric_inverse_det(const riemoc_field* g,
                                                   riemoc_field** inverse,
                                                   riemoc_field** det,
                                                   riemoc_field** sqrt_det);
RIEMOC_API riemoc_status riemoc_christoffel(const riemoc_field* g, riemoc_field** gamma);
RIEMOC_API riemoc_status riemoc_riemann_lowered(const riemoc_field* g,
                                                const riemoc_field* gamma,
                                                riemoc_field** curvature);
/* max(|R_ijkl + R_jikl|, mixed-partial defect of the compatibility rhs). */
RIEMOC_API riemoc_status riemoc_cic_residual(const riemoc_field* g,
                                             const riemoc_field* gamma, double* out);
/* Both integrability diagnostics separately (outputs optional). */
RIEMOC_API riemoc_status riemoc_cic_residuals(const riemoc_field* g,
                                              const riemoc_field* gamma,
                                              double* curvature, double* mixed_partial);
RIEMOC_API riemoc_status riemoc_divergence(const riemoc_field* X, const riemoc_field* g,
                                           riemoc_field** out);
RIEMOC_API riemoc_status riemoc_laplace_beltrami(const riemoc_field* f,
                                                 const riemoc_field* g,
                                                 riemoc_field** out);

/* ------------------------------------------------------------- evolution */

/* eta: n*n row-major symmetric initial value at the lower corner. */
RIEMOC_API riemoc_status riemoc_evolve(const riemoc_field* gamma, const double* eta,
                                       int mode, riemoc_field** out);
RIEMOC_API riemoc_status riemoc_path_independence(const riemoc_field* gamma,
                                                  const double* eta, int mode,
                                                  double* out);
/* max |d_k g - rhs_k(g, Gamma)| over the grid. */
RIEMOC_API riemoc_status riemoc_evolution_residual(const riemoc_field* g,
                                                   const riemoc_field* gamma, int mode,
                                                   double* out);
/* Adjoint variant selected by the costate kind. */
RIEMOC_API riemoc_status riemoc_adjoint_residual(const riemoc_field* p,
                                                 const riemoc_field* gamma, double* out);
/* max |d_k (y_ij p^ijk)| over interior points. */
RIEMOC_API riemoc_status riemoc_duality_divergence(const riemoc_field* y,
                                                   const riemoc_field* p, double* out);

/* --------------------------------------------------------------- control */

RIEMOC_API riemoc_status riemoc_costate_from_c(const riemoc_field* C,
                                               const riemoc_field* g, riemoc_field** out);
/* Upper variant p^ijk = C^k g^ij. */
RIEMOC_API riemoc_status riemoc_costate_upper_from_c(const riemoc_field* C,
                                                     const riemoc_field* g_inv,
                                                     riemoc_field** out);
RIEMOC_API riemoc_status riemoc_solenoidal_residual(const riemoc_field* C, double* out);
/* Distance of a connection from the admissible box [-1,1] (0 when inside). */
RIEMOC_API riemoc_status riemoc_box_violation(const riemoc_field* gamma, double* out);
/* eps_out / mask_out are optional. */
RIEMOC_API riemoc_status riemoc_bang_bang(const riemoc_field* C, int direction,
                                          riemoc_field** gamma_out,
                                          riemoc_field** eps_out,
                                          riemoc_field** mask_out);
/* Enumerates symmetric {-1,0,1} connections, n <= 3. argmax_count optional. */
RIEMOC_API riemoc_status riemoc_brute_force_hmax(const double* C, int n, double* value,
                                                 long long* argmax_count);
/* H(x) of (g_or_inv, Gamma, p) as a scalar field; running cost zero. */
RIEMOC_API riemoc_status riemoc_hamiltonian_field(const riemoc_field* g_or_inv,
                                                  const riemoc_field* gamma,
                                                  const riemoc_field* p, int mode,
                                                  riemoc_field** out);
/* Trace Hamiltonian of the costate ansatz: -C^k Gamma^s_ks (dual) /
 * +C^k Gamma^s_ks (primal), as a scalar field. */
RIEMOC_API riemoc_status riemoc_hamiltonian_trace_field(const riemoc_field* C,
                                                        const riemoc_field* gamma,
                                                        int mode, riemoc_field** out);
RIEMOC_API riemoc_status riemoc_flux(int kind, const riemoc_field* x_or_f,
                                     const riemoc_field* g, double* interior,
                                     double* boundary);
RIEMOC_API riemoc_status riemoc_boundary_residual(int kind, const riemoc_field* C,
                                                  const riemoc_field* x_or_f,
                                                  const riemoc_field* g, int sign,
                                                  double* out);
/* Full maximum-principle certificate; tolerance overrides are optional
 * (names as in the report). */
RIEMOC_API riemoc_status riemoc_certificate(const riemoc_field* g,
                                            const riemoc_field* ginv,
                                            const riemoc_field* gamma,
                                            const riemoc_field* C, int kind,
                                            const riemoc_field* x_or_f, int mode,
                                            int samples, uint64_t seed, int sign,
                                            const char* const* tol_names,
                                            const double* tol_values, int ntol,
                                            riemoc_report** out);

/* --------------------------------------------------------------- reports */

RIEMOC_API int riemoc_report_size(const riemoc_report* r);
/* `upper_bound` receives 1 when the check passes by staying below the
 * tolerance, 0 when it must stay above. */
RIEMOC_API riemoc_status riemoc_report_entry(const riemoc_report* r, int i,
                                             const char** name, double* value,
                                             double* tolerance, int* upper_bound,
                                             int* pass);
RIEMOC_API int riemoc_report_pass(const riemoc_report* r);
/* JSON object {"checks": [...], "overall_pass": bool}; free with
 * riemoc_string_free. */
RIEMOC_API riemoc_status riemoc_report_to_json(const riemoc_report* r, char** out);
RIEMOC_API void riemoc_report_destroy(riemoc_report* r);

/* ------------------------------------------------------------- solutions */

/* eps: n entries in {-1,0,1}. Outputs optional. */
RIEMOC_API riemoc_status riemoc_conformal_pair(const riemoc_grid* g, const int* eps,
                                               double K, riemoc_field** gamma,
                                               riemoc_field** g_inv);
RIEMOC_API riemoc_status riemoc_conformal_primal_metric(const riemoc_grid* g,
                                                        const int* eps, double K,
                                                        riemoc_field** out);
/* exact_out (optional) receives 0 when some eps^i = 0. */
RIEMOC_API riemoc_status riemoc_rank_one_pair(const riemoc_grid* g, const int* eps,
                                              double alpha, const double* alpha_i,
                                              riemoc_field** gamma,
                                              riemoc_field** g_upper, int* exact_out);
/* Residual of d_k g^ij = -(g^is Gamma^j_sk + g^js Gamma^i_sk); with
 * plus_sign_variant != 0 the bracket enters with the opposite sign. */
RIEMOC_API riemoc_status riemoc_closed_form_residual(const riemoc_field* g_upper,
                                                     const riemoc_field* gamma,
                                                     int plus_sign_variant, double* out);

/* ------------------------------------------------------------------ pipe */

RIEMOC_API riemoc_status riemoc_pipe_flow_create(int chart, const char* c1,
                                                 const char* c2, const char* c3,
                                                 riemoc_pipe_flow** out);
RIEMOC_API void riemoc_pipe_flow_destroy(riemoc_pipe_flow* f);
RIEMOC_API int riemoc_pipe_chart(const riemoc_pipe_flow* f);
RIEMOC_API riemoc_status riemoc_pipe_transform(const riemoc_pipe_flow* f, int to_chart,
                                               riemoc_pipe_flow** out);
/* Components at a point of the flow's own chart. */
RIEMOC_API riemoc_status riemoc_pipe_eval(const riemoc_pipe_flow* f, const double p[3],
                                          double out[3]);
/* S(theta, z) = sgn(R(1, theta, z)). */
RIEMOC_API riemoc_status riemoc_pipe_wall_sign(const riemoc_pipe_flow* f, double theta,
                                               double z, double* out);
/* Optimal metric components (upper triangle 11,12,13,22,23,33). */
RIEMOC_API riemoc_status riemoc_pipe_metric(const riemoc_pipe_flow* f, double K,
                                            int chart, const double p[3],
                                            double out[6]);
/* Wall mesh r = exp(a S); writes the OBJ and/or the theta,z,S,r CSV
 * (either path may be NULL). */
RIEMOC_API riemoc_status riemoc_pipe_mesh_write(const riemoc_pipe_flow* f,
                                                double amplitude, int n_theta, int n_z,
                                                const char* obj_path,
                                                const char* sign_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RIEMOC_H */
