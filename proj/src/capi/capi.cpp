#include "riemoc/riemoc.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "../core/control.hpp"
#include "../core/evolution.hpp"
#include "../core/geometry.hpp"
#include "../core/grid.hpp"
#include "../core/report.hpp"
#include "../core/solutions.hpp"

using riemoc::ErrorCode;
using riemoc::TensorField;

struct riemoc_grid {
    riemoc::GridPtr grid;
};
struct riemoc_expr {
    riemoc::Expr expr;
};
struct riemoc_field {
    TensorField field;
};
struct riemoc_report {
    riemoc::Report report;
};
struct riemoc_pipe_flow {
    riemoc::PipeFlow flow;
};

namespace {

thread_local std::string t_error_message;
thread_local long t_error_offset = -1;

riemoc_status map_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return RIEMOC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return RIEMOC_ERR_PARSE;
    case ErrorCode::Eval: return RIEMOC_ERR_EVAL;
    case ErrorCode::SingularMetric: return RIEMOC_ERR_SINGULAR_METRIC;
    case ErrorCode::BlowUp: return RIEMOC_ERR_BLOW_UP;
    case ErrorCode::Dimension: return RIEMOC_ERR_DIMENSION;
    case ErrorCode::Io: return RIEMOC_ERR_IO;
    case ErrorCode::Unsupported: return RIEMOC_ERR_UNSUPPORTED;
    }
    return RIEMOC_ERR_INTERNAL;
}

template <typename Fn>
riemoc_status guarded(Fn&& fn) {
    t_error_message.clear();
    t_error_offset = -1;
    try {
        fn();
        return RIEMOC_OK;
    } catch (const riemoc::ParseError& e) {
        t_error_message = e.what();
        t_error_offset = static_cast<long>(e.offset());
        return RIEMOC_ERR_PARSE;
    } catch (const riemoc::Error& e) {
        t_error_message = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        t_error_message = e.what();
        return RIEMOC_ERR_INTERNAL;
    }
}

riemoc_status fail_arg(const char* msg) {
    t_error_message = msg;
    t_error_offset = -1;
    return RIEMOC_ERR_INVALID_ARGUMENT;
}

riemoc::FieldKind to_kind(riemoc_field_kind kind) {
    switch (kind) {
    case RIEMOC_FIELD_SCALAR: return riemoc::FieldKind::Scalar;
    case RIEMOC_FIELD_VECTOR: return riemoc::FieldKind::Vector;
    case RIEMOC_FIELD_METRIC: return riemoc::FieldKind::Metric;
    case RIEMOC_FIELD_INVERSE_METRIC: return riemoc::FieldKind::InverseMetric;
    case RIEMOC_FIELD_CONNECTION: return riemoc::FieldKind::Connection;
    case RIEMOC_FIELD_COSTATE_LOWER: return riemoc::FieldKind::CostateLower;
    case RIEMOC_FIELD_COSTATE_UPPER_SYM: return riemoc::FieldKind::CostateUpperSym;
    case RIEMOC_FIELD_COSTATE_UPPER_RAW: return riemoc::FieldKind::CostateUpperRaw;
    case RIEMOC_FIELD_CURVATURE: return riemoc::FieldKind::Curvature;
    }
    throw riemoc::Error(ErrorCode::InvalidArgument, "unknown field kind");
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

riemoc::EvolutionMode to_mode(int mode) {
    return mode == RIEMOC_DUAL ? riemoc::EvolutionMode::Dual
                               : riemoc::EvolutionMode::Primal;
}

std::vector<int> sign_vector(const int* eps, int n) {
    return std::vector<int>(eps, eps + n);
}

nlohmann::ordered_json report_json(const riemoc::Report& rep) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"residual", c.value},
                          {"tolerance", c.tolerance},
                          {"bound", c.upper_bound ? "max" : "min"},
                          {"pass", c.pass}});
    }
    return {{"checks", checks}, {"overall_pass", rep.overall_pass()}};
}

} // namespace

extern "C" {

const char* riemoc_version(void) { return "1.0.0"; }

const char* riemoc_last_error(void) { return t_error_message.c_str(); }

long riemoc_last_error_offset(void) { return t_error_offset; }

void riemoc_string_free(char* s) { delete[] s; }

/* ----------------------------------------------------------- expressions */

riemoc_status riemoc_expr_parse(const char* src, int n, riemoc_expr** out) {
    if (!src || !out) return fail_arg("null argument");
    return guarded([&] { *out = new riemoc_expr{riemoc::Expr::parse(src, n)}; });
}

riemoc_status riemoc_expr_eval(const riemoc_expr* e, const double* x, int n,
                               double* out) {
    if (!e || !x || !out) return fail_arg("null argument");
    return guarded([&] { *out = e->expr.eval({x, static_cast<std::size_t>(n)}); });
}

riemoc_status riemoc_expr_diff(const riemoc_expr* e, int axis, riemoc_expr** out) {
    if (!e || !out) return fail_arg("null argument");
    return guarded([&] { *out = new riemoc_expr{e->expr.derivative(axis)}; });
}

riemoc_status riemoc_expr_to_string(const riemoc_expr* e, char** out) {
    if (!e || !out) return fail_arg("null argument");
    return guarded([&] { *out = dup_string(e->expr.str()); });
}

void riemoc_expr_destroy(riemoc_expr* e) { delete e; }

/* ------------------------------------------------------------------ grid */

riemoc_status riemoc_grid_create(int n, const double* x0, const double* x1,
                                 const int* m, riemoc_grid** out) {
    if (!x0 || !x1 || !m || !out || n < 1) return fail_arg("null or invalid argument");
    return guarded([&] {
        riemoc::Domain dom = riemoc::Domain::create({x0, static_cast<std::size_t>(n)},
                                                    {x1, static_cast<std::size_t>(n)});
        riemoc::GridSpec spec{std::vector<int>(m, m + n)};
        *out = new riemoc_grid{riemoc::make_grid(dom, spec)};
    });
}

void riemoc_grid_destroy(riemoc_grid* g) { delete g; }

int riemoc_grid_dim(const riemoc_grid* g) { return g ? g->grid->dim() : 0; }

long long riemoc_grid_point_count(const riemoc_grid* g) {
    return g ? static_cast<long long>(g->grid->point_count()) : 0;
}

riemoc_status riemoc_grid_spacing(const riemoc_grid* g, double* h_out) {
    if (!g || !h_out) return fail_arg("null argument");
    return guarded([&] {
        const auto& h = g->grid->spacing();
        std::memcpy(h_out, h.data(), h.size() * sizeof(double));
    });
}

riemoc_status riemoc_grid_point(const riemoc_grid* g, const int* idx, double* x_out) {
    if (!g || !idx || !x_out) return fail_arg("null argument");
    return guarded([&] {
        int n = g->grid->dim();
        g->grid->point({idx, static_cast<std::size_t>(n)},
                       {x_out, static_cast<std::size_t>(n)});
    });
}

/* ---------------------------------------------------------------- fields */

riemoc_status riemoc_field_sample(const riemoc_grid* g, riemoc_field_kind kind,
                                  const char* const* exprs, int nexprs,
                                  riemoc_field** out) {
    if (!g || !exprs || !out) return fail_arg("null argument");
    return guarded([&] {
        int n = g->grid->dim();
        std::vector<riemoc::Expr> parsed;
        parsed.reserve(static_cast<std::size_t>(nexprs));
        for (int i = 0; i < nexprs; ++i)
            parsed.push_back(riemoc::Expr::parse(exprs[i], n));
        *out = new riemoc_field{TensorField::sample(g->grid, to_kind(kind), parsed)};
    });
}

riemoc_status riemoc_field_from_values(const riemoc_grid* g, riemoc_field_kind kind,
                                       const double* values, long long nvalues,
                                       riemoc_field** out) {
    if (!g || !values || !out) return fail_arg("null argument");
    return guarded([&] {
        std::vector<double> v(values, values + nvalues);
        *out = new riemoc_field{
            TensorField::from_dense_values(g->grid, to_kind(kind), std::move(v))};
    });
}

void riemoc_field_destroy(riemoc_field* f) { delete f; }

int riemoc_field_component_count(const riemoc_field* f) {
    return f ? f->field.ncomp() : 0;
}

riemoc_status riemoc_field_value(const riemoc_field* f, const int* idx, int comp,
                                 double* out) {
    if (!f || !idx || !out) return fail_arg("null argument");
    return guarded([&] {
        if (comp < 0 || comp >= f->field.ncomp())
            throw riemoc::Error(ErrorCode::InvalidArgument, "component out of range");
        int n = f->field.dim();
        std::size_t p = f->field.grid()->flatten({idx, static_cast<std::size_t>(n)});
        *out = f->field.at(p, comp);
    });
}

riemoc_status riemoc_field_eval(const riemoc_field* f, const double* x, int comp,
                                double* out) {
    if (!f || !x || !out) return fail_arg("null argument");
    return guarded([&] {
        if (comp < 0 || comp >= f->field.ncomp())
            throw riemoc::Error(ErrorCode::InvalidArgument, "component out of range");
        int n = f->field.dim();
        *out = f->field.eval({x, static_cast<std::size_t>(n)}, comp);
    });
}

riemoc_status riemoc_field_partial(const riemoc_field* f, int axis, riemoc_field** out) {
    if (!f || !out) return fail_arg("null argument");
    return guarded([&] { *out = new riemoc_field{riemoc::fd_partial(f->field, axis)}; });
}

riemoc_status riemoc_field_write_csv(const riemoc_field* f, const char* path) {
    if (!f || !path) return fail_arg("null argument");
    return guarded([&] { riemoc::write_csv(f->field, path); });
}

riemoc_status riemoc_field_csv_string(const riemoc_field* f, char** out) {
    if (!f || !out) return fail_arg("null argument");
    return guarded([&] { *out = dup_string(riemoc::csv_string(f->field)); });
}

riemoc_status riemoc_integrate_interior(const riemoc_field* f, double* out) {
    if (!f || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::integrate_interior(f->field); });
}

riemoc_status riemoc_integrate_boundary(const riemoc_grid* g, riemoc_boundary_fn fn,
                                        void* ctx, double* out) {
    if (!g || !fn || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = riemoc::integrate_boundary(
            *g->grid, [&](std::span<const int>, std::span<const double> x, int axis,
                          int side) { return fn(x.data(), axis, side, ctx); });
    });
}

/* -------------------------------------------------------------- geometry */

riemoc_status riemoc_metric_inverse_det(const riemoc_field* g, riemoc_field** inverse,
                                        riemoc_field** det, riemoc_field** sqrt_det) {
    if (!g) return fail_arg("null argument");
    return guarded([&] {
        riemoc::MetricDecomposition dec = riemoc::metric_inverse_det(g->field);
        if (inverse) *inverse = new riemoc_field{std::move(dec.inverse)};
        if (det) *det = new riemoc_field{std::move(dec.det)};
        if (sqrt_det) *sqrt_det = new riemoc_field{std::move(dec.sqrt_det)};
    });
}

riemoc_status riemoc_christoffel(const riemoc_field* g, riemoc_field** gamma) {
    if (!g || !gamma) return fail_arg("null argument");
    return guarded(
        [&] { *gamma = new riemoc_field{riemoc::christoffel_from_metric(g->field)}; });
}

riemoc_status riemoc_riemann_lowered(const riemoc_field* g, const riemoc_field* gamma,
                                     riemoc_field** curvature) {
    if (!g || !gamma || !curvature) return fail_arg("null argument");
    return guarded([&] {
        *curvature = new riemoc_field{riemoc::riemann_lowered(g->field, gamma->field)};
    });
}

riemoc_status riemoc_cic_residual(const riemoc_field* g, const riemoc_field* gamma,
                                  double* out) {
    if (!g || !gamma || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::cic_residual(g->field, gamma->field); });
}

riemoc_status riemoc_cic_residuals(const riemoc_field* g, const riemoc_field* gamma,
                                   double* curvature, double* mixed_partial) {
    if (!g || !gamma) return fail_arg("null argument");
    return guarded([&] {
        riemoc::CicResiduals r = riemoc::cic_residuals(g->field, gamma->field);
        if (curvature) *curvature = r.curvature;
        if (mixed_partial) *mixed_partial = r.mixed_partial;
    });
}

riemoc_status riemoc_divergence(const riemoc_field* X, const riemoc_field* g,
                                riemoc_field** out) {
    if (!X || !g || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{riemoc::riemannian_divergence(X->field, g->field)};
    });
}

riemoc_status riemoc_laplace_beltrami(const riemoc_field* f, const riemoc_field* g,
                                      riemoc_field** out) {
    if (!f || !g || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{riemoc::laplace_beltrami(f->field, g->field)};
    });
}

/* ------------------------------------------------------------- evolution */

riemoc_status riemoc_evolve(const riemoc_field* gamma, const double* eta, int mode,
                            riemoc_field** out) {
    if (!gamma || !eta || !out) return fail_arg("null argument");
    return guarded([&] {
        int n = gamma->field.dim();
        riemoc::EvolutionProblem problem{to_mode(mode), gamma->field,
                                         std::vector<double>(eta, eta + n * n)};
        *out = new riemoc_field{riemoc::evolve_metric(problem)};
    });
}

riemoc_status riemoc_path_independence(const riemoc_field* gamma, const double* eta,
                                       int mode, double* out) {
    if (!gamma || !eta || !out) return fail_arg("null argument");
    return guarded([&] {
        int n = gamma->field.dim();
        riemoc::EvolutionProblem problem{to_mode(mode), gamma->field,
                                         std::vector<double>(eta, eta + n * n)};
        *out = riemoc::path_independence_check(problem);
    });
}

riemoc_status riemoc_evolution_residual(const riemoc_field* g, const riemoc_field* gamma,
                                        int mode, double* out) {
    if (!g || !gamma || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = riemoc::evolution_residual(g->field, gamma->field, to_mode(mode));
    });
}

riemoc_status riemoc_adjoint_residual(const riemoc_field* p, const riemoc_field* gamma,
                                      double* out) {
    if (!p || !gamma || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::adjoint_residual(p->field, gamma->field); });
}

riemoc_status riemoc_duality_divergence(const riemoc_field* y, const riemoc_field* p,
                                        double* out) {
    if (!y || !p || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::duality_flux_divergence(y->field, p->field); });
}

/* --------------------------------------------------------------- control */

riemoc_status riemoc_costate_from_c(const riemoc_field* C, const riemoc_field* g,
                                    riemoc_field** out) {
    if (!C || !g || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::CostateAnsatz ansatz = riemoc::costate_from_C(C->field, g->field);
        *out = new riemoc_field{std::move(ansatz.costate)};
    });
}

riemoc_status riemoc_costate_upper_from_c(const riemoc_field* C, const riemoc_field* g_inv,
                                          riemoc_field** out) {
    if (!C || !g_inv || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{riemoc::costate_upper_from_C(C->field, g_inv->field)};
    });
}

riemoc_status riemoc_solenoidal_residual(const riemoc_field* C, double* out) {
    if (!C || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::solenoidal_residual(C->field); });
}

riemoc_status riemoc_box_violation(const riemoc_field* gamma, double* out) {
    if (!gamma || !out) return fail_arg("null argument");
    return guarded([&] { *out = riemoc::box_violation(gamma->field); });
}

riemoc_status riemoc_bang_bang(const riemoc_field* C, int direction,
                               riemoc_field** gamma_out, riemoc_field** eps_out,
                               riemoc_field** mask_out) {
    if (!C || !gamma_out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::BangBangResult res = riemoc::bang_bang_synthesize(
            C->field, direction == RIEMOC_MINIMIZE ? riemoc::Direction::Minimize
                                                   : riemoc::Direction::Maximize);
        *gamma_out = new riemoc_field{std::move(res.gamma)};
        if (eps_out) *eps_out = new riemoc_field{std::move(res.eps)};
        if (mask_out) *mask_out = new riemoc_field{std::move(res.arbitrary)};
    });
}

riemoc_status riemoc_brute_force_hmax(const double* C, int n, double* value,
                                      long long* argmax_count) {
    if (!C || !value) return fail_arg("null argument");
    return guarded([&] {
        riemoc::BruteForceResult res =
            riemoc::brute_force_hamiltonian_max({C, static_cast<std::size_t>(n)}, n);
        *value = res.value;
        if (argmax_count) *argmax_count = res.argmax_count;
    });
}

riemoc_status riemoc_hamiltonian_field(const riemoc_field* g_or_inv,
                                       const riemoc_field* gamma, const riemoc_field* p,
                                       int mode, riemoc_field** out) {
    if (!g_or_inv || !gamma || !p || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{riemoc::hamiltonian_field(g_or_inv->field, gamma->field,
                                                          p->field, to_mode(mode))};
    });
}

riemoc_status riemoc_hamiltonian_trace_field(const riemoc_field* C,
                                             const riemoc_field* gamma, int mode,
                                             riemoc_field** out) {
    if (!C || !gamma || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{
            riemoc::hamiltonian_trace_field(C->field, gamma->field, to_mode(mode))};
    });
}

riemoc_status riemoc_flux(int kind, const riemoc_field* x_or_f, const riemoc_field* g,
                          double* interior, double* boundary) {
    if (!x_or_f || !g || !interior || !boundary) return fail_arg("null argument");
    return guarded([&] {
        riemoc::BolzaSpec spec{kind == RIEMOC_FLUX_LAPLACIAN
                                   ? riemoc::BolzaKind::Laplacian
                                   : riemoc::BolzaKind::Divergence,
                               x_or_f->field, riemoc::Direction::Maximize};
        riemoc::FluxValues v = riemoc::total_flux_functional(spec, g->field);
        *interior = v.interior;
        *boundary = v.boundary;
    });
}

riemoc_status riemoc_boundary_residual(int kind, const riemoc_field* C,
                                       const riemoc_field* x_or_f, const riemoc_field* g,
                                       int sign, double* out) {
    if (!C || !x_or_f || !g || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::BolzaSpec spec{kind == RIEMOC_FLUX_LAPLACIAN
                                   ? riemoc::BolzaKind::Laplacian
                                   : riemoc::BolzaKind::Divergence,
                               x_or_f->field, riemoc::Direction::Maximize};
        *out = riemoc::boundary_residual(spec, C->field, g->field,
                                         sign == RIEMOC_BOUNDARY_SIGN_DERIVED
                                             ? riemoc::BoundarySign::Derived
                                             : riemoc::BoundarySign::Paper);
    });
}

riemoc_status riemoc_certificate(const riemoc_field* g, const riemoc_field* ginv,
                                 const riemoc_field* gamma, const riemoc_field* C,
                                 int kind, const riemoc_field* x_or_f, int mode,
                                 int samples, uint64_t seed, int sign,
                                 const char* const* tol_names, const double* tol_values,
                                 int ntol, riemoc_report** out) {
    if (!g || !ginv || !gamma || !C || !x_or_f || !out) return fail_arg("null argument");
    if (ntol > 0 && (!tol_names || !tol_values)) return fail_arg("null tolerance table");
    return guarded([&] {
        riemoc::CostateAnsatz ansatz = riemoc::costate_from_C(C->field, g->field);
        riemoc::BolzaSpec spec{kind == RIEMOC_FLUX_LAPLACIAN
                                   ? riemoc::BolzaKind::Laplacian
                                   : riemoc::BolzaKind::Divergence,
                               x_or_f->field, riemoc::Direction::Maximize};
        riemoc::CertificateOptions options;
        options.mode = to_mode(mode);
        options.samples = samples;
        options.seed = seed;
        options.sign = sign == RIEMOC_BOUNDARY_SIGN_DERIVED
                           ? riemoc::BoundarySign::Derived
                           : riemoc::BoundarySign::Paper;
        for (int i = 0; i < ntol; ++i)
            options.tolerances[tol_names[i]] = tol_values[i];
        *out = new riemoc_report{riemoc::mp_certificate(g->field, ginv->field,
                                                        gamma->field, ansatz, spec,
                                                        options)};
    });
}

/* --------------------------------------------------------------- reports */

int riemoc_report_size(const riemoc_report* r) {
    return r ? static_cast<int>(r->report.checks.size()) : 0;
}

riemoc_status riemoc_report_entry(const riemoc_report* r, int i, const char** name,
                                  double* value, double* tolerance, int* upper_bound,
                                  int* pass) {
    if (!r) return fail_arg("null argument");
    if (i < 0 || i >= static_cast<int>(r->report.checks.size()))
        return fail_arg("report entry index out of range");
    const riemoc::CheckRecord& c = r->report.checks[static_cast<std::size_t>(i)];
    if (name) *name = c.name.c_str();
    if (value) *value = c.value;
    if (tolerance) *tolerance = c.tolerance;
    if (upper_bound) *upper_bound = c.upper_bound ? 1 : 0;
    if (pass) *pass = c.pass ? 1 : 0;
    return RIEMOC_OK;
}

int riemoc_report_pass(const riemoc_report* r) {
    return (r && r->report.overall_pass()) ? 1 : 0;
}

riemoc_status riemoc_report_to_json(const riemoc_report* r, char** out) {
    if (!r || !out) return fail_arg("null argument");
    return guarded([&] { *out = dup_string(report_json(r->report).dump(2)); });
}

void riemoc_report_destroy(riemoc_report* r) { delete r; }

/* ------------------------------------------------------------- solutions */

riemoc_status riemoc_conformal_pair(const riemoc_grid* g, const int* eps, double K,
                                    riemoc_field** gamma, riemoc_field** g_inv) {
    if (!g || !eps) return fail_arg("null argument");
    return guarded([&] {
        riemoc::ConformalPair pair =
            riemoc::conformal_pair(g->grid, sign_vector(eps, g->grid->dim()), K);
        if (gamma) *gamma = new riemoc_field{std::move(pair.gamma)};
        if (g_inv) *g_inv = new riemoc_field{std::move(pair.g_inv)};
    });
}

riemoc_status riemoc_conformal_primal_metric(const riemoc_grid* g, const int* eps,
                                             double K, riemoc_field** out) {
    if (!g || !eps || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = new riemoc_field{riemoc::conformal_primal_metric(
            g->grid, sign_vector(eps, g->grid->dim()), K)};
    });
}

riemoc_status riemoc_rank_one_pair(const riemoc_grid* g, const int* eps, double alpha,
                                   const double* alpha_i, riemoc_field** gamma,
                                   riemoc_field** g_upper, int* exact_out) {
    if (!g || !eps || !alpha_i) return fail_arg("null argument");
    return guarded([&] {
        int n = g->grid->dim();
        riemoc::RankOnePair pair =
            riemoc::rank_one_pair(g->grid, sign_vector(eps, n), alpha,
                                  {alpha_i, static_cast<std::size_t>(n)});
        if (gamma) *gamma = new riemoc_field{std::move(pair.gamma)};
        if (g_upper) *g_upper = new riemoc_field{std::move(pair.g_upper)};
        if (exact_out) *exact_out = pair.exact ? 1 : 0;
    });
}

riemoc_status riemoc_closed_form_residual(const riemoc_field* g_upper,
                                          const riemoc_field* gamma,
                                          int plus_sign_variant, double* out) {
    if (!g_upper || !gamma || !out) return fail_arg("null argument");
    return guarded([&] {
        *out = riemoc::verify_closed_form(g_upper->field, gamma->field,
                                          plus_sign_variant != 0);
    });
}

/* ------------------------------------------------------------------ pipe */

riemoc_status riemoc_pipe_flow_create(int chart, const char* c1, const char* c2,
                                      const char* c3, riemoc_pipe_flow** out) {
    if (!c1 || !c2 || !c3 || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::PipeChart pc = chart == RIEMOC_CHART_CYLINDRICAL
                                   ? riemoc::PipeChart::Cylindrical
                                   : riemoc::PipeChart::Cartesian;
        *out = new riemoc_pipe_flow{riemoc::PipeFlow::from_exprs(
            pc, riemoc::Expr::parse(c1, 3), riemoc::Expr::parse(c2, 3),
            riemoc::Expr::parse(c3, 3))};
    });
}

void riemoc_pipe_flow_destroy(riemoc_pipe_flow* f) { delete f; }

int riemoc_pipe_chart(const riemoc_pipe_flow* f) {
    if (!f) return -1;
    return f->flow.chart() == riemoc::PipeChart::Cylindrical ? RIEMOC_CHART_CYLINDRICAL
                                                             : RIEMOC_CHART_CARTESIAN;
}

riemoc_status riemoc_pipe_transform(const riemoc_pipe_flow* f, int to_chart,
                                    riemoc_pipe_flow** out) {
    if (!f || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::PipeChart pc = to_chart == RIEMOC_CHART_CYLINDRICAL
                                   ? riemoc::PipeChart::Cylindrical
                                   : riemoc::PipeChart::Cartesian;
        *out = new riemoc_pipe_flow{riemoc::field_transform(f->flow, pc)};
    });
}

riemoc_status riemoc_pipe_eval(const riemoc_pipe_flow* f, const double p[3],
                               double out[3]) {
    if (!f || !p || !out) return fail_arg("null argument");
    return guarded([&] {
        auto v = f->flow.eval({p[0], p[1], p[2]});
        out[0] = v[0];
        out[1] = v[1];
        out[2] = v[2];
    });
}

riemoc_status riemoc_pipe_wall_sign(const riemoc_pipe_flow* f, double theta, double z,
                                    double* out) {
    if (!f || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::PipeMetric metric(f->flow, 1.0);
        *out = metric.wall_sign(theta, z);
    });
}

riemoc_status riemoc_pipe_metric(const riemoc_pipe_flow* f, double K, int chart,
                                 const double p[3], double out[6]) {
    if (!f || !p || !out) return fail_arg("null argument");
    return guarded([&] {
        riemoc::PipeMetric metric(f->flow, K);
        riemoc::PipeChart pc = chart == RIEMOC_CHART_CYLINDRICAL
                                   ? riemoc::PipeChart::Cylindrical
                                   : riemoc::PipeChart::Cartesian;
        auto comps = metric.components(pc, {p[0], p[1], p[2]});
        for (int i = 0; i < 6; ++i) out[i] = comps[static_cast<std::size_t>(i)];
    });
}

riemoc_status riemoc_pipe_mesh_write(const riemoc_pipe_flow* f, double amplitude,
                                     int n_theta, int n_z, const char* obj_path,
                                     const char* sign_csv_path) {
    if (!f) return fail_arg("null argument");
    return guarded([&] {
        riemoc::PipeMesh mesh = riemoc::pipe_mesh(f->flow, amplitude, n_theta, n_z);
        if (obj_path) riemoc::write_obj(mesh, obj_path);
        if (sign_csv_path) riemoc::write_sign_csv(mesh, sign_csv_path);
    });
}

} // extern "C"
