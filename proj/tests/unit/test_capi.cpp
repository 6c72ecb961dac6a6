#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "riemoc/riemoc.h"

TEST_CASE("version and error state") {
    CHECK(std::string(riemoc_version()) == "1.0.0");
    CHECK(std::string(riemoc_last_error()).empty());
}

TEST_CASE("expression lifecycle through the C surface") {
    riemoc_expr* e = nullptr;
    REQUIRE(riemoc_expr_parse("x1^2 + 2*x2", 2, &e) == RIEMOC_OK);
    double x[2] = {3.0, 4.0};
    double v = 0.0;
    CHECK(riemoc_expr_eval(e, x, 2, &v) == RIEMOC_OK);
    CHECK(v == 17.0);

    riemoc_expr* d = nullptr;
    REQUIRE(riemoc_expr_diff(e, 1, &d) == RIEMOC_OK);
    char* s = nullptr;
    REQUIRE(riemoc_expr_to_string(d, &s) == RIEMOC_OK);
    CHECK(std::string(s) == "2*x1");
    riemoc_string_free(s);
    riemoc_expr_destroy(d);
    riemoc_expr_destroy(e);
}

TEST_CASE("parse errors surface with 1-based offsets") {
    riemoc_expr* e = nullptr;
    CHECK(riemoc_expr_parse("sin(x1", 2, &e) == RIEMOC_ERR_PARSE);
    CHECK(riemoc_last_error_offset() == 7);
    CHECK(std::string(riemoc_last_error()).find("expected ')'") != std::string::npos);
}

TEST_CASE("grid creation validates and reports the axis") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int bad_m[2] = {4, 33};
    riemoc_grid* g = nullptr;
    CHECK(riemoc_grid_create(2, x0, x1, bad_m, &g) == RIEMOC_ERR_INVALID_ARGUMENT);
    CHECK(std::string(riemoc_last_error()) == "axis 1: sample count must be odd");

    int m[2] = {17, 17};
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);
    CHECK(riemoc_grid_dim(g) == 2);
    CHECK(riemoc_grid_point_count(g) == 289);
    double h[2];
    CHECK(riemoc_grid_spacing(g, h) == RIEMOC_OK);
    CHECK(h[0] == 0.0625);
    int idx[2] = {8, 4};
    double pt[2];
    CHECK(riemoc_grid_point(g, idx, pt) == RIEMOC_OK);
    CHECK(pt[0] == 0.5);
    CHECK(pt[1] == 0.25);
    riemoc_grid_destroy(g);
}

TEST_CASE("field sampling, values, and CSV output") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {5, 5};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);

    const char* exprs[3] = {"1", "x1*x2", "2"};
    riemoc_field* f = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_METRIC, exprs, 3, &f) == RIEMOC_OK);
    CHECK(riemoc_field_component_count(f) == 4);
    int idx[2] = {2, 2};
    double v = 0.0;
    CHECK(riemoc_field_value(f, idx, 1, &v) == RIEMOC_OK); // g12 at (0.5, 0.5)
    CHECK(v == 0.25);
    double x[2] = {0.3, 0.5};
    CHECK(riemoc_field_eval(f, x, 2, &v) == RIEMOC_OK); // g21 off-grid
    CHECK(v == doctest::Approx(0.15).epsilon(1e-15));

    char* csv = nullptr;
    REQUIRE(riemoc_field_csv_string(f, &csv) == RIEMOC_OK);
    CHECK(std::string(csv).rfind("i1,i2,x1,x2,g11,g12,g22\n", 0) == 0);
    riemoc_string_free(csv);

    riemoc_field* df = nullptr;
    REQUIRE(riemoc_field_partial(f, 1, &df) == RIEMOC_OK);
    CHECK(riemoc_field_value(df, idx, 1, &v) == RIEMOC_OK);
    CHECK(v == 0.5); // d(x1 x2)/dx1 at x2 = 0.5
    riemoc_field_destroy(df);

    double interior = 0.0;
    const char* one[1] = {"1"};
    riemoc_field* scalar = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_SCALAR, one, 1, &scalar) == RIEMOC_OK);
    CHECK(riemoc_integrate_interior(scalar, &interior) == RIEMOC_OK);
    CHECK(interior == doctest::Approx(1.0).epsilon(1e-14));
    riemoc_field_destroy(scalar);

    riemoc_field_destroy(f);
    riemoc_grid_destroy(g);
}

TEST_CASE("asymmetric raw data is rejected through the C surface") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {3, 3};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);
    std::vector<double> vals(9 * 4, 0.0);
    for (std::size_t p = 0; p < 9; ++p) {
        vals[p * 4 + 0] = 1.0;
        vals[p * 4 + 3] = 1.0;
    }
    vals[1] = 0.5; // g12 != g21
    riemoc_field* f = nullptr;
    CHECK(riemoc_field_from_values(g, RIEMOC_FIELD_METRIC, vals.data(),
                                   static_cast<long long>(vals.size()),
                                   &f) == RIEMOC_ERR_INVALID_ARGUMENT);
    riemoc_grid_destroy(g);
}

TEST_CASE("evolution and solitons through the C surface") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {33, 33};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);
    int eps[2] = {1, 1};
    riemoc_field* gamma = nullptr;
    riemoc_field* ginv = nullptr;
    REQUIRE(riemoc_conformal_pair(g, eps, 1.0, &gamma, &ginv) == RIEMOC_OK);

    double residual = 0.0;
    CHECK(riemoc_closed_form_residual(ginv, gamma, 0, &residual) == RIEMOC_OK);
    CHECK(residual < 1e-12);

    double eta[4] = {1.0, 0.0, 0.0, 1.0};
    riemoc_field* state = nullptr;
    REQUIRE(riemoc_evolve(gamma, eta, RIEMOC_DUAL, &state) == RIEMOC_OK);
    int idx[2] = {16, 16};
    double v = 0.0;
    CHECK(riemoc_field_value(state, idx, 0, &v) == RIEMOC_OK);
    CHECK(v == doctest::Approx(std::exp(-2.0)).epsilon(1e-5));

    double disc = 0.0;
    CHECK(riemoc_path_independence(gamma, eta, RIEMOC_DUAL, &disc) == RIEMOC_OK);
    CHECK(disc < 1e-6);

    riemoc_field* primal = nullptr;
    REQUIRE(riemoc_conformal_primal_metric(g, eps, 1.0, &primal) == RIEMOC_OK);
    double cic = 0.0;
    CHECK(riemoc_cic_residual(primal, gamma, &cic) == RIEMOC_OK);
    CHECK(cic < 1e-8);

    riemoc_field_destroy(primal);
    riemoc_field_destroy(state);
    riemoc_field_destroy(ginv);
    riemoc_field_destroy(gamma);
    riemoc_grid_destroy(g);
}

TEST_CASE("boundary quadrature and control helpers through the C surface") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {17, 17};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);

    double perimeter = 0.0;
    auto one = [](const double*, int, int, void*) { return 1.0; };
    CHECK(riemoc_integrate_boundary(g, one, nullptr, &perimeter) == RIEMOC_OK);
    CHECK(perimeter == doctest::Approx(4.0).epsilon(1e-13));

    const char* id[3] = {"1", "0", "1"};
    riemoc_field* metric = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_METRIC, id, 3, &metric) == RIEMOC_OK);
    const char* xe[2] = {"x1", "x2"};
    riemoc_field* X = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, xe, 2, &X) == RIEMOC_OK);

    double interior = 0.0, boundary = 0.0;
    CHECK(riemoc_flux(RIEMOC_FLUX_DIVERGENCE, X, metric, &interior, &boundary) ==
          RIEMOC_OK);
    CHECK(interior == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(boundary == doctest::Approx(2.0).epsilon(1e-12));

    const char* ce[2] = {"1", "0"};
    riemoc_field* C = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, ce, 2, &C) == RIEMOC_OK);
    const char* x10[2] = {"1", "0"};
    riemoc_field* Xc = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, x10, 2, &Xc) == RIEMOC_OK);
    double res = 0.0;
    CHECK(riemoc_boundary_residual(RIEMOC_FLUX_DIVERGENCE, C, Xc, metric,
                                   RIEMOC_BOUNDARY_SIGN_PAPER, &res) == RIEMOC_OK);
    CHECK(res < 1e-13);

    double sol = 0.0;
    CHECK(riemoc_solenoidal_residual(C, &sol) == RIEMOC_OK);
    CHECK(sol == 0.0);

    riemoc_field* p = nullptr;
    REQUIRE(riemoc_costate_from_c(C, metric, &p) == RIEMOC_OK);
    riemoc_field* zero_gamma = nullptr;
    const char* z6[6] = {"0", "0", "0", "0", "0", "0"};
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_CONNECTION, z6, 6, &zero_gamma) ==
            RIEMOC_OK);
    double adj = 0.0;
    CHECK(riemoc_adjoint_residual(p, zero_gamma, &adj) == RIEMOC_OK);
    CHECK(adj < 1e-13);
    double box = 0.0;
    CHECK(riemoc_box_violation(zero_gamma, &box) == RIEMOC_OK);
    CHECK(box == 0.0);

    riemoc_field_destroy(zero_gamma);
    riemoc_field_destroy(p);
    riemoc_field_destroy(Xc);
    riemoc_field_destroy(C);
    riemoc_field_destroy(X);
    riemoc_field_destroy(metric);
    riemoc_grid_destroy(g);
}

TEST_CASE("bang-bang and brute force through the C surface") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {3, 3};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);
    const char* cexprs[2] = {"3", "-2"};
    riemoc_field* C = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, cexprs, 2, &C) == RIEMOC_OK);

    riemoc_field* gamma = nullptr;
    riemoc_field* epsf = nullptr;
    riemoc_field* mask = nullptr;
    REQUIRE(riemoc_bang_bang(C, RIEMOC_MAXIMIZE, &gamma, &epsf, &mask) == RIEMOC_OK);

    riemoc_field* H = nullptr;
    REQUIRE(riemoc_hamiltonian_trace_field(C, gamma, RIEMOC_DUAL, &H) == RIEMOC_OK);
    int idx[2] = {0, 0};
    double h = 0.0;
    CHECK(riemoc_field_value(H, idx, 0, &h) == RIEMOC_OK);
    CHECK(h == 10.0);

    double cv[2] = {3.0, -2.0};
    double value = 0.0;
    long long count = 0;
    CHECK(riemoc_brute_force_hmax(cv, 2, &value, &count) == RIEMOC_OK);
    CHECK(value == 10.0);
    CHECK(count == 9);

    riemoc_field_destroy(H);
    riemoc_field_destroy(mask);
    riemoc_field_destroy(epsf);
    riemoc_field_destroy(gamma);
    riemoc_field_destroy(C);
    riemoc_grid_destroy(g);
}

TEST_CASE("certificate report serializes to JSON") {
    double x0[2] = {0.0, 0.0}, x1[2] = {1.0, 1.0};
    int m[2] = {9, 9};
    riemoc_grid* g = nullptr;
    REQUIRE(riemoc_grid_create(2, x0, x1, m, &g) == RIEMOC_OK);
    int eps[2] = {1, 1};
    riemoc_field *gamma = nullptr, *ginv = nullptr, *primal = nullptr;
    REQUIRE(riemoc_conformal_pair(g, eps, 1.0, &gamma, &ginv) == RIEMOC_OK);
    REQUIRE(riemoc_conformal_primal_metric(g, eps, 1.0, &primal) == RIEMOC_OK);

    const char* cexprs[2] = {"-2", "-3"};
    riemoc_field* C = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, cexprs, 2, &C) == RIEMOC_OK);
    const char* xexprs[2] = {"-2*exp(-2*(x1+x2))", "-3*exp(-2*(x1+x2))"};
    riemoc_field* X = nullptr;
    REQUIRE(riemoc_field_sample(g, RIEMOC_FIELD_VECTOR, xexprs, 2, &X) == RIEMOC_OK);

    riemoc_report* rep = nullptr;
    REQUIRE(riemoc_certificate(primal, ginv, gamma, C, RIEMOC_FLUX_DIVERGENCE, X,
                               RIEMOC_DUAL, 100, 7, RIEMOC_BOUNDARY_SIGN_PAPER, nullptr,
                               nullptr, 0, &rep) == RIEMOC_OK);
    CHECK(riemoc_report_pass(rep) == 1);
    CHECK(riemoc_report_size(rep) == 5);

    const char* name = nullptr;
    double value = 0.0, tol = 0.0;
    int upper = 0, pass = 0;
    CHECK(riemoc_report_entry(rep, 2, &name, &value, &tol, &upper, &pass) == RIEMOC_OK);
    CHECK(std::string(name) == "hamiltonian_gap");
    CHECK(value <= 1e-12);
    CHECK(pass == 1);

    char* js = nullptr;
    REQUIRE(riemoc_report_to_json(rep, &js) == RIEMOC_OK);
    auto parsed = nlohmann::json::parse(js);
    CHECK(parsed["overall_pass"].get<bool>());
    CHECK(parsed["checks"].size() == 5);
    riemoc_string_free(js);

    riemoc_report_destroy(rep);
    riemoc_field_destroy(X);
    riemoc_field_destroy(C);
    riemoc_field_destroy(primal);
    riemoc_field_destroy(ginv);
    riemoc_field_destroy(gamma);
    riemoc_grid_destroy(g);
}

TEST_CASE("pipe flows through the C surface") {
    riemoc_pipe_flow* flow = nullptr;
    REQUIRE(riemoc_pipe_flow_create(RIEMOC_CHART_CARTESIAN, "x1", "x2", "0", &flow) ==
            RIEMOC_OK);
    CHECK(riemoc_pipe_chart(flow) == RIEMOC_CHART_CARTESIAN);

    double s = 0.0;
    CHECK(riemoc_pipe_wall_sign(flow, 1.0, 0.5, &s) == RIEMOC_OK);
    CHECK(s == 1.0);

    riemoc_pipe_flow* cyl = nullptr;
    REQUIRE(riemoc_pipe_transform(flow, RIEMOC_CHART_CYLINDRICAL, &cyl) == RIEMOC_OK);
    double p[3] = {0.5, 1.0, 0.2};
    double out[3];
    CHECK(riemoc_pipe_eval(cyl, p, out) == RIEMOC_OK);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::fabs(out[1]) < 1e-14);

    double comps[6];
    double q[3] = {0.5, 1.0, 0.5};
    CHECK(riemoc_pipe_metric(flow, 1.0, RIEMOC_CHART_CYLINDRICAL, q, comps) == RIEMOC_OK);
    CHECK(comps[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    riemoc_pipe_flow_destroy(cyl);
    riemoc_pipe_flow_destroy(flow);
}
