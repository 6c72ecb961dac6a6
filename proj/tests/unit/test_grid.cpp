#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/grid.hpp"

using namespace riemoc;

namespace {

GridPtr unit_square(int m) {
    return make_grid(Domain::create(std::array{0.0, 0.0}, std::array{1.0, 1.0}),
                     GridSpec{{m, m}});
}

Expr E(const char* s, int n = 2) { return Expr::parse(s, n); }

} // namespace

TEST_CASE("make_grid computes spacings and validates counts") {
    auto g = unit_square(33);
    CHECK(g->spacing()[0] == doctest::Approx(1.0 / 32));
    CHECK(g->spacing()[1] == doctest::Approx(1.0 / 32));
    CHECK(g->point_count() == 33 * 33);

    CHECK_THROWS_WITH_AS(make_grid(Domain::create(std::array{0.0, 0.0},
                                                  std::array{1.0, 1.0}),
                                   GridSpec{{4, 33}}),
                         "axis 1: sample count must be odd", Error);
    CHECK_THROWS_AS(make_grid(Domain::create(std::array{0.0, 0.0}, std::array{1.0, 1.0}),
                              GridSpec{{33, 1}}),
                    Error);
    // degenerate domain
    CHECK_THROWS_AS(Domain::create(std::array{0.0, 1.0}, std::array{1.0, 1.0}), Error);
}

TEST_CASE("1-d grid samples the stated points") {
    auto g = make_grid(Domain::create(std::array{0.0}, std::array{2.0}), GridSpec{{5}});
    std::vector<double> expected{0.0, 0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i < 5; ++i) {
        std::array<int, 1> idx{i};
        CHECK(g->point(idx)[0] == expected[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("index_to_point hits the corners and interior points") {
    auto g = unit_square(33);
    std::array<int, 2> idx{0, 0};
    CHECK(g->point(idx) == std::vector<double>{0.0, 0.0});
    idx = {32, 32};
    CHECK(g->point(idx) == std::vector<double>{1.0, 1.0});
    idx = {16, 8};
    CHECK(g->point(idx) == std::vector<double>{0.5, 0.25});
    idx = {33, 0};
    CHECK_THROWS_AS(g->point(idx), Error);
}

TEST_CASE("index round trip via nearest lattice point is the identity") {
    auto g = make_grid(Domain::create(std::array{-1.0, 2.0}, std::array{1.0, 3.0}),
                       GridSpec{{9, 5}});
    std::array<int, 2> idx{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->unflatten(p, idx);
        auto x = g->point(idx);
        std::array<int, 2> back{};
        for (int k = 0; k < 2; ++k)
            back[static_cast<std::size_t>(k)] = static_cast<int>(std::lround(
                (x[static_cast<std::size_t>(k)] - g->domain().x0[static_cast<std::size_t>(k)]) /
                g->spacing()[static_cast<std::size_t>(k)]));
        CHECK(back == idx);
        CHECK(g->flatten(back) == p);
    }
}

TEST_CASE("sample_field evaluates expressions and reports failures precisely") {
    auto g = unit_square(33);
    auto f = TensorField::sample(g, FieldKind::Scalar, std::array{E("x1+x2")});
    std::array<int, 2> idx{16, 16};
    CHECK(f.at(g->flatten(idx), 0) == 1.0);

    auto v = TensorField::sample(g, FieldKind::Vector, std::array{E("x1"), E("x2")});
    idx = {8, 24};
    CHECK(v.at(g->flatten(idx), 0) == 0.25);
    CHECK(v.at(g->flatten(idx), 1) == 0.75);

    try {
        TensorField::sample(g, FieldKind::Scalar, std::array{E("1/(x1-0.5)")});
        FAIL("expected an evaluation error");
    } catch (const EvalError& e) {
        std::string msg = e.what();
        CHECK(msg.find("0.5") != std::string::npos); // names the point
        CHECK(msg.find("f") != std::string::npos);   // names the component
    }
}

TEST_CASE("fd_partial differentiates symbolically when backed") {
    auto g = unit_square(17);
    auto f = TensorField::sample(g, FieldKind::Scalar, std::array{E("x1^2")});
    auto d = fd_partial(f, 1);
    CHECK(d.expression_backed());
    std::array<int, 2> idx{12, 3};
    auto x = g->point(idx);
    CHECK(d.at(g->flatten(idx), 0) == 2.0 * x[0]);

    auto c = TensorField::sample(g, FieldKind::Scalar, std::array{E("3.5")});
    CHECK(fd_partial(c, 2).max_abs() == 0.0);
}

TEST_CASE("grid-only finite differences are 2nd order") {
    auto err_at = [](int m) {
        auto g = make_grid(Domain::create(std::array{0.0}, std::array{1.0}),
                           GridSpec{{m}});
        // strip the backing by rebuilding from raw values
        auto f = TensorField::sample(g, FieldKind::Scalar,
                                     std::array{Expr::parse("sin(x1)", 1)});
        std::vector<double> vals;
        for (std::size_t p = 0; p < g->point_count(); ++p) vals.push_back(f.at(p, 0));
        auto raw = TensorField::from_dense_values(g, FieldKind::Scalar, std::move(vals));
        auto d = fd_partial(raw, 1);
        double worst = 0.0;
        std::array<int, 1> idx{};
        for (std::size_t p = 0; p < g->point_count(); ++p) {
            g->unflatten(p, idx);
            double x = g->point(idx)[0];
            worst = std::max(worst, std::fabs(d.at(p, 0) - std::cos(x)));
        }
        return worst;
    };
    double e33 = err_at(33), e65 = err_at(65);
    CHECK(e33 < 4e-3);
    CHECK(e33 / e65 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("interior quadrature is exact on low-degree polynomials") {
    auto g = unit_square(33);
    CHECK(integrate_interior(TensorField::sample(g, FieldKind::Scalar,
                                                 std::array{E("1")})) ==
          doctest::Approx(1.0).epsilon(1e-13));
    double xy = integrate_interior(
        TensorField::sample(g, FieldKind::Scalar, std::array{E("x1*x2")}));
    CHECK(xy == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("interior quadrature reaches 1e-5 relative on the exponential") {
    auto g = unit_square(33);
    double I = integrate_interior(
        TensorField::sample(g, FieldKind::Scalar, std::array{E("exp(2*(x1+x2))")}));
    double exact = std::pow((std::exp(2.0) - 1.0) / 2.0, 2);
    CHECK(std::fabs(I - exact) / exact < 1e-5);
}

TEST_CASE("quadrature is linear to machine precision") {
    auto g = unit_square(17);
    auto f = TensorField::sample(g, FieldKind::Scalar, std::array{E("exp(x1)*sin(x2+0.3)")});
    auto h = TensorField::sample(g, FieldKind::Scalar, std::array{E("cos(3*x1) - x2^2")});
    double a = 2.25, b = -1.5;
    auto combo = TensorField::build(g, FieldKind::Scalar,
                                    [&](std::size_t p, std::span<const double>,
                                        std::span<double> out) {
                                        out[0] = a * f.at(p, 0) + b * h.at(p, 0);
                                    });
    double lhs = integrate_interior(combo);
    double rhs = a * integrate_interior(f) + b * integrate_interior(h);
    CHECK(std::fabs(lhs - rhs) <= 1e-14 * (std::fabs(lhs) + 1.0));
}

TEST_CASE("Simpson error drops 4th order under refinement") {
    auto I = [](int m) {
        auto g = make_grid(Domain::create(std::array{0.0}, std::array{1.0}),
                           GridSpec{{m}});
        return integrate_interior(TensorField::sample(
            g, FieldKind::Scalar, std::array{Expr::parse("exp(2*x1)", 1)}));
    };
    double exact = (std::exp(2.0) - 1.0) / 2.0;
    double ratio = std::fabs(I(17) - exact) / std::fabs(I(33) - exact);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("boundary quadrature: divergence theorem and perimeter") {
    auto g = unit_square(17);
    // X = (x1, x2): integral of X.n over the boundary of the unit square is 2
    auto fields = TensorField::sample(g, FieldKind::Vector, std::array{E("x1"), E("x2")});
    double flux = integrate_boundary(
        *g, [&](std::span<const int> idx, std::span<const double>, int axis, int side) {
            return side * fields.at(g->flatten(idx), fields.comp1(axis - 1));
        });
    CHECK(std::fabs(flux - 2.0) < 1e-12);

    double perimeter = integrate_boundary(
        *g, [](std::span<const int>, std::span<const double>, int, int) { return 1.0; });
    CHECK(perimeter == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("boundary quadrature with a metric weight") {
    auto g = unit_square(33);
    // X = (1,0), g_ij = delta e^{2(x1+x2)}: integrand X^i n_i sqrt(g)
    auto sqrtg = TensorField::sample(g, FieldKind::Scalar, std::array{E("exp(2*(x1+x2))")});
    double v = integrate_boundary(
        *g, [&](std::span<const int> idx, std::span<const double>, int axis, int side) {
            if (axis != 1) return 0.0;
            return side * sqrtg.at(g->flatten(idx), 0);
        });
    double exact = (std::exp(2.0) - 1.0) * (std::exp(2.0) - 1.0) / 2.0;
    CHECK(std::fabs(v - exact) / exact < 1e-4);
}

TEST_CASE("n = 1 boundary reduces to endpoint evaluation with measure 1") {
    auto g = make_grid(Domain::create(std::array{0.0}, std::array{2.0}), GridSpec{{5}});
    double v = integrate_boundary(
        *g, [](std::span<const int>, std::span<const double> x, int, int side) {
            return side * x[0] * x[0];
        });
    CHECK(v == 4.0); // (+1)(4) + (-1)(0)
}

TEST_CASE("asymmetric data is rejected, not symmetrized") {
    auto g = make_grid(Domain::create(std::array{0.0, 0.0}, std::array{1.0, 1.0}),
                       GridSpec{{3, 3}});
    std::vector<double> vals(g->point_count() * 4, 0.0);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        vals[p * 4 + 0] = 1.0;
        vals[p * 4 + 1] = 0.5;
        vals[p * 4 + 2] = 0.5;
        vals[p * 4 + 3] = 2.0;
    }
    CHECK_NOTHROW(TensorField::from_dense_values(g, FieldKind::Metric, vals));
    vals[1] = 0.25; // g12 != g21 at the first point
    CHECK_THROWS_AS(TensorField::from_dense_values(g, FieldKind::Metric, vals), Error);

    std::vector<double> conn(g->point_count() * 8, 0.0);
    conn[g->point_count() * 8 - 2] = 1.0; // Gamma^2_21 without Gamma^2_12
    CHECK_THROWS_AS(TensorField::from_dense_values(g, FieldKind::Connection, conn), Error);
}

TEST_CASE("riemannian flag check requires positive leading minors") {
    auto g = make_grid(Domain::create(std::array{0.0, 0.0}, std::array{1.0, 1.0}),
                       GridSpec{{3, 3}});
    auto ok = TensorField::sample(g, FieldKind::Metric,
                                  std::array{E("2"), E("0.5"), E("1")});
    CHECK_NOTHROW(check_riemannian(ok));
    auto bad = TensorField::sample(g, FieldKind::Metric,
                                   std::array{E("1"), E("2"), E("1")});
    CHECK_THROWS_AS(check_riemannian(bad), Error);
}

TEST_CASE("CSV output format") {
    auto g = make_grid(Domain::create(std::array{0.0, 0.0}, std::array{1.0, 1.0}),
                       GridSpec{{3, 3}});
    auto m = TensorField::sample(g, FieldKind::Metric,
                                 std::array{E("1"), E("0.125"), E("2")});
    std::string csv = csv_string(m);
    CHECK(csv.rfind("i1,i2,x1,x2,g11,g12,g22\n", 0) == 0);
    CHECK(csv.find("\n0,0,0,0,1,0.125,2\n") != std::string::npos);
    CHECK(csv.find("\n0,1,0,0.5,1,0.125,2\n") != std::string::npos); // axis 2 fastest

    // 17 significant digits survive the round trip
    auto f = TensorField::sample(g, FieldKind::Scalar, std::array{E("1/3")});
    CHECK(csv_string(f).find("0.33333333333333331") != std::string::npos);

    auto c = TensorField::zeros(g, FieldKind::Connection);
    CHECK(csv_string(c).rfind(
              "i1,i2,x1,x2,Gamma1_11,Gamma1_12,Gamma1_22,Gamma2_11,Gamma2_12,Gamma2_22\n",
              0) == 0);
}

TEST_CASE("inverse pair residual measures the defect") {
    auto g = unit_square(9);
    auto m = TensorField::sample(g, FieldKind::Metric, std::array{E("2"), E("0"), E("4")});
    auto inv = TensorField::sample(g, FieldKind::InverseMetric,
                                   std::array{E("0.5"), E("0"), E("0.25")});
    CHECK(inverse_pair_residual(m, inv) < 1e-10);
    auto off = TensorField::sample(g, FieldKind::InverseMetric,
                                   std::array{E("0.5"), E("0"), E("0.5")});
    CHECK(inverse_pair_residual(m, off) == doctest::Approx(1.0));
}
