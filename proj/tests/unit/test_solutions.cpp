#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "core/geometry.hpp"
#include "core/rng.hpp"
#include "core/solutions.hpp"

using namespace riemoc;

namespace {

GridPtr cube_grid(int n, int m) {
    std::vector<double> x0(static_cast<std::size_t>(n), 0.0);
    std::vector<double> x1(static_cast<std::size_t>(n), 1.0);
    return make_grid(Domain::create(x0, x1), GridSpec{std::vector<int>(
                                                 static_cast<std::size_t>(n), m)});
}

} // namespace

TEST_CASE("conformal pair components for eps = (1,1)") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{1, 1};
    ConformalPair pair = conformal_pair(g, eps, 1.0);
    const TensorField& G = pair.gamma;
    CHECK(G.at(0, G.comp3(0, 0, 0)) == 1.0);  // G^1_11
    CHECK(G.at(0, G.comp3(0, 0, 1)) == 1.0);  // G^1_12
    CHECK(G.at(0, G.comp3(0, 1, 1)) == -1.0); // G^1_22
    CHECK(G.at(0, G.comp3(1, 0, 0)) == -1.0); // G^2_11
    CHECK(G.at(0, G.comp3(1, 0, 1)) == 1.0);  // G^2_12
    CHECK(G.at(0, G.comp3(1, 1, 1)) == 1.0);  // G^2_22

    std::array<double, 2> x{0.5, 0.5};
    CHECK(pair.g_inv.eval(x, pair.g_inv.comp2(0, 0)) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(pair.g_inv.eval(x, pair.g_inv.comp2(0, 1)) == 0.0);
}

TEST_CASE("zero sign vector gives the constant pair") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{0, 0};
    ConformalPair pair = conformal_pair(g, eps, 2.5);
    CHECK(pair.gamma.max_abs() == 0.0);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        CHECK(pair.g_inv.at(p, 0) == 2.5);
        CHECK(pair.g_inv.at(p, 1) == 0.0);
    }
}

TEST_CASE("conformal solitons solve the dual system for every sign pattern") {
    for (int n = 1; n <= 3; ++n) {
        auto g = cube_grid(n, 9);
        std::vector<int> eps(static_cast<std::size_t>(n), -1);
        // walk all 3^n sign vectors
        while (true) {
            for (double K : {0.5, 1.0, 2.0}) {
                ConformalPair pair = conformal_pair(g, eps, K);
                CHECK(verify_closed_form(pair.g_inv, pair.gamma) < 1e-12);
            }
            int k = 0;
            for (; k < n; ++k) {
                if (++eps[static_cast<std::size_t>(k)] <= 1) break;
                eps[static_cast<std::size_t>(k)] = -1;
            }
            if (k == n) break;
        }
    }
}

TEST_CASE("conformal soliton is the dual structure of its connection") {
    auto g = cube_grid(2, 17);
    std::array<int, 2> eps{1, -1};
    ConformalPair pair = conformal_pair(g, eps, 2.0);
    TensorField primal = pointwise_inverse(pair.g_inv);
    TensorField chr = christoffel_from_metric(primal);
    double worst = 0.0;
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int c = 0; c < chr.ncomp(); ++c)
            worst = std::max(worst, std::fabs(chr.at(p, c) - pair.gamma.at(p, c)));
    CHECK(worst < 1e-8);
}

TEST_CASE("rank-one soliton golden values at the origin") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{1, 1};
    RankOnePair pair = rank_one_pair(g, eps, 1.0, std::array{1.0, -1.0});
    CHECK(pair.exact);
    CHECK(pair.semi_riemannian_candidate);
    // g^ at origin: [[2, 1], [1, 0]], det = -1 (indefinite)
    const TensorField& G = pair.g_upper;
    CHECK(G.at(0, G.comp2(0, 0)) == 2.0);
    CHECK(G.at(0, G.comp2(0, 1)) == 1.0);
    CHECK(G.at(0, G.comp2(1, 1)) == 0.0);
    double det = G.at(0, 0) * G.at(0, 3) - G.at(0, 1) * G.at(0, 2);
    CHECK(det == -1.0);

    CHECK(verify_closed_form(pair.g_upper, pair.gamma) < 1e-12);
    CHECK(verify_closed_form(pair.g_upper, pair.gamma, true) > 1.0);
}

TEST_CASE("rank-one soliton with vanishing alpha_i is a rank-one matrix") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{1, -1};
    RankOnePair pair = rank_one_pair(g, eps, 1.0, std::array{0.0, 0.0});
    std::array<double, 2> x{0.3, 0.7};
    double phi = x[0] - x[1];
    double expect = std::exp(-4.0 * phi);
    CHECK(pair.g_upper.eval(x, 0) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(pair.g_upper.eval(x, 1) == doctest::Approx(-expect).epsilon(1e-13));
    // det of c * eps eps^T is zero
    double det = pair.g_upper.eval(x, 0) * pair.g_upper.eval(x, 3) -
                 pair.g_upper.eval(x, 1) * pair.g_upper.eval(x, 2);
    CHECK(std::fabs(det) < 1e-12);
    CHECK(verify_closed_form(pair.g_upper, pair.gamma) < 1e-12);
}

TEST_CASE("rank-one constraints") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{1, 1};
    CHECK_THROWS_AS(rank_one_pair(g, eps, 1.0, std::array{1.0, -0.5}), Error);

    std::array<int, 2> eps0{0, 0};
    RankOnePair zero = rank_one_pair(g, eps0, 1.0, std::array{1.0, -1.0});
    CHECK_FALSE(zero.exact);
    CHECK(zero.gamma.max_abs() == 0.0);
    CHECK(zero.g_upper.max_abs() == 0.0);
}

TEST_CASE("rank-one determinant is non-positive somewhere for generic data") {
    auto g = cube_grid(2, 9);
    SplitMix64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        double a = rng.uniform_symmetric();
        std::array<double, 2> ai{a, -a};
        std::array<int, 2> eps{1, 1};
        RankOnePair pair = rank_one_pair(g, eps, 0.5 + rng.uniform(), ai);
        bool found = false;
        for (std::size_t p = 0; p < g->point_count() && !found; ++p) {
            double det = pair.g_upper.at(p, 0) * pair.g_upper.at(p, 3) -
                         pair.g_upper.at(p, 1) * pair.g_upper.at(p, 2);
            if (det <= 1e-12) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("mismatched pair leaves the advertised residual") {
    auto g = cube_grid(2, 9);
    std::array<int, 2> eps{1, 1};
    ConformalPair pair = conformal_pair(g, eps, 1.0);
    double residual = verify_closed_form(pair.g_inv, TensorField::zeros(g, FieldKind::Connection));
    CHECK(residual == doctest::Approx(2.0).epsilon(1e-12)); // max |2 eps_k g^ij| at origin
}

TEST_CASE("field transforms of the stated flows") {
    Expr zero3 = Expr::parse("0", 3);
    PipeFlow radial = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("x1", 3),
                                           Expr::parse("x2", 3), zero3);
    PipeFlow cyl = field_transform(radial, PipeChart::Cylindrical);
    auto v = cyl.eval({0.7, 1.3, 0.4});
    CHECK(v[0] == doctest::Approx(0.7).epsilon(1e-14)); // R = rho
    CHECK(std::fabs(v[1]) < 1e-14);                     // T = 0
    CHECK(v[2] == 0.0);

    PipeFlow axial = PipeFlow::from_exprs(PipeChart::Cartesian, zero3, zero3,
                                          Expr::parse("1", 3));
    auto a = field_transform(axial, PipeChart::Cylindrical).eval({0.5, 2.0, 0.1});
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 1.0);
}

TEST_CASE("chart round trip is the identity away from the axis") {
    PipeFlow f = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("1", 3),
                                      Expr::parse("2", 3), Expr::parse("3", 3));
    PipeFlow rt = field_transform(field_transform(f, PipeChart::Cylindrical),
                                  PipeChart::Cartesian);
    auto v = rt.eval({0.3, 0.4, 0.5});
    CHECK(std::fabs(v[0] - 1.0) < 1e-12);
    CHECK(std::fabs(v[1] - 2.0) < 1e-12);
    CHECK(std::fabs(v[2] - 3.0) < 1e-12);

    // negative x quadrant exercises the angle wrap
    auto w = rt.eval({-0.5, -0.2, 0.9});
    CHECK(std::fabs(w[0] - 1.0) < 1e-12);
    CHECK(std::fabs(w[1] - 2.0) < 1e-12);

    CHECK_THROWS_AS(rt.eval({0.0, 0.0, 0.5}), Error);
}

TEST_CASE("pipe wall sign and optimal metric") {
    Expr zero3 = Expr::parse("0", 3);
    PipeFlow radial = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("x1", 3),
                                           Expr::parse("x2", 3), zero3);
    PipeMetric outward(radial, 1.0);
    for (double theta : {0.1, 2.0, 4.0, 6.0})
        CHECK(outward.wall_sign(theta, 0.5) == 1.0);
    auto comps = outward.components(PipeChart::Cylindrical, {0.5, 1.0, 0.5});
    CHECK(comps[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(comps[3] == comps[0]);
    CHECK(comps[5] == comps[0]);
    CHECK(comps[1] == 0.0);

    PipeFlow inward = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("-x1", 3),
                                           Expr::parse("-x2", 3), zero3);
    PipeMetric shrink(inward, 1.0);
    CHECK(shrink.wall_sign(1.0, 0.2) == -1.0);

    PipeFlow axial = PipeFlow::from_exprs(PipeChart::Cartesian, zero3, zero3,
                                          Expr::parse("1", 3));
    PipeMetric neutral(axial, 2.0);
    CHECK(neutral.wall_sign(3.0, 0.7) == 0.0);
    auto flat = neutral.components(PipeChart::Cartesian, {0.3, 0.4, 0.5});
    CHECK(flat[0] == 2.0);                               // K
    CHECK(flat[3] == doctest::Approx(2.0 * 0.25));       // K (x^2 + y^2)
    CHECK(flat[5] == 2.0);
}

TEST_CASE("pipe mesh geometry") {
    Expr zero3 = Expr::parse("0", 3);
    PipeFlow radial = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("x1", 3),
                                           Expr::parse("x2", 3), zero3);
    PipeMesh mesh = pipe_mesh(radial, 0.2, 16, 5);
    CHECK(mesh.vertices.size() == 16 * 5);
    CHECK(mesh.triangles.size() == 2 * 16 * 4);
    double r = std::exp(0.2);
    for (const auto& v : mesh.vertices)
        CHECK(std::hypot(v[0], v[1]) == doctest::Approx(r).epsilon(1e-13));

    PipeFlow inward = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("-x1", 3),
                                           Expr::parse("-x2", 3), zero3);
    PipeMesh shrunk = pipe_mesh(inward, 0.2, 16, 5);
    for (const auto& v : shrunk.vertices)
        CHECK(std::hypot(v[0], v[1]) == doctest::Approx(std::exp(-0.2)).epsilon(1e-13));

    CHECK_THROWS_AS(pipe_mesh(radial, 0.0, 16, 5), Error);
    CHECK_THROWS_AS(pipe_mesh(radial, 0.7, 16, 5), Error);
}

TEST_CASE("half-cosine flow splits the wall radius, monotone in S") {
    // R(1, theta, z) = cos(theta): F = x d/dx in Cartesian gives R = rho cos^2...
    // use a cylindrical flow directly
    PipeFlow f = PipeFlow::from_exprs(PipeChart::Cylindrical, Expr::parse("cos(x2)", 3),
                                      Expr::parse("0", 3), Expr::parse("0", 3));
    PipeMesh mesh = pipe_mesh(f, 0.2, 64, 3);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        double s = mesh.sign[v];
        double r = mesh.radius[v];
        CHECK(r == doctest::Approx(std::exp(0.2 * s)).epsilon(1e-14));
    }
    // both halves appear
    bool plus = false, minus = false;
    for (double s : mesh.sign) {
        plus = plus || s > 0.5;
        minus = minus || s < -0.5;
    }
    CHECK(plus);
    CHECK(minus);
}

TEST_CASE("wall mesh is watertight except the two open ends") {
    Expr zero3 = Expr::parse("0", 3);
    PipeFlow f = PipeFlow::from_exprs(PipeChart::Cylindrical, Expr::parse("cos(x2)", 3),
                                      zero3, zero3);
    PipeMesh mesh = pipe_mesh(f, 0.2, 12, 4);
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[static_cast<std::size_t>(e)];
            int b = t[static_cast<std::size_t>((e + 1) % 3)];
            edge_count[{std::min(a, b), std::max(a, b)}]++;
        }
    int boundary_edges = 0;
    for (const auto& [edge, count] : edge_count) {
        CHECK(count <= 2);
        CHECK(count >= 1);
        if (count == 1) ++boundary_edges;
    }
    // only the two end rings stay open
    CHECK(boundary_edges == 2 * mesh.n_theta);
}

TEST_CASE("obj and sign csv output shapes") {
    Expr zero3 = Expr::parse("0", 3);
    PipeFlow radial = PipeFlow::from_exprs(PipeChart::Cartesian, Expr::parse("x1", 3),
                                           Expr::parse("x2", 3), zero3);
    PipeMesh mesh = pipe_mesh(radial, 0.2, 8, 3);
    std::string obj = obj_string(mesh);
    CHECK(obj.rfind("v ", 0) == 0);
    CHECK(obj.find("\nf 1 ") != std::string::npos);
    std::string csv = sign_csv_string(mesh);
    CHECK(csv.rfind("theta,z,S,r\n", 0) == 0);
    // one row per vertex plus the header line
    std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == mesh.vertices.size() + 1);
}
