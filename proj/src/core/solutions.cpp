#include "solutions.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace riemoc {

namespace {

void check_sign_vector(std::span<const int> eps) {
    for (int e : eps)
        require(e == -1 || e == 0 || e == 1, ErrorCode::InvalidArgument,
                "sign vector entries must be -1, 0, or 1");
}

// phi = eps_l x^l as an expression
Expr phase_expr(std::span<const int> eps, int n) {
    Expr phi = Expr::constant(0.0);
    for (int l = 0; l < n; ++l)
        phi = Expr::add(phi, Expr::mul(Expr::constant(static_cast<double>(
                                           eps[static_cast<std::size_t>(l)])),
                                       Expr::variable(l + 1, n)));
    return phi;
}

TensorField conformal_connection(const GridPtr& grid, std::span<const int> eps) {
    int n = grid->dim();
    std::vector<Expr> exprs;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double v = 0.0;
                if (k == i) v += eps[static_cast<std::size_t>(j)];
                if (k == j) v += eps[static_cast<std::size_t>(i)];
                if (i == j) v -= eps[static_cast<std::size_t>(k)];
                exprs.push_back(Expr::constant(v));
            }
    return TensorField::sample(grid, FieldKind::Connection, exprs);
}

} // namespace

ConformalPair conformal_pair(const GridPtr& grid, std::span<const int> eps, double K) {
    int n = grid->dim();
    require(static_cast<int>(eps.size()) == n, ErrorCode::Dimension,
            "sign vector length must equal the dimension");
    check_sign_vector(eps);
    require(K > 0.0, ErrorCode::InvalidArgument, "conformal scale K must be positive");

    Expr profile = Expr::exp(Expr::mul(Expr::constant(-2.0), phase_expr(eps, n)));
    std::vector<Expr> gexprs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            gexprs.push_back(i == j ? Expr::mul(Expr::constant(K), profile)
                                    : Expr::constant(0.0));
    return {conformal_connection(grid, eps),
            TensorField::sample(grid, FieldKind::InverseMetric, gexprs)};
}

TensorField conformal_primal_metric(const GridPtr& grid, std::span<const int> eps,
                                    double K) {
    int n = grid->dim();
    require(static_cast<int>(eps.size()) == n, ErrorCode::Dimension,
            "sign vector length must equal the dimension");
    check_sign_vector(eps);
    require(K > 0.0, ErrorCode::InvalidArgument, "conformal scale K must be positive");

    Expr profile = Expr::exp(Expr::mul(Expr::constant(2.0), phase_expr(eps, n)));
    std::vector<Expr> gexprs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            gexprs.push_back(i == j ? Expr::mul(Expr::constant(1.0 / K), profile)
                                    : Expr::constant(0.0));
    return TensorField::sample(grid, FieldKind::Metric, gexprs);
}

RankOnePair rank_one_pair(const GridPtr& grid, std::span<const int> eps, double alpha,
                          std::span<const double> alpha_i) {
    int n = grid->dim();
    require(static_cast<int>(eps.size()) == n, ErrorCode::Dimension,
            "sign vector length must equal the dimension");
    check_sign_vector(eps);
    require(static_cast<int>(alpha_i.size()) == n, ErrorCode::Dimension,
            "alpha_i must have one entry per axis");
    double sum = 0.0;
    for (double a : alpha_i) sum += a;
    require(std::fabs(sum) <= 1e-14, ErrorCode::InvalidArgument,
            "alpha_i entries must sum to zero");

    std::vector<Expr> cexprs;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                cexprs.push_back(Expr::constant(
                    static_cast<double>(eps[static_cast<std::size_t>(k)] *
                                        eps[static_cast<std::size_t>(i)] *
                                        eps[static_cast<std::size_t>(j)])));
    TensorField gamma = TensorField::sample(grid, FieldKind::Connection, cexprs);

    Expr phi = phase_expr(eps, n);
    Expr fast = Expr::exp(Expr::mul(Expr::constant(-2.0 * n), phi));
    Expr slow = Expr::exp(Expr::mul(Expr::constant(-1.0 * n), phi));
    std::vector<Expr> gexprs;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double ee = static_cast<double>(eps[static_cast<std::size_t>(i)] *
                                            eps[static_cast<std::size_t>(j)]);
            double mix = 0.5 * (alpha_i[static_cast<std::size_t>(i)] +
                                alpha_i[static_cast<std::size_t>(j)]);
            Expr entry = Expr::add(Expr::mul(Expr::constant(alpha), fast),
                                   Expr::mul(Expr::constant(mix), slow));
            gexprs.push_back(Expr::mul(Expr::constant(ee), entry));
        }
    TensorField g_upper = TensorField::sample(grid, FieldKind::InverseMetric, gexprs);

    bool exact = true;
    for (int e : eps)
        if (e == 0) exact = false;
    return {std::move(gamma), std::move(g_upper), exact, true};
}

double verify_closed_form(const TensorField& g_upper, const TensorField& gamma,
                          bool plus_sign_intermediate) {
    require(g_upper.kind() == FieldKind::InverseMetric, ErrorCode::InvalidArgument,
            "closed-form verification expects an upper-index metric");
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "closed-form verification expects a connection");
    require(g_upper.grid() == gamma.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    require(g_upper.expression_backed(), ErrorCode::InvalidArgument,
            "closed-form verification requires expression backing");
    const GridPtr& grid = g_upper.grid();
    int n = g_upper.dim();
    double sign = plus_sign_intermediate ? -1.0 : 1.0;

    std::vector<TensorField> dg;
    for (int a = 1; a <= n; ++a) dg.push_back(fd_partial(g_upper, a));

    double worst = 0.0;
    for (std::size_t p = 0; p < grid->point_count(); ++p)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    double bracket = 0.0;
                    for (int s = 0; s < n; ++s)
                        bracket += g_upper.at(p, g_upper.comp2(i, s)) *
                                       gamma.at(p, gamma.comp3(j, s, k)) +
                                   g_upper.at(p, g_upper.comp2(j, s)) *
                                       gamma.at(p, gamma.comp3(i, s, k));
                    double r = dg[static_cast<std::size_t>(k)].at(p, g_upper.comp2(i, j)) +
                               sign * bracket;
                    worst = std::max(worst, std::fabs(r));
                }
    return worst;
}

// ---------------------------------------------------------------------------
// Pipe geometry

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
    double a = std::fmod(t, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

} // namespace

PipeFlow PipeFlow::from_exprs(PipeChart chart, const Expr& c1, const Expr& c2,
                              const Expr& c3) {
    for (const Expr* e : {&c1, &c2, &c3})
        require(e->valid() && e->dim() <= 3, ErrorCode::Dimension,
                "pipe flow components live on a 3-dimensional chart");
    PipeFlow f;
    f.chart_ = chart;
    f.comps_ = {[c1](const std::array<double, 3>& p) { return c1.eval(p); },
                [c2](const std::array<double, 3>& p) { return c2.eval(p); },
                [c3](const std::array<double, 3>& p) { return c3.eval(p); }};
    return f;
}

std::array<double, 3> PipeFlow::eval(const std::array<double, 3>& p) const {
    return {comps_[0](p), comps_[1](p), comps_[2](p)};
}

PipeFlow field_transform(const PipeFlow& flow, PipeChart to) {
    require(flow.chart_ != to, ErrorCode::InvalidArgument,
            "flow is already expressed in the requested chart");
    PipeFlow out;
    out.chart_ = to;
    auto comps = flow.comps_;

    if (to == PipeChart::Cylindrical) {
        // p = (rho, theta, z)
        auto cart_at = [comps](const std::array<double, 3>& p) {
            std::array<double, 3> q{p[0] * std::cos(p[1]), p[0] * std::sin(p[1]), p[2]};
            return std::array<double, 3>{comps[0](q), comps[1](q), comps[2](q)};
        };
        out.comps_ = {
            [cart_at](const std::array<double, 3>& p) {
                auto f = cart_at(p);
                return f[0] * std::cos(p[1]) + f[1] * std::sin(p[1]);
            },
            [cart_at](const std::array<double, 3>& p) {
                require(p[0] != 0.0, ErrorCode::Eval,
                        "angular component undefined on the axis rho = 0");
                auto f = cart_at(p);
                return (-f[0] * std::sin(p[1]) + f[1] * std::cos(p[1])) / p[0];
            },
            [cart_at](const std::array<double, 3>& p) { return cart_at(p)[2]; },
        };
        return out;
    }

    // p = (x, y, z)
    auto cyl_at = [comps](const std::array<double, 3>& p) {
        double rho = std::hypot(p[0], p[1]);
        require(rho > 0.0, ErrorCode::Eval,
                "Cartesian components undefined on the axis rho = 0");
        std::array<double, 3> q{rho, wrap_angle(std::atan2(p[1], p[0])), p[2]};
        return std::pair<std::array<double, 3>, double>{
            {comps[0](q), comps[1](q), comps[2](q)}, rho};
    };
    out.comps_ = {
        [cyl_at](const std::array<double, 3>& p) {
            auto [f, rho] = cyl_at(p);
            return f[0] * p[0] / rho - f[1] * p[1];
        },
        [cyl_at](const std::array<double, 3>& p) {
            auto [f, rho] = cyl_at(p);
            return f[0] * p[1] / rho + f[1] * p[0];
        },
        [cyl_at](const std::array<double, 3>& p) { return cyl_at(p).first[2]; },
    };
    return out;
}

PipeMetric::PipeMetric(const PipeFlow& flow, double K)
    : cylindrical_(flow.chart() == PipeChart::Cylindrical
                       ? flow
                       : field_transform(flow, PipeChart::Cylindrical)),
      K_(K) {
    require(K > 0.0, ErrorCode::InvalidArgument, "conformal scale K must be positive");
}

double PipeMetric::wall_sign(double theta, double z) const {
    double r = cylindrical_.eval({1.0, wrap_angle(theta), z})[0];
    if (r > 0.0) return 1.0;
    if (r < 0.0) return -1.0;
    return 0.0;
}

std::array<double, 6> PipeMetric::components(PipeChart chart,
                                             const std::array<double, 3>& p) const {
    if (chart == PipeChart::Cylindrical) {
        double factor = K_ * std::exp(2.0 * wall_sign(p[1], p[2]) * p[0]);
        return {factor, 0.0, 0.0, factor, 0.0, factor};
    }
    double rho = std::hypot(p[0], p[1]);
    double theta = (rho == 0.0) ? 0.0 : wrap_angle(std::atan2(p[1], p[0]));
    double factor = K_ * std::exp(2.0 * wall_sign(theta, p[2]) * rho);
    return {factor, 0.0, 0.0, factor * (p[0] * p[0] + p[1] * p[1]), 0.0, factor};
}

PipeMesh pipe_mesh(const PipeFlow& flow, double amplitude, int n_theta, int n_z) {
    require(amplitude > 0.0 && amplitude <= 0.5, ErrorCode::InvalidArgument,
            "wall amplitude must lie in (0, 0.5]");
    require(n_theta >= 3 && n_z >= 2, ErrorCode::InvalidArgument,
            "mesh resolution must be at least 3 x 2");
    PipeMetric metric(flow, 1.0);

    PipeMesh mesh;
    mesh.n_theta = n_theta;
    mesh.n_z = n_z;
    mesh.vertices.reserve(static_cast<std::size_t>(n_theta * n_z));
    for (int i = 0; i < n_theta; ++i) {
        double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n_theta);
        for (int j = 0; j < n_z; ++j) {
            double z = static_cast<double>(j) / static_cast<double>(n_z - 1);
            double s = metric.wall_sign(theta, z);
            double r = std::exp(amplitude * s);
            mesh.sign.push_back(s);
            mesh.radius.push_back(r);
            mesh.vertices.push_back({r * std::cos(theta), r * std::sin(theta), z});
        }
    }
    for (int i = 0; i < n_theta; ++i) {
        int inext = (i + 1) % n_theta; // close the seam
        for (int j = 0; j + 1 < n_z; ++j) {
            int a = i * n_z + j;
            int b = inext * n_z + j;
            int c = i * n_z + j + 1;
            int d = inext * n_z + j + 1;
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({a, d, c});
        }
    }
    return mesh;
}

namespace {

void format17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string obj_string(const PipeMesh& mesh) {
    std::string out;
    for (const auto& v : mesh.vertices) {
        out += "v";
        for (double c : v) {
            out += ' ';
            format17(out, c);
        }
        out += '\n';
    }
    for (const auto& t : mesh.triangles) {
        out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
               std::to_string(t[2] + 1) + "\n";
    }
    return out;
}

void write_obj(const PipeMesh& mesh, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << obj_string(mesh);
    require(f.good(), ErrorCode::Io, "write failed for '" + path + "'");
}

std::string sign_csv_string(const PipeMesh& mesh) {
    std::string out = "theta,z,S,r\n";
    for (int i = 0; i < mesh.n_theta; ++i) {
        double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(mesh.n_theta);
        for (int j = 0; j < mesh.n_z; ++j) {
            double z = static_cast<double>(j) / static_cast<double>(mesh.n_z - 1);
            std::size_t v = static_cast<std::size_t>(i * mesh.n_z + j);
            format17(out, theta);
            out += ',';
            format17(out, z);
            out += ',';
            format17(out, mesh.sign[v]);
            out += ',';
            format17(out, mesh.radius[v]);
            out += '\n';
        }
    }
    return out;
}

void write_sign_csv(const PipeMesh& mesh, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << sign_csv_string(mesh);
    require(f.good(), ErrorCode::Io, "write failed for '" + path + "'");
}

} // namespace riemoc
