#include "geometry.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace riemoc {

namespace {

std::string point_string(const Grid& grid, std::size_t flat) {
    std::vector<double> x(static_cast<std::size_t>(grid.dim()));
    grid.point_of_flat(flat, x);
    std::string s = "(";
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k) s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", x[k]);
        s += buf;
    }
    return s + ")";
}

double det_n(const double* a, int n) {
    switch (n) {
    case 1: return a[0];
    case 2: return a[0] * a[3] - a[1] * a[2];
    case 3:
        return a[0] * (a[4] * a[8] - a[5] * a[7]) -
               a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    default: break;
    }
    // general small-matrix determinant via partial-pivot elimination
    std::vector<double> m(a, a + n * n);
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(m[static_cast<std::size_t>(r * n + c)]) >
                std::fabs(m[static_cast<std::size_t>(piv * n + c)]))
                piv = r;
        if (m[static_cast<std::size_t>(piv * n + c)] == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k)
                std::swap(m[static_cast<std::size_t>(c * n + k)],
                          m[static_cast<std::size_t>(piv * n + k)]);
            det = -det;
        }
        det *= m[static_cast<std::size_t>(c * n + c)];
        for (int r = c + 1; r < n; ++r) {
            double f = m[static_cast<std::size_t>(r * n + c)] /
                       m[static_cast<std::size_t>(c * n + c)];
            for (int k = c; k < n; ++k)
                m[static_cast<std::size_t>(r * n + k)] -=
                    f * m[static_cast<std::size_t>(c * n + k)];
        }
    }
    return det;
}

// inverse of a symmetric matrix via adjugate (n <= 3) or Gauss-Jordan
void invert_n(const double* a, int n, double det, double* out) {
    switch (n) {
    case 1:
        out[0] = 1.0 / det;
        return;
    case 2:
        out[0] = a[3] / det;
        out[1] = -a[1] / det;
        out[2] = -a[2] / det;
        out[3] = a[0] / det;
        return;
    case 3:
        out[0] = (a[4] * a[8] - a[5] * a[7]) / det;
        out[1] = (a[2] * a[7] - a[1] * a[8]) / det;
        out[2] = (a[1] * a[5] - a[2] * a[4]) / det;
        out[3] = (a[5] * a[6] - a[3] * a[8]) / det;
        out[4] = (a[0] * a[8] - a[2] * a[6]) / det;
        out[5] = (a[2] * a[3] - a[0] * a[5]) / det;
        out[6] = (a[3] * a[7] - a[4] * a[6]) / det;
        out[7] = (a[1] * a[6] - a[0] * a[7]) / det;
        out[8] = (a[0] * a[4] - a[1] * a[3]) / det;
        return;
    default: break;
    }
    std::vector<double> m(a, a + n * n);
    std::vector<double> inv(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(m[static_cast<std::size_t>(r * n + c)]) >
                std::fabs(m[static_cast<std::size_t>(piv * n + c)]))
                piv = r;
        for (int k = 0; k < n; ++k) {
            std::swap(m[static_cast<std::size_t>(c * n + k)],
                      m[static_cast<std::size_t>(piv * n + k)]);
            std::swap(inv[static_cast<std::size_t>(c * n + k)],
                      inv[static_cast<std::size_t>(piv * n + k)]);
        }
        double d = m[static_cast<std::size_t>(c * n + c)];
        for (int k = 0; k < n; ++k) {
            m[static_cast<std::size_t>(c * n + k)] /= d;
            inv[static_cast<std::size_t>(c * n + k)] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = m[static_cast<std::size_t>(r * n + c)];
            for (int k = 0; k < n; ++k) {
                m[static_cast<std::size_t>(r * n + k)] -=
                    f * m[static_cast<std::size_t>(c * n + k)];
                inv[static_cast<std::size_t>(r * n + k)] -=
                    f * inv[static_cast<std::size_t>(c * n + k)];
            }
        }
    }
    std::copy(inv.begin(), inv.end(), out);
}

// symbolic determinant of an n x n matrix of expressions, n <= 3
Expr det_expr(const std::array<Expr, 9>& m, int n) {
    auto at = [&](int i, int j) -> const Expr& { return m[static_cast<std::size_t>(i * 3 + j)]; };
    if (n == 1) return at(0, 0);
    if (n == 2)
        return Expr::sub(Expr::mul(at(0, 0), at(1, 1)), Expr::mul(at(0, 1), at(1, 0)));
    auto minor2 = [&](int r0, int r1, int c0, int c1) {
        return Expr::sub(Expr::mul(at(r0, c0), at(r1, c1)), Expr::mul(at(r0, c1), at(r1, c0)));
    };
    return Expr::add(
        Expr::sub(Expr::mul(at(0, 0), minor2(1, 2, 1, 2)),
                  Expr::mul(at(0, 1), minor2(1, 2, 0, 2))),
        Expr::mul(at(0, 2), minor2(1, 2, 0, 1)));
}

// adjugate-over-determinant inverse entries, n <= 3
Expr inverse_entry_expr(const std::array<Expr, 9>& m, int n, const Expr& det, int i, int j) {
    auto at = [&](int r, int c) -> const Expr& { return m[static_cast<std::size_t>(r * 3 + c)]; };
    if (n == 1) return Expr::div(Expr::constant(1.0), det);
    if (n == 2) {
        const int oi = 1 - i, oj = 1 - j;
        Expr cof = at(oj, oi); // adj(i,j) = cofactor(j,i)
        double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        return Expr::div(Expr::mul(Expr::constant(sign), cof), det);
    }
    // 3x3: adj(i,j) = (-1)^{i+j} * minor of (j,i)
    int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
    if (r0 > r1) std::swap(r0, r1);
    int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
    if (c0 > c1) std::swap(c0, c1);
    Expr minor = Expr::sub(Expr::mul(at(r0, c0), at(r1, c1)),
                           Expr::mul(at(r0, c1), at(r1, c0)));
    double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    return Expr::div(Expr::mul(Expr::constant(sign), minor), det);
}

std::array<Expr, 9> backing_matrix(const TensorField& a) {
    std::array<Expr, 9> m;
    int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[static_cast<std::size_t>(i * 3 + j)] = a.backing(a.comp2(i, j));
    return m;
}

FieldKind inverse_kind(FieldKind k) {
    return k == FieldKind::Metric ? FieldKind::InverseMetric : FieldKind::Metric;
}

// unique expressions (upper triangle) of the pointwise inverse
std::vector<Expr> inverse_exprs(const TensorField& a) {
    int n = a.dim();
    auto m = backing_matrix(a);
    Expr det = det_expr(m, n);
    std::vector<Expr> out;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            out.push_back(inverse_entry_expr(m, n, det, i, j));
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

MetricDecomposition metric_inverse_det(const TensorField& g) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "metric_inverse_det requires a metric field");
    const GridPtr& grid = g.grid();
    int n = g.dim();

    // determinant check first so the error names the point regardless of path
    std::vector<double> dets(grid->point_count());
    std::vector<double> a(static_cast<std::size_t>(n * n));
    for (std::size_t p = 0; p < grid->point_count(); ++p) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[static_cast<std::size_t>(i * n + j)] = g.at(p, g.comp2(i, j));
        double d = det_n(a.data(), n);
        if (d <= 0.0)
            throw Error(ErrorCode::SingularMetric,
                        "non-positive metric determinant at point " +
                            point_string(*grid, p) + " (sqrt g undefined)");
        dets[p] = d;
    }

    if (g.expression_backed() && n <= 3) {
        auto m = backing_matrix(g);
        Expr det = det_expr(m, n);
        std::vector<Expr> inv = inverse_exprs(g);
        MetricDecomposition out{
            TensorField::sample(grid, FieldKind::InverseMetric, inv),
            TensorField::sample(grid, FieldKind::Scalar, std::array<Expr, 1>{det}),
            TensorField::sample(grid, FieldKind::Scalar,
                                std::array<Expr, 1>{Expr::sqrt(det)}),
        };
        return out;
    }

    std::vector<double> inv(static_cast<std::size_t>(n * n));
    TensorField inverse = TensorField::build(
        grid, FieldKind::InverseMetric,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a[static_cast<std::size_t>(i * n + j)] = g.at(p, g.comp2(i, j));
            invert_n(a.data(), n, dets[p], inv.data());
            // symmetrize exactly: copy the upper triangle into both slots
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    out[static_cast<std::size_t>(i * n + j)] =
                        inv[static_cast<std::size_t>(i * n + j)];
                    out[static_cast<std::size_t>(j * n + i)] =
                        inv[static_cast<std::size_t>(i * n + j)];
                }
        });
    TensorField det = TensorField::build(
        grid, FieldKind::Scalar,
        [&](std::size_t p, std::span<const double>, std::span<double> out) { out[0] = dets[p]; });
    TensorField sqrt_det = TensorField::build(
        grid, FieldKind::Scalar,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            out[0] = std::sqrt(dets[p]);
        });
    return {std::move(inverse), std::move(det), std::move(sqrt_det)};
}

TensorField pointwise_inverse(const TensorField& field) {
    require(field.kind() == FieldKind::Metric || field.kind() == FieldKind::InverseMetric,
            ErrorCode::InvalidArgument, "pointwise_inverse requires a rank-2 symmetric field");
    const GridPtr& grid = field.grid();
    int n = field.dim();

    if (field.expression_backed() && n <= 3)
        return TensorField::sample(grid, inverse_kind(field.kind()), inverse_exprs(field));

    std::vector<double> a(static_cast<std::size_t>(n * n));
    std::vector<double> inv(static_cast<std::size_t>(n * n));
    return TensorField::build(
        grid, inverse_kind(field.kind()),
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a[static_cast<std::size_t>(i * n + j)] = field.at(p, field.comp2(i, j));
            double d = det_n(a.data(), n);
            if (d == 0.0)
                throw Error(ErrorCode::SingularMetric,
                            "singular tensor at point " + point_string(*grid, p));
            invert_n(a.data(), n, d, inv.data());
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    out[static_cast<std::size_t>(i * n + j)] =
                        inv[static_cast<std::size_t>(i * n + j)];
                    out[static_cast<std::size_t>(j * n + i)] =
                        inv[static_cast<std::size_t>(i * n + j)];
                }
        });
}

TensorField christoffel_from_metric(const TensorField& g) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "christoffel_from_metric requires a metric field");
    const GridPtr& grid = g.grid();
    int n = g.dim();
    TensorField ginv = pointwise_inverse(g);
    std::vector<TensorField> dg;
    dg.reserve(static_cast<std::size_t>(n));
    for (int a = 1; a <= n; ++a) dg.push_back(fd_partial(g, a));

    return TensorField::build(
        grid, FieldKind::Connection,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        double sum = 0.0;
                        for (int s = 0; s < n; ++s) {
                            double term =
                                dg[static_cast<std::size_t>(i)].at(p, g.comp2(s, j)) +
                                dg[static_cast<std::size_t>(j)].at(p, g.comp2(s, i)) -
                                dg[static_cast<std::size_t>(s)].at(p, g.comp2(i, j));
                            sum += ginv.at(p, ginv.comp2(k, s)) * term;
                        }
                        double v = 0.5 * sum;
                        out[static_cast<std::size_t>(g.comp3(k, i, j))] = v;
                        out[static_cast<std::size_t>(g.comp3(k, j, i))] = v;
                    }
        });
}

TensorField riemann_lowered(const TensorField& g, const TensorField& gamma) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "riemann_lowered requires a metric field");
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "riemann_lowered requires a connection field");
    require(g.grid() == gamma.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    const GridPtr& grid = g.grid();
    int n = g.dim();
    std::vector<TensorField> dG;
    dG.reserve(static_cast<std::size_t>(n));
    for (int a = 1; a <= n; ++a) dG.push_back(fd_partial(gamma, a));

    return TensorField::build(
        grid, FieldKind::Curvature,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        // R^s_{jkl}, then lower the first index with g
                        for (int i = 0; i < n; ++i)
                            out[static_cast<std::size_t>(g.comp4(i, j, k, l))] = 0.0;
                        for (int s = 0; s < n; ++s) {
                            double r = dG[static_cast<std::size_t>(k)].at(p, g.comp3(s, l, j)) -
                                       dG[static_cast<std::size_t>(l)].at(p, g.comp3(s, k, j));
                            for (int t = 0; t < n; ++t)
                                r += gamma.at(p, g.comp3(s, k, t)) * gamma.at(p, g.comp3(t, l, j)) -
                                     gamma.at(p, g.comp3(s, l, t)) * gamma.at(p, g.comp3(t, k, j));
                            for (int i = 0; i < n; ++i)
                                out[static_cast<std::size_t>(g.comp4(i, j, k, l))] +=
                                    g.at(p, g.comp2(i, s)) * r;
                        }
                    }
        });
}

CicResiduals cic_residuals(const TensorField& g, const TensorField& gamma) {
    const GridPtr& grid = g.grid();
    int n = g.dim();

    CicResiduals out;
    TensorField R = riemann_lowered(g, gamma);
    for (std::size_t p = 0; p < grid->point_count(); ++p)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        out.curvature = std::max(out.curvature,
                                                 std::fabs(R.at(p, R.comp4(i, j, k, l)) +
                                                           R.at(p, R.comp4(j, i, k, l))));

    // direct mixed-partial residual of the compatibility right side,
    // expanded by the product rule so exact derivatives are used when
    // the inputs carry expression backing
    std::vector<TensorField> dg, dG;
    for (int a = 1; a <= n; ++a) {
        dg.push_back(fd_partial(g, a));
        dG.push_back(fd_partial(gamma, a));
    }
    auto d_rhs = [&](std::size_t p, int i, int j, int k, int l) {
        // d_l [ g_is Gamma^s_jk + g_js Gamma^s_ik ]
        double sum = 0.0;
        for (int s = 0; s < n; ++s) {
            sum += dg[static_cast<std::size_t>(l)].at(p, g.comp2(i, s)) *
                       gamma.at(p, g.comp3(s, j, k)) +
                   g.at(p, g.comp2(i, s)) *
                       dG[static_cast<std::size_t>(l)].at(p, g.comp3(s, j, k));
            sum += dg[static_cast<std::size_t>(l)].at(p, g.comp2(j, s)) *
                       gamma.at(p, g.comp3(s, i, k)) +
                   g.at(p, g.comp2(j, s)) *
                       dG[static_cast<std::size_t>(l)].at(p, g.comp3(s, i, k));
        }
        return sum;
    };
    for (std::size_t p = 0; p < grid->point_count(); ++p)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = k + 1; l < n; ++l)
                        out.mixed_partial =
                            std::max(out.mixed_partial, std::fabs(d_rhs(p, i, j, k, l) -
                                                                  d_rhs(p, i, j, l, k)));
    return out;
}

double cic_residual(const TensorField& g, const TensorField& gamma) {
    return cic_residuals(g, gamma).max();
}

namespace {

// d_i(sqrt(g) X^i) for the divergence density, or with X^i replaced by
// g^{ij} f_j for the Laplacian density
TensorField flux_density(const TensorField& vec_or_scalar, const TensorField& g,
                         bool laplacian) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "flux density requires a metric field");
    require(g.grid() == vec_or_scalar.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    const GridPtr& grid = g.grid();
    int n = g.dim();

    if (g.expression_backed() && vec_or_scalar.expression_backed() && n <= 3) {
        auto m = backing_matrix(g);
        Expr det = det_expr(m, n);
        Expr sqrtg = Expr::sqrt(det);
        std::vector<Expr> flux(static_cast<std::size_t>(n)); // sqrt(g) X^i
        for (int i = 0; i < n; ++i) {
            Expr xi;
            if (laplacian) {
                for (int j = 0; j < n; ++j) {
                    Expr term = Expr::mul(inverse_entry_expr(m, n, det, i, j),
                                          vec_or_scalar.backing(0).derivative(j + 1));
                    xi = xi.valid() ? Expr::add(xi, term) : term;
                }
            } else {
                xi = vec_or_scalar.backing(vec_or_scalar.comp1(i));
            }
            flux[static_cast<std::size_t>(i)] = Expr::mul(sqrtg, xi);
        }
        Expr div;
        for (int i = 0; i < n; ++i) {
            Expr d = flux[static_cast<std::size_t>(i)].derivative(i + 1);
            div = div.valid() ? Expr::add(div, d) : d;
        }
        return TensorField::sample(grid, FieldKind::Scalar, std::array<Expr, 1>{div});
    }

    MetricDecomposition dec = metric_inverse_det(g);
    std::vector<TensorField> df;
    if (laplacian)
        for (int a = 1; a <= n; ++a) df.push_back(fd_partial(vec_or_scalar, a));
    TensorField fluxvec = TensorField::build(
        grid, FieldKind::Vector,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int i = 0; i < n; ++i) {
                double xi;
                if (laplacian) {
                    xi = 0.0;
                    for (int j = 0; j < n; ++j)
                        xi += dec.inverse.at(p, dec.inverse.comp2(i, j)) *
                              df[static_cast<std::size_t>(j)].at(p, 0);
                } else {
                    xi = vec_or_scalar.at(p, vec_or_scalar.comp1(i));
                }
                out[static_cast<std::size_t>(i)] = dec.sqrt_det.at(p, 0) * xi;
            }
        });
    std::vector<TensorField> dflux;
    for (int a = 1; a <= n; ++a) dflux.push_back(fd_partial(fluxvec, a));
    return TensorField::build(grid, FieldKind::Scalar,
                              [&](std::size_t p, std::span<const double>, std::span<double> out) {
                                  double s = 0.0;
                                  for (int i = 0; i < n; ++i)
                                      s += dflux[static_cast<std::size_t>(i)].at(
                                          p, fluxvec.comp1(i));
                                  out[0] = s;
                              });
}

TensorField divide_by_sqrtg(const TensorField& density, const TensorField& g) {
    const GridPtr& grid = g.grid();
    int n = g.dim();
    if (density.expression_backed() && g.expression_backed() && n <= 3) {
        auto m = backing_matrix(g);
        Expr sqrtg = Expr::sqrt(det_expr(m, n));
        Expr e = Expr::div(density.backing(0), sqrtg);
        return TensorField::sample(grid, FieldKind::Scalar, std::array<Expr, 1>{e});
    }
    MetricDecomposition dec = metric_inverse_det(g);
    return TensorField::build(grid, FieldKind::Scalar,
                              [&](std::size_t p, std::span<const double>, std::span<double> out) {
                                  out[0] = density.at(p, 0) / dec.sqrt_det.at(p, 0);
                              });
}

} // namespace

TensorField flux_density_divergence(const TensorField& X, const TensorField& g) {
    require(X.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "divergence requires a vector field");
    return flux_density(X, g, false);
}

TensorField flux_density_laplacian(const TensorField& f, const TensorField& g) {
    require(f.kind() == FieldKind::Scalar, ErrorCode::InvalidArgument,
            "laplacian requires a scalar field");
    return flux_density(f, g, true);
}

TensorField riemannian_divergence(const TensorField& X, const TensorField& g) {
    return divide_by_sqrtg(flux_density_divergence(X, g), g);
}

TensorField laplace_beltrami(const TensorField& f, const TensorField& g) {
    return divide_by_sqrtg(flux_density_laplacian(f, g), g);
}

} // namespace riemoc
