#include "control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rng.hpp"

namespace riemoc {

namespace {

constexpr double kSgnThreshold = 1e-12; // |C| below this counts as zero

int sign_of(double c) {
    if (c > kSgnThreshold) return 1;
    if (c < -kSgnThreshold) return -1;
    return 0;
}

} // namespace

double reduced_hamiltonian(int n, EvolutionMode mode, std::span<const double> g_or_inv,
                           std::span<const double> gamma, std::span<const double> p,
                           double running_cost) {
    auto G = [&](int a, int b, int c) {
        return gamma[static_cast<std::size_t>((a * n + b) * n + c)];
    };
    auto M = [&](int a, int b) { return g_or_inv[static_cast<std::size_t>(a * n + b)]; };
    auto P = [&](int a, int b, int c) {
        return p[static_cast<std::size_t>((a * n + b) * n + c)];
    };
    double h = running_cost;
    if (mode == EvolutionMode::Primal) {
        // X + g_is Gamma^s_jk p^ijk
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int s = 0; s < n; ++s)
                        h += M(i, s) * G(s, j, k) * P(i, j, k);
    } else {
        // X - g^is Gamma^j_sk p^k_ij
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int s = 0; s < n; ++s)
                        h -= M(i, s) * G(j, s, k) * P(k, i, j);
    }
    return h;
}

double hamiltonian_trace(int n, EvolutionMode mode, std::span<const double> C,
                         std::span<const double> gamma) {
    double h = 0.0;
    for (int k = 0; k < n; ++k) {
        double trace = 0.0;
        for (int s = 0; s < n; ++s)
            trace += gamma[static_cast<std::size_t>((s * n + k) * n + s)]; // Gamma^s_ks
        h += C[static_cast<std::size_t>(k)] * trace;
    }
    return (mode == EvolutionMode::Dual) ? -h : h;
}

TensorField hamiltonian_field(const TensorField& g_or_inv, const TensorField& gamma,
                              const TensorField& p, EvolutionMode mode) {
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "Hamiltonian requires a connection field");
    if (mode == EvolutionMode::Dual) {
        require(g_or_inv.kind() == FieldKind::InverseMetric &&
                    p.kind() == FieldKind::CostateLower,
                ErrorCode::InvalidArgument,
                "dual Hamiltonian expects an inverse metric and a lower costate");
    } else {
        require(g_or_inv.kind() == FieldKind::Metric &&
                    p.kind() == FieldKind::CostateUpperSym,
                ErrorCode::InvalidArgument,
                "primal Hamiltonian expects a metric and an upper-symmetric costate");
    }
    require(g_or_inv.grid() == gamma.grid() && p.grid() == gamma.grid(),
            ErrorCode::InvalidArgument, "fields must share a grid");
    int n = gamma.dim();
    return TensorField::build(
        gamma.grid(), FieldKind::Scalar,
        [&](std::size_t pt, std::span<const double>, std::span<double> out) {
            out[0] = reduced_hamiltonian(n, mode, g_or_inv.at(pt), gamma.at(pt), p.at(pt));
        });
}

TensorField hamiltonian_trace_field(const TensorField& C, const TensorField& gamma,
                                    EvolutionMode mode) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "trace Hamiltonian requires a vector field C");
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "trace Hamiltonian requires a connection field");
    require(C.grid() == gamma.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    int n = gamma.dim();
    return TensorField::build(
        gamma.grid(), FieldKind::Scalar,
        [&](std::size_t pt, std::span<const double>, std::span<double> out) {
            out[0] = hamiltonian_trace(n, mode, C.at(pt), gamma.at(pt));
        });
}

CostateAnsatz costate_from_C(const TensorField& C, const TensorField& g) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "costate ansatz requires a vector field C");
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "costate ansatz requires a metric field");
    require(C.grid() == g.grid(), ErrorCode::InvalidArgument, "fields must share a grid");
    const GridPtr& grid = g.grid();
    int n = g.dim();

    TensorField costate = [&] {
        if (C.expression_backed() && g.expression_backed()) {
            std::vector<Expr> exprs;
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j)
                        exprs.push_back(Expr::mul(C.backing(C.comp1(k)),
                                                  g.backing(g.comp2(i, j))));
            return TensorField::sample(grid, FieldKind::CostateLower, exprs);
        }
        return TensorField::build(
            grid, FieldKind::CostateLower,
            [&](std::size_t p, std::span<const double>, std::span<double> out) {
                for (int k = 0; k < n; ++k)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            out[static_cast<std::size_t>(C.comp3(k, i, j))] =
                                C.at(p, C.comp1(k)) * g.at(p, g.comp2(i, j));
            });
    }();

    return {C, std::move(costate), solenoidal_residual(C)};
}

TensorField costate_upper_from_C(const TensorField& C, const TensorField& ginv) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "costate ansatz requires a vector field C");
    require(ginv.kind() == FieldKind::InverseMetric, ErrorCode::InvalidArgument,
            "upper costate ansatz requires an inverse metric");
    require(C.grid() == ginv.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    const GridPtr& grid = ginv.grid();
    int n = ginv.dim();
    if (C.expression_backed() && ginv.expression_backed()) {
        std::vector<Expr> exprs;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    exprs.push_back(
                        Expr::mul(C.backing(C.comp1(k)), ginv.backing(ginv.comp2(i, j))));
        return TensorField::sample(grid, FieldKind::CostateUpperSym, exprs);
    }
    return TensorField::build(
        grid, FieldKind::CostateUpperSym,
        [&](std::size_t p, std::span<const double>, std::span<double> out) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        out[static_cast<std::size_t>(C.comp3(i, j, k))] =
                            C.at(p, C.comp1(k)) * ginv.at(p, ginv.comp2(i, j));
        });
}

double solenoidal_residual(const TensorField& C) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "solenoidal residual requires a vector field");
    int n = C.dim();
    std::vector<TensorField> dC;
    for (int a = 1; a <= n; ++a) dC.push_back(fd_partial(C, a));
    double worst = 0.0;
    for (std::size_t p = 0; p < C.grid()->point_count(); ++p) {
        double div = 0.0;
        for (int k = 0; k < n; ++k) div += dC[static_cast<std::size_t>(k)].at(p, C.comp1(k));
        worst = std::max(worst, std::fabs(div));
    }
    return worst;
}

double box_violation(const TensorField& gamma) {
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "box constraint applies to connection fields");
    return std::max(0.0, gamma.max_abs() - 1.0);
}

BangBangResult bang_bang_synthesize(const TensorField& C, Direction direction) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "bang-bang synthesis requires a vector field C");
    const GridPtr& grid = C.grid();
    int n = C.dim();
    double flip = (direction == Direction::Maximize) ? -1.0 : 1.0; // eps = sgn(flip * C)

    std::vector<int> eps(static_cast<std::size_t>(n));
    std::vector<double> eps_vals(grid->point_count() * static_cast<std::size_t>(n));
    std::vector<double> gamma_vals(grid->point_count() * static_cast<std::size_t>(n * n * n));
    std::vector<double> mask_vals(gamma_vals.size());

    for (std::size_t p = 0; p < grid->point_count(); ++p) {
        for (int l = 0; l < n; ++l) {
            eps[static_cast<std::size_t>(l)] = sign_of(flip * C.at(p, C.comp1(l)));
            eps_vals[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(l)] =
                eps[static_cast<std::size_t>(l)];
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::size_t c = p * static_cast<std::size_t>(n * n * n) +
                                    static_cast<std::size_t>((k * n + i) * n + j);
                    if (k == i && eps[static_cast<std::size_t>(j)] != 0)
                        gamma_vals[c] = eps[static_cast<std::size_t>(j)];
                    else if (k == j && eps[static_cast<std::size_t>(i)] != 0)
                        gamma_vals[c] = eps[static_cast<std::size_t>(i)];
                    else
                        mask_vals[c] = 1.0; // zero switching coefficient: arbitrary
                }
    }

    return {TensorField::from_dense_values(grid, FieldKind::Connection, std::move(gamma_vals)),
            TensorField::from_dense_values(grid, FieldKind::Vector, std::move(eps_vals)),
            TensorField::from_dense_values(grid, FieldKind::Connection, std::move(mask_vals))};
}

BruteForceResult brute_force_hamiltonian_max(std::span<const double> C, int n) {
    require(n >= 1 && n <= 3, ErrorCode::Unsupported,
            "brute-force enumeration is limited to n <= 3");
    require(static_cast<int>(C.size()) >= n, ErrorCode::Dimension, "C has too few entries");

    const int nunique = n * (n * (n + 1) / 2);
    long long total = 1;
    for (int u = 0; u < nunique; ++u) total *= 3;

    std::vector<int> udense(static_cast<std::size_t>(nunique));
    for (int u = 0; u < nunique; ++u)
        udense[static_cast<std::size_t>(u)] = unique_to_dense(FieldKind::Connection, n, u);
    auto mirror_of = [&](int dense) {
        int k = dense / (n * n), i = (dense / n) % n, j = dense % n;
        return (k * n + j) * n + i;
    };

    std::vector<double> gamma(static_cast<std::size_t>(n * n * n), 0.0);
    std::vector<int> digits(static_cast<std::size_t>(nunique), 0);

    BruteForceResult best;
    bool first = true;
    for (long long v = 0; v < total; ++v) {
        for (int u = 0; u < nunique; ++u) {
            double val = static_cast<double>(digits[static_cast<std::size_t>(u)] - 1);
            int d = udense[static_cast<std::size_t>(u)];
            gamma[static_cast<std::size_t>(d)] = val;
            gamma[static_cast<std::size_t>(mirror_of(d))] = val;
        }
        double h = hamiltonian_trace(n, EvolutionMode::Dual, C, gamma);
        if (first || h > best.value) {
            best.value = h;
            best.argmax_count = 1;
            best.first_argmax = gamma;
            first = false;
        } else if (h == best.value) {
            ++best.argmax_count;
        }
        // increment base-3 counter
        for (int u = nunique - 1; u >= 0; --u) {
            if (++digits[static_cast<std::size_t>(u)] < 3) break;
            digits[static_cast<std::size_t>(u)] = 0;
        }
    }
    return best;
}

FluxValues total_flux_functional(const BolzaSpec& spec, const TensorField& g) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "flux functional requires a metric field");
    const GridPtr& grid = g.grid();
    int n = g.dim();

    TensorField density = (spec.kind == BolzaKind::Divergence)
                              ? flux_density_divergence(spec.field, g)
                              : flux_density_laplacian(spec.field, g);
    FluxValues out;
    out.interior = integrate_interior(density);

    MetricDecomposition dec = metric_inverse_det(g);
    std::vector<TensorField> df;
    if (spec.kind == BolzaKind::Laplacian)
        for (int a = 1; a <= n; ++a) df.push_back(fd_partial(spec.field, a));

    out.boundary = integrate_boundary(
        *grid, [&](std::span<const int> idx, std::span<const double>, int axis, int side) {
            std::size_t p = grid->flatten(idx);
            int a = axis - 1;
            double sq = dec.sqrt_det.at(p, 0);
            if (spec.kind == BolzaKind::Divergence)
                return side * sq * spec.field.at(p, spec.field.comp1(a));
            double v = 0.0;
            for (int i = 0; i < n; ++i)
                v += dec.inverse.at(p, dec.inverse.comp2(i, a)) *
                     df[static_cast<std::size_t>(i)].at(p, 0);
            return side * sq * v;
        });
    return out;
}

double boundary_residual(const BolzaSpec& spec, const TensorField& C,
                         const TensorField& g, BoundarySign sign) {
    require(C.kind() == FieldKind::Vector, ErrorCode::InvalidArgument,
            "boundary residual requires a vector field C");
    require(C.grid() == g.grid(), ErrorCode::InvalidArgument, "fields must share a grid");
    const GridPtr& grid = g.grid();
    int n = g.dim();
    MetricDecomposition dec = metric_inverse_det(g);
    std::vector<TensorField> df;
    if (spec.kind == BolzaKind::Laplacian)
        for (int a = 1; a <= n; ++a) df.push_back(fd_partial(spec.field, a));

    std::vector<int> idx(static_cast<std::size_t>(n));
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int side = 0; side < 2; ++side) {
            int pinned = side == 0 ? 0 : grid->counts()[static_cast<std::size_t>(a)] - 1;
            for (std::size_t p = 0; p < grid->point_count(); ++p) {
                grid->unflatten(p, idx);
                if (idx[static_cast<std::size_t>(a)] != pinned) continue;
                double sq = dec.sqrt_det.at(p, 0);
                if (spec.kind == BolzaKind::Divergence) {
                    double x = spec.field.at(p, spec.field.comp1(a));
                    double v = (sign == BoundarySign::Paper)
                                   ? C.at(p, C.comp1(a)) - sq * x
                                   : C.at(p, C.comp1(a)) + sq * x;
                    worst = std::max(worst, std::fabs(v));
                } else {
                    // n_k C^k g_ij - n_k g^kl (f_i g_lj + f_j g_li - f_l g_ij) sqrt(g);
                    // the derived variational condition coincides with the
                    // paper's displayed equation for this kind
                    double ca = C.at(p, C.comp1(a));
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            double rhs = 0.0;
                            for (int l = 0; l < n; ++l) {
                                double fi = df[static_cast<std::size_t>(i)].at(p, 0);
                                double fj = df[static_cast<std::size_t>(j)].at(p, 0);
                                double fl = df[static_cast<std::size_t>(l)].at(p, 0);
                                rhs += dec.inverse.at(p, dec.inverse.comp2(a, l)) *
                                       (fi * g.at(p, g.comp2(l, j)) +
                                        fj * g.at(p, g.comp2(l, i)) -
                                        fl * g.at(p, g.comp2(i, j)));
                            }
                            double v = ca * g.at(p, g.comp2(i, j)) - rhs * sq;
                            worst = std::max(worst, std::fabs(v));
                        }
                }
            }
        }
    }
    return worst;
}

Report mp_certificate(const TensorField& g, const TensorField& ginv,
                      const TensorField& gamma, const CostateAnsatz& ansatz,
                      const BolzaSpec& spec, const CertificateOptions& options) {
    const GridPtr& grid = gamma.grid();
    int n = gamma.dim();
    auto tol = [&](const std::string& name, double dflt) {
        auto it = options.tolerances.find(name);
        return it == options.tolerances.end() ? dflt : it->second;
    };

    Report rep;

    // (a) evolution residual of (PDE) / (PDE')
    double ev = (options.mode == EvolutionMode::Dual)
                    ? evolution_residual(ginv, gamma, EvolutionMode::Dual)
                    : evolution_residual(g, gamma, EvolutionMode::Primal);
    rep.add("evolution_residual", ev, tol("evolution_residual", 1e-8));

    // (b) adjoint residual of the matching costate variant
    double adj = (options.mode == EvolutionMode::Dual)
                     ? adjoint_residual(ansatz.costate, gamma)
                     : adjoint_residual(costate_upper_from_C(ansatz.C, ginv), gamma);
    rep.add("adjoint_residual", adj, tol("adjoint_residual", 1e-8));

    // (c) Hamiltonian gap: sampled admissible connections plus, for n <= 2,
    // the full vertex enumeration; H evaluates through the shared trace form
    const int nunique = unique_component_count(FieldKind::Connection, n);
    std::vector<int> udense(static_cast<std::size_t>(nunique));
    for (int u = 0; u < nunique; ++u)
        udense[static_cast<std::size_t>(u)] = unique_to_dense(FieldKind::Connection, n, u);
    auto mirror_of = [&](int dense) {
        int k = dense / (n * n), i = (dense / n) % n, j = dense % n;
        return (k * n + j) * n + i;
    };

    std::vector<double> cand(static_cast<std::size_t>(n * n * n), 0.0);
    std::vector<double> cvals(static_cast<std::size_t>(n));
    double gap = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < grid->point_count(); ++p) {
        for (int k = 0; k < n; ++k) cvals[static_cast<std::size_t>(k)] = ansatz.C.at(p, k);
        double hstar = hamiltonian_trace(n, options.mode, cvals, gamma.at(p));
        if (n <= 2) {
            std::vector<double> cbrute = cvals;
            if (options.mode == EvolutionMode::Primal)
                for (double& c : cbrute) c = -c;
            BruteForceResult bf = brute_force_hamiltonian_max(cbrute, n);
            gap = std::max(gap, bf.value - hstar);
        }
        SplitMix64 rng(options.seed ^ (0x9e3779b97f4a7c15ULL * (p + 1)));
        for (int s = 0; s < options.samples; ++s) {
            for (int u = 0; u < nunique; ++u) {
                double v = rng.uniform_symmetric();
                int d = udense[static_cast<std::size_t>(u)];
                cand[static_cast<std::size_t>(d)] = v;
                cand[static_cast<std::size_t>(mirror_of(d))] = v;
            }
            double h = hamiltonian_trace(n, options.mode, cvals, cand);
            gap = std::max(gap, h - hstar);
        }
    }
    rep.add("hamiltonian_gap", gap, tol("hamiltonian_gap", 1e-9));

    // (d) boundary transversality residual
    rep.add("boundary_residual", boundary_residual(spec, ansatz.C, g, options.sign),
            tol("boundary_residual", 1e-8));

    // (e) solenoidal residual of C
    rep.add("solenoidal_residual", ansatz.solenoidal_residual,
            tol("solenoidal_residual", 1e-8));

    return rep;
}

} // namespace riemoc
