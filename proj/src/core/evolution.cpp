#include "evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace riemoc {

namespace {

std::string point_string(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k) s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", x[k]);
        s += buf;
    }
    return s + ")";
}

constexpr double kBlowUpLimit = 1e100;

// Evaluates the dense n^3 connection at points along one axis: at the node
// `flat`, the midpoint, or the next node. Expression backing is exact;
// grid-only data interpolates linearly (midpoint = average of neighbors).
class ConnectionSampler {
public:
    ConnectionSampler(const TensorField& gamma, int axis)
        : gamma_(gamma), n_(gamma.dim()), ncomp_(gamma.ncomp()) {
        stride_ = 1;
        const auto& counts = gamma.grid()->counts();
        for (int k = n_ - 1; k > axis; --k)
            stride_ *= static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]);
        axis_ = axis;
    }

    // frac in {0.0, 0.5, 1.0}; x is the base-node coordinate vector
    void eval(std::size_t flat, std::span<const double> x, double frac,
              std::span<double> out) const {
        if (gamma_.expression_backed()) {
            std::vector<double> xx(x.begin(), x.end());
            xx[static_cast<std::size_t>(axis_)] +=
                frac * gamma_.grid()->spacing()[static_cast<std::size_t>(axis_)];
            for (int u = 0; u < unique_component_count(gamma_.kind(), n_); ++u) {
                int c = unique_to_dense(gamma_.kind(), n_, u);
                double v = gamma_.backing(c).eval(xx);
                // mirror the symmetric lower pair
                int k = c / (n_ * n_), i = (c / n_) % n_, j = c % n_;
                out[static_cast<std::size_t>(gamma_.comp3(k, i, j))] = v;
                out[static_cast<std::size_t>(gamma_.comp3(k, j, i))] = v;
            }
            return;
        }
        if (frac == 0.0) {
            auto v = gamma_.at(flat);
            std::copy(v.begin(), v.end(), out.begin());
        } else if (frac == 1.0) {
            auto v = gamma_.at(flat + stride_);
            std::copy(v.begin(), v.end(), out.begin());
        } else {
            auto a = gamma_.at(flat);
            auto b = gamma_.at(flat + stride_);
            for (int c = 0; c < ncomp_; ++c)
                out[static_cast<std::size_t>(c)] =
                    0.5 * (a[static_cast<std::size_t>(c)] + b[static_cast<std::size_t>(c)]);
        }
    }

private:
    const TensorField& gamma_;
    int n_;
    int ncomp_;
    int axis_;
    std::size_t stride_ = 1;
};

} // namespace

void compat_rhs(int n, EvolutionMode mode, std::span<const double> state,
                std::span<const double> gamma, int axis, std::span<double> out) {
    auto G = [&](int a, int b, int c) {
        return gamma[static_cast<std::size_t>((a * n + b) * n + c)];
    };
    auto S = [&](int a, int b) { return state[static_cast<std::size_t>(a * n + b)]; };
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = 0.0;
            if (mode == EvolutionMode::Primal) {
                for (int s = 0; s < n; ++s)
                    v += S(i, s) * G(s, j, axis) + S(j, s) * G(s, i, axis);
            } else {
                for (int s = 0; s < n; ++s)
                    v -= S(i, s) * G(j, s, axis) + S(j, s) * G(i, s, axis);
            }
            out[static_cast<std::size_t>(i * n + j)] = v;
            out[static_cast<std::size_t>(j * n + i)] = v;
        }
    }
}

TensorField evolve_metric(const EvolutionProblem& problem) {
    std::vector<int> order(static_cast<std::size_t>(problem.gamma.dim()));
    std::iota(order.begin(), order.end(), 0);
    return evolve_metric(problem, order);
}

TensorField evolve_metric(const EvolutionProblem& problem, std::span<const int> axis_order) {
    const TensorField& gamma = problem.gamma;
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "evolution control must be a connection field");
    const GridPtr& grid = gamma.grid();
    int n = grid->dim();
    require(static_cast<int>(problem.eta.size()) == n * n, ErrorCode::Dimension,
            "initial value eta must be an n x n matrix");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            require(problem.eta[static_cast<std::size_t>(i * n + j)] ==
                        problem.eta[static_cast<std::size_t>(j * n + i)],
                    ErrorCode::InvalidArgument, "initial value eta must be symmetric");
    require(static_cast<int>(axis_order.size()) == n, ErrorCode::InvalidArgument,
            "axis order must be a permutation of the axes");

    const int nc = n * n;
    const int ng = n * n * n;
    std::vector<double> values(grid->point_count() * static_cast<std::size_t>(nc), 0.0);
    // corner state
    std::copy(problem.eta.begin(), problem.eta.end(), values.begin());

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> g0(static_cast<std::size_t>(nc)), gt(static_cast<std::size_t>(nc));
    std::vector<double> k1(static_cast<std::size_t>(nc)), k2(static_cast<std::size_t>(nc)),
        k3(static_cast<std::size_t>(nc)), k4(static_cast<std::size_t>(nc));
    std::vector<double> ga(static_cast<std::size_t>(ng)), gm(static_cast<std::size_t>(ng)),
        gb(static_cast<std::size_t>(ng));

    for (std::size_t stage = 0; stage < axis_order.size(); ++stage) {
        int a = axis_order[stage];
        ConnectionSampler sampler(gamma, a);
        int m = grid->counts()[static_cast<std::size_t>(a)];
        double h = grid->spacing()[static_cast<std::size_t>(a)];
        std::size_t stride = 1;
        for (int k = n - 1; k > a; --k)
            stride *= static_cast<std::size_t>(grid->counts()[static_cast<std::size_t>(k)]);

        for (std::size_t p = 0; p < grid->point_count(); ++p) {
            grid->unflatten(p, idx);
            // a stage base has index 0 on this axis and on every axis not
            // yet processed
            if (idx[static_cast<std::size_t>(a)] != 0) continue;
            bool base = true;
            for (std::size_t later = stage + 1; later < axis_order.size() && base; ++later)
                if (idx[static_cast<std::size_t>(axis_order[later])] != 0) base = false;
            if (!base) continue;

            std::size_t cur = p;
            for (int step = 0; step + 1 < m; ++step, cur += stride) {
                grid->point_of_flat(cur, x);
                std::copy(values.begin() + static_cast<std::ptrdiff_t>(cur * nc),
                          values.begin() + static_cast<std::ptrdiff_t>(cur * nc + nc),
                          g0.begin());
                sampler.eval(cur, x, 0.0, ga);
                sampler.eval(cur, x, 0.5, gm);
                sampler.eval(cur, x, 1.0, gb);

                compat_rhs(n, problem.mode, g0, ga, a, k1);
                for (int c = 0; c < nc; ++c)
                    gt[static_cast<std::size_t>(c)] =
                        g0[static_cast<std::size_t>(c)] + 0.5 * h * k1[static_cast<std::size_t>(c)];
                compat_rhs(n, problem.mode, gt, gm, a, k2);
                for (int c = 0; c < nc; ++c)
                    gt[static_cast<std::size_t>(c)] =
                        g0[static_cast<std::size_t>(c)] + 0.5 * h * k2[static_cast<std::size_t>(c)];
                compat_rhs(n, problem.mode, gt, gm, a, k3);
                for (int c = 0; c < nc; ++c)
                    gt[static_cast<std::size_t>(c)] =
                        g0[static_cast<std::size_t>(c)] + h * k3[static_cast<std::size_t>(c)];
                compat_rhs(n, problem.mode, gt, gb, a, k4);

                std::size_t next = cur + stride;
                double worst = 0.0;
                for (int c = 0; c < nc; ++c) {
                    double v = g0[static_cast<std::size_t>(c)] +
                               (h / 6.0) * (k1[static_cast<std::size_t>(c)] +
                                            2.0 * k2[static_cast<std::size_t>(c)] +
                                            2.0 * k3[static_cast<std::size_t>(c)] +
                                            k4[static_cast<std::size_t>(c)]);
                    values[next * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = v;
                    worst = std::max(worst, std::fabs(v));
                }
                if (worst > kBlowUpLimit) {
                    grid->point_of_flat(next, x);
                    throw Error(ErrorCode::BlowUp,
                                "state blow-up (component magnitude > 1e100) at point " +
                                    point_string(x));
                }
            }
        }
    }

    FieldKind kind = (problem.mode == EvolutionMode::Primal) ? FieldKind::Metric
                                                             : FieldKind::InverseMetric;
    return TensorField::from_dense_values(grid, kind, std::move(values));
}

double path_independence_check(const EvolutionProblem& problem) {
    int n = problem.gamma.dim();
    std::vector<int> fwd(static_cast<std::size_t>(n)), rev(static_cast<std::size_t>(n));
    std::iota(fwd.begin(), fwd.end(), 0);
    rev = fwd;
    std::reverse(rev.begin(), rev.end());
    TensorField a = evolve_metric(problem, fwd);
    TensorField b = evolve_metric(problem, rev);
    double worst = 0.0;
    for (std::size_t p = 0; p < a.grid()->point_count(); ++p)
        for (int c = 0; c < a.ncomp(); ++c)
            worst = std::max(worst, std::fabs(a.at(p, c) - b.at(p, c)));
    return worst;
}

double evolution_residual(const TensorField& g, const TensorField& gamma,
                          EvolutionMode mode) {
    require(g.kind() == (mode == EvolutionMode::Primal ? FieldKind::Metric
                                                       : FieldKind::InverseMetric),
            ErrorCode::InvalidArgument, "state kind does not match the evolution mode");
    require(g.grid() == gamma.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    const GridPtr& grid = g.grid();
    int n = g.dim();
    const int nc = n * n;
    std::vector<double> rhs(static_cast<std::size_t>(nc));
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
        TensorField dg = fd_partial(g, a + 1);
        for (std::size_t p = 0; p < grid->point_count(); ++p) {
            compat_rhs(n, mode, g.at(p), gamma.at(p), a, rhs);
            for (int c = 0; c < nc; ++c)
                worst = std::max(worst, std::fabs(dg.at(p, c) - rhs[static_cast<std::size_t>(c)]));
        }
    }
    return worst;
}

double adjoint_residual(const TensorField& p, const TensorField& gamma) {
    require(gamma.kind() == FieldKind::Connection, ErrorCode::InvalidArgument,
            "adjoint residual requires a connection field");
    require(p.grid() == gamma.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    FieldKind kind = p.kind();
    require(kind == FieldKind::CostateLower || kind == FieldKind::CostateUpperSym ||
                kind == FieldKind::CostateUpperRaw,
            ErrorCode::InvalidArgument, "field is not a costate variant");
    const GridPtr& grid = p.grid();
    int n = p.dim();

    std::vector<TensorField> dp;
    for (int a = 1; a <= n; ++a) dp.push_back(fd_partial(p, a));

    auto lhs = [&](std::size_t pt, int i, int j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            int c = (kind == FieldKind::CostateLower) ? p.comp3(k, i, j) : p.comp3(i, j, k);
            s += dp[static_cast<std::size_t>(k)].at(pt, c);
        }
        return s;
    };
    auto rhs = [&](std::size_t pt, int i, int j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            for (int t = 0; t < n; ++t) {
                switch (kind) {
                case FieldKind::CostateLower:
                    s += p.at(pt, p.comp3(k, i, t)) * gamma.at(pt, gamma.comp3(t, j, k)) +
                         p.at(pt, p.comp3(k, j, t)) * gamma.at(pt, gamma.comp3(t, i, k));
                    break;
                case FieldKind::CostateUpperSym:
                    s -= p.at(pt, p.comp3(i, t, k)) * gamma.at(pt, gamma.comp3(j, t, k)) +
                         p.at(pt, p.comp3(j, t, k)) * gamma.at(pt, gamma.comp3(i, t, k));
                    break;
                default: // CostateUpperRaw
                    s -= (p.at(pt, p.comp3(i, t, k)) + p.at(pt, p.comp3(t, i, k))) *
                         gamma.at(pt, gamma.comp3(j, t, k));
                    break;
                }
            }
        }
        return s;
    };

    double worst = 0.0;
    for (std::size_t pt = 0; pt < grid->point_count(); ++pt)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(lhs(pt, i, j) - rhs(pt, i, j)));
    return worst;
}

double duality_flux_divergence(const TensorField& y, const TensorField& p) {
    require(y.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "duality flux requires a metric deformation y");
    require(p.kind() == FieldKind::CostateUpperSym || p.kind() == FieldKind::CostateUpperRaw,
            ErrorCode::InvalidArgument, "duality flux requires an upper costate");
    require(y.grid() == p.grid(), ErrorCode::InvalidArgument, "fields must share a grid");
    const GridPtr& grid = y.grid();
    int n = y.dim();

    TensorField S = TensorField::build(
        grid, FieldKind::Vector,
        [&](std::size_t pt, std::span<const double>, std::span<double> out) {
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        s += y.at(pt, y.comp2(i, j)) * p.at(pt, p.comp3(i, j, k));
                out[static_cast<std::size_t>(k)] = s;
            }
        });

    std::vector<TensorField> dS;
    for (int a = 1; a <= n; ++a) dS.push_back(fd_partial(S, a));

    std::vector<int> idx(static_cast<std::size_t>(n));
    double worst = 0.0;
    for (std::size_t pt = 0; pt < grid->point_count(); ++pt) {
        grid->unflatten(pt, idx);
        bool interior = true;
        for (int k = 0; k < n && interior; ++k)
            if (idx[static_cast<std::size_t>(k)] == 0 ||
                idx[static_cast<std::size_t>(k)] == grid->counts()[static_cast<std::size_t>(k)] - 1)
                interior = false;
        if (!interior) continue;
        double div = 0.0;
        for (int k = 0; k < n; ++k)
            div += dS[static_cast<std::size_t>(k)].at(pt, S.comp1(k));
        worst = std::max(worst, std::fabs(div));
    }
    return worst;
}

} // namespace riemoc
