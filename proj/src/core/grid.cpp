#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

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

void format17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

// ---------------------------------------------------------------------------
// Domain / Grid

Domain Domain::create(std::span<const double> lower, std::span<const double> upper) {
    require(!lower.empty(), ErrorCode::InvalidArgument, "domain dimension must be >= 1");
    require(lower.size() == upper.size(), ErrorCode::Dimension,
            "domain corners must have equal dimension");
    Domain d;
    d.n = static_cast<int>(lower.size());
    d.x0.assign(lower.begin(), lower.end());
    d.x1.assign(upper.begin(), upper.end());
    for (int k = 0; k < d.n; ++k)
        require(d.x1[k] > d.x0[k], ErrorCode::InvalidArgument,
                "axis " + std::to_string(k + 1) +
                    ": upper bound must exceed lower bound");
    return d;
}

Grid::Grid(Domain domain, GridSpec spec)
    : domain_(std::move(domain)), spec_(std::move(spec)) {
    require(static_cast<int>(spec_.m.size()) == domain_.n, ErrorCode::Dimension,
            "sample counts must match domain dimension");
    h_.resize(static_cast<std::size_t>(domain_.n));
    for (int k = 0; k < domain_.n; ++k) {
        int m = spec_.m[static_cast<std::size_t>(k)];
        require(m >= 3, ErrorCode::InvalidArgument,
                "axis " + std::to_string(k + 1) + ": sample count must be >= 3");
        require(m % 2 == 1, ErrorCode::InvalidArgument,
                "axis " + std::to_string(k + 1) + ": sample count must be odd");
        h_[static_cast<std::size_t>(k)] =
            (domain_.x1[static_cast<std::size_t>(k)] - domain_.x0[static_cast<std::size_t>(k)]) /
            static_cast<double>(m - 1);
    }
    stride_.assign(static_cast<std::size_t>(domain_.n), 1);
    npoints_ = 1;
    for (int k = domain_.n - 1; k >= 0; --k) {
        stride_[static_cast<std::size_t>(k)] = npoints_;
        npoints_ *= static_cast<std::size_t>(spec_.m[static_cast<std::size_t>(k)]);
    }
}

std::size_t Grid::flatten(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int k = 0; k < domain_.n; ++k) {
        int i = idx[static_cast<std::size_t>(k)];
        require(i >= 0 && i < spec_.m[static_cast<std::size_t>(k)], ErrorCode::InvalidArgument,
                "axis " + std::to_string(k + 1) + ": index out of range");
        flat += static_cast<std::size_t>(i) * stride_[static_cast<std::size_t>(k)];
    }
    return flat;
}

void Grid::unflatten(std::size_t flat, std::span<int> idx) const {
    for (int k = 0; k < domain_.n; ++k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(
            (flat / stride_[static_cast<std::size_t>(k)]) %
            static_cast<std::size_t>(spec_.m[static_cast<std::size_t>(k)]));
    }
}

void Grid::point(std::span<const int> idx, std::span<double> x) const {
    for (int k = 0; k < domain_.n; ++k) {
        int i = idx[static_cast<std::size_t>(k)];
        require(i >= 0 && i < spec_.m[static_cast<std::size_t>(k)], ErrorCode::InvalidArgument,
                "axis " + std::to_string(k + 1) + ": index out of range");
        x[static_cast<std::size_t>(k)] =
            domain_.x0[static_cast<std::size_t>(k)] + i * h_[static_cast<std::size_t>(k)];
    }
}

std::vector<double> Grid::point(std::span<const int> idx) const {
    std::vector<double> x(static_cast<std::size_t>(domain_.n));
    point(idx, x);
    return x;
}

void Grid::point_of_flat(std::size_t flat, std::span<double> x) const {
    for (int k = 0; k < domain_.n; ++k) {
        auto i = (flat / stride_[static_cast<std::size_t>(k)]) %
                 static_cast<std::size_t>(spec_.m[static_cast<std::size_t>(k)]);
        x[static_cast<std::size_t>(k)] =
            domain_.x0[static_cast<std::size_t>(k)] +
            static_cast<double>(i) * h_[static_cast<std::size_t>(k)];
    }
}

double Grid::simpson_weight(int axis, int i) const {
    int m = spec_.m[static_cast<std::size_t>(axis)];
    double h3 = h_[static_cast<std::size_t>(axis)] / 3.0;
    if (i == 0 || i == m - 1) return h3;
    return (i % 2 == 1) ? 4.0 * h3 : 2.0 * h3;
}

GridPtr make_grid(const Domain& domain, const GridSpec& spec) {
    return std::make_shared<Grid>(domain, spec);
}

// ---------------------------------------------------------------------------
// FieldKind tables

int field_rank(FieldKind kind) {
    switch (kind) {
    case FieldKind::Scalar: return 0;
    case FieldKind::Vector: return 1;
    case FieldKind::Metric:
    case FieldKind::InverseMetric: return 2;
    case FieldKind::Connection:
    case FieldKind::CostateLower:
    case FieldKind::CostateUpperSym:
    case FieldKind::CostateUpperRaw: return 3;
    case FieldKind::Curvature: return 4;
    }
    return 0;
}

int symmetric_pair_slot(FieldKind kind) {
    switch (kind) {
    case FieldKind::Metric:
    case FieldKind::InverseMetric:
    case FieldKind::CostateUpperSym: return 0;
    case FieldKind::Connection:
    case FieldKind::CostateLower: return 1;
    default: return -1;
    }
}

int dense_component_count(FieldKind kind, int n) {
    int c = 1;
    for (int r = 0; r < field_rank(kind); ++r) c *= n;
    return c;
}

namespace {

void decode_tuple(FieldKind kind, int n, int comp, std::span<int> tuple) {
    int r = field_rank(kind);
    for (int s = r - 1; s >= 0; --s) {
        tuple[static_cast<std::size_t>(s)] = comp % n;
        comp /= n;
    }
}

int encode_tuple(int n, std::span<const int> tuple) {
    int c = 0;
    for (int v : tuple) c = c * n + v;
    return c;
}

bool tuple_canonical(FieldKind kind, std::span<const int> tuple) {
    int s = symmetric_pair_slot(kind);
    if (s < 0) return true;
    return tuple[static_cast<std::size_t>(s)] <= tuple[static_cast<std::size_t>(s + 1)];
}

int canonical_dense(FieldKind kind, int n, int comp) {
    int s = symmetric_pair_slot(kind);
    if (s < 0) return comp;
    int r = field_rank(kind);
    int tuple[4];
    decode_tuple(kind, n, comp, {tuple, static_cast<std::size_t>(r)});
    if (tuple[s] > tuple[s + 1]) std::swap(tuple[s], tuple[s + 1]);
    return encode_tuple(n, {tuple, static_cast<std::size_t>(r)});
}

const char* name_base(FieldKind kind) {
    switch (kind) {
    case FieldKind::Scalar: return "f";
    case FieldKind::Vector: return "X";
    case FieldKind::Metric: return "g";
    case FieldKind::InverseMetric: return "gi";
    case FieldKind::Connection: return "Gamma";
    case FieldKind::CostateLower: return "p";
    case FieldKind::CostateUpperSym: return "p";
    case FieldKind::CostateUpperRaw: return "lam";
    case FieldKind::Curvature: return "R";
    }
    return "v";
}

std::string component_name(FieldKind kind, int n, int dense) {
    int r = field_rank(kind);
    if (r == 0) return name_base(kind);
    int tuple[4];
    decode_tuple(kind, n, dense, {tuple, static_cast<std::size_t>(r)});
    std::string s = name_base(kind);
    // underscore between the sole upper slot and the symmetric lower pair
    bool sep_after_first =
        kind == FieldKind::Connection || kind == FieldKind::CostateLower;
    for (int k = 0; k < r; ++k) {
        if (k == 1 && sep_after_first) s += '_';
        s += std::to_string(tuple[k] + 1);
    }
    return s;
}

} // namespace

int unique_component_count(FieldKind kind, int n) {
    if (symmetric_pair_slot(kind) < 0) return dense_component_count(kind, n);
    return dense_component_count(kind, n) / n / n * (n * (n + 1) / 2);
}

int unique_to_dense(FieldKind kind, int n, int u) {
    int seen = 0;
    int dense = dense_component_count(kind, n);
    int r = field_rank(kind);
    int tuple[4];
    for (int c = 0; c < dense; ++c) {
        decode_tuple(kind, n, c, {tuple, static_cast<std::size_t>(r)});
        if (!tuple_canonical(kind, {tuple, static_cast<std::size_t>(r)})) continue;
        if (seen == u) return c;
        ++seen;
    }
    throw Error(ErrorCode::InvalidArgument, "unique component index out of range");
}

std::vector<std::string> component_names(FieldKind kind, int n) {
    std::vector<std::string> out;
    int dense = dense_component_count(kind, n);
    int r = field_rank(kind);
    int tuple[4];
    for (int c = 0; c < dense; ++c) {
        decode_tuple(kind, n, c, {tuple, static_cast<std::size_t>(r)});
        if (!tuple_canonical(kind, {tuple, static_cast<std::size_t>(r)})) continue;
        out.push_back(component_name(kind, n, c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// TensorField

TensorField::TensorField(GridPtr grid, FieldKind kind)
    : grid_(std::move(grid)), kind_(kind),
      ncomp_(dense_component_count(kind, grid_->dim())) {
    values_.assign(grid_->point_count() * static_cast<std::size_t>(ncomp_), 0.0);
}

TensorField TensorField::sample(GridPtr grid, FieldKind kind,
                                std::span<const Expr> unique_exprs) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "null grid");
    int n = grid->dim();
    int nunique = unique_component_count(kind, n);
    require(static_cast<int>(unique_exprs.size()) == nunique, ErrorCode::Dimension,
            "expected " + std::to_string(nunique) + " component expressions, got " +
                std::to_string(unique_exprs.size()));
    for (const Expr& e : unique_exprs)
        require(e.valid() && e.dim() <= n, ErrorCode::Dimension,
                "component expression references a variable beyond x" + std::to_string(n));

    TensorField f(std::move(grid), kind);
    f.backing_.resize(static_cast<std::size_t>(f.ncomp_));
    std::vector<int> udense(static_cast<std::size_t>(nunique));
    for (int u = 0; u < nunique; ++u) {
        udense[static_cast<std::size_t>(u)] = unique_to_dense(kind, n, u);
    }
    // dense backing: mirrored components share the same expression
    for (int c = 0; c < f.ncomp_; ++c) {
        int canon = canonical_dense(kind, n, c);
        for (int u = 0; u < nunique; ++u)
            if (udense[static_cast<std::size_t>(u)] == canon)
                f.backing_[static_cast<std::size_t>(c)] = unique_exprs[static_cast<std::size_t>(u)];
    }

    auto names = component_names(kind, n);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < f.grid_->point_count(); ++p) {
        f.grid_->point_of_flat(p, x);
        for (int u = 0; u < nunique; ++u) {
            int c = udense[static_cast<std::size_t>(u)];
            double v;
            try {
                v = unique_exprs[static_cast<std::size_t>(u)].eval(x);
            } catch (const EvalError& e) {
                throw EvalError("component " + names[static_cast<std::size_t>(u)] +
                                " at point " + point_string(x) + ": " + e.what());
            }
            f.values_[p * static_cast<std::size_t>(f.ncomp_) + static_cast<std::size_t>(c)] = v;
        }
        // mirror into non-canonical slots
        for (int c = 0; c < f.ncomp_; ++c) {
            int canon = canonical_dense(kind, n, c);
            if (canon != c)
                f.values_[p * static_cast<std::size_t>(f.ncomp_) + static_cast<std::size_t>(c)] =
                    f.values_[p * static_cast<std::size_t>(f.ncomp_) + static_cast<std::size_t>(canon)];
        }
    }
    return f;
}

TensorField TensorField::from_dense_values(GridPtr grid, FieldKind kind,
                                           std::vector<double> values) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "null grid");
    int n = grid->dim();
    int ncomp = dense_component_count(kind, n);
    require(values.size() == grid->point_count() * static_cast<std::size_t>(ncomp),
            ErrorCode::Dimension, "value count does not match grid and field kind");
    TensorField f(grid, kind);
    f.values_ = std::move(values);
    if (symmetric_pair_slot(kind) >= 0) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (std::size_t p = 0; p < grid->point_count(); ++p) {
            for (int c = 0; c < ncomp; ++c) {
                int canon = canonical_dense(kind, n, c);
                if (canon == c) continue;
                if (f.at(p, c) != f.at(p, canon)) {
                    grid->unflatten(p, idx);
                    std::vector<double> x(static_cast<std::size_t>(n));
                    grid->point_of_flat(p, x);
                    throw Error(ErrorCode::InvalidArgument,
                                "asymmetric data for symmetric field kind at point " +
                                    point_string(x) + " (component " +
                                    component_name(kind, n, canon) + ")");
                }
            }
        }
    }
    return f;
}

TensorField TensorField::zeros(GridPtr grid, FieldKind kind) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "null grid");
    return TensorField(std::move(grid), kind);
}

TensorField TensorField::build(GridPtr grid, FieldKind kind,
                               const std::function<void(std::size_t, std::span<const double>,
                                                        std::span<double>)>& fn) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "null grid");
    TensorField f(std::move(grid), kind);
    std::vector<double> x(static_cast<std::size_t>(f.dim()));
    for (std::size_t p = 0; p < f.grid_->point_count(); ++p) {
        f.grid_->point_of_flat(p, x);
        fn(p, x,
           {f.values_.data() + p * static_cast<std::size_t>(f.ncomp_),
            static_cast<std::size_t>(f.ncomp_)});
    }
    return f;
}

const Expr& TensorField::backing(int comp) const {
    require(expression_backed(), ErrorCode::InvalidArgument,
            "field has no expression backing");
    return backing_[static_cast<std::size_t>(comp)];
}

double TensorField::eval(std::span<const double> x, int comp) const {
    require(expression_backed(), ErrorCode::InvalidArgument,
            "off-grid evaluation requires expression backing");
    return backing_[static_cast<std::size_t>(comp)].eval(x);
}

double TensorField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

// ---------------------------------------------------------------------------
// Finite differences

TensorField fd_partial(const TensorField& field, int axis) {
    const GridPtr& grid = field.grid();
    int n = grid->dim();
    require(axis >= 1 && axis <= n, ErrorCode::InvalidArgument,
            "derivative axis out of range");
    int a = axis - 1;

    if (field.expression_backed()) {
        int nunique = unique_component_count(field.kind(), n);
        std::vector<Expr> dexprs;
        dexprs.reserve(static_cast<std::size_t>(nunique));
        for (int u = 0; u < nunique; ++u) {
            int c = unique_to_dense(field.kind(), n, u);
            dexprs.push_back(field.backing(c).derivative(axis));
        }
        return TensorField::sample(grid, field.kind(), dexprs);
    }

    int m = grid->counts()[static_cast<std::size_t>(a)];
    double h = grid->spacing()[static_cast<std::size_t>(a)];
    // stride of the axis in flattened storage
    std::size_t stride = 1;
    for (int k = n - 1; k > a; --k)
        stride *= static_cast<std::size_t>(grid->counts()[static_cast<std::size_t>(k)]);

    std::vector<int> idx(static_cast<std::size_t>(n));
    return TensorField::build(grid, field.kind(), [&](std::size_t p, std::span<const double>,
                                                      std::span<double> out) {
        grid->unflatten(p, idx);
        int i = idx[static_cast<std::size_t>(a)];
        for (int c = 0; c < field.ncomp(); ++c) {
            double d;
            if (i > 0 && i < m - 1) {
                d = (field.at(p + stride, c) - field.at(p - stride, c)) / (2.0 * h);
            } else if (i == 0) {
                d = (-3.0 * field.at(p, c) + 4.0 * field.at(p + stride, c) -
                     field.at(p + 2 * stride, c)) /
                    (2.0 * h);
            } else {
                d = (3.0 * field.at(p, c) - 4.0 * field.at(p - stride, c) +
                     field.at(p - 2 * stride, c)) /
                    (2.0 * h);
            }
            out[static_cast<std::size_t>(c)] = d;
        }
    });
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate_interior(const TensorField& field) {
    require(field.kind() == FieldKind::Scalar, ErrorCode::InvalidArgument,
            "interior quadrature requires a scalar field");
    const Grid& grid = *field.grid();
    int n = grid.dim();
    std::vector<int> idx(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
        grid.unflatten(p, idx);
        double w = 1.0;
        for (int k = 0; k < n; ++k) w *= grid.simpson_weight(k, idx[static_cast<std::size_t>(k)]);
        sum += w * field.at(p, 0);
    }
    return sum;
}

double integrate_boundary(const Grid& grid, const BoundaryIntegrand& fn) {
    int n = grid.dim();
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int side = -1; side <= 1; side += 2) {
            int pinned = (side < 0) ? 0 : grid.counts()[static_cast<std::size_t>(a)] - 1;
            for (std::size_t p = 0; p < grid.point_count(); ++p) {
                grid.unflatten(p, idx);
                if (idx[static_cast<std::size_t>(a)] != pinned) continue;
                double w = 1.0;
                for (int k = 0; k < n; ++k) {
                    if (k == a) continue;
                    w *= grid.simpson_weight(k, idx[static_cast<std::size_t>(k)]);
                }
                grid.point_of_flat(p, x);
                total += w * fn(idx, x, a + 1, side);
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Metric checks

void check_riemannian(const TensorField& g) {
    require(g.kind() == FieldKind::Metric, ErrorCode::InvalidArgument,
            "riemannian check requires a metric field");
    int n = g.dim();
    std::vector<double> a(static_cast<std::size_t>(n * n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < g.grid()->point_count(); ++p) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[static_cast<std::size_t>(i * n + j)] = g.at(p, g.comp2(i, j));
        // Cholesky succeeds iff all leading principal minors are positive
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j <= i && ok; ++j) {
                double s = a[static_cast<std::size_t>(i * n + j)];
                for (int k = 0; k < j; ++k)
                    s -= a[static_cast<std::size_t>(i * n + k)] *
                         a[static_cast<std::size_t>(j * n + k)];
                if (i == j) {
                    if (s <= 0.0) { ok = false; break; }
                    a[static_cast<std::size_t>(i * n + j)] = std::sqrt(s);
                } else {
                    a[static_cast<std::size_t>(i * n + j)] =
                        s / a[static_cast<std::size_t>(j * n + j)];
                }
            }
        }
        if (!ok) {
            g.grid()->point_of_flat(p, x);
            throw Error(ErrorCode::SingularMetric,
                        "metric is not positive definite at point " + point_string(x));
        }
    }
}

double inverse_pair_residual(const TensorField& g, const TensorField& ginv) {
    require(g.kind() == FieldKind::Metric && ginv.kind() == FieldKind::InverseMetric,
            ErrorCode::InvalidArgument, "expected a metric / inverse-metric pair");
    require(g.grid() == ginv.grid(), ErrorCode::InvalidArgument,
            "fields must share a grid");
    int n = g.dim();
    double worst = 0.0;
    for (std::size_t p = 0; p < g.grid()->point_count(); ++p) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += g.at(p, g.comp2(i, k)) * ginv.at(p, ginv.comp2(k, j));
                worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// CSV output

std::string csv_string(const TensorField& field) {
    const Grid& grid = *field.grid();
    int n = grid.dim();
    std::string out;
    for (int k = 1; k <= n; ++k) out += "i" + std::to_string(k) + ",";
    for (int k = 1; k <= n; ++k) out += "x" + std::to_string(k) + ",";
    auto names = field.names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        out += names[c];
        out += (c + 1 < names.size()) ? "," : "\n";
    }
    int nunique = unique_component_count(field.kind(), n);
    std::vector<int> udense(static_cast<std::size_t>(nunique));
    for (int u = 0; u < nunique; ++u)
        udense[static_cast<std::size_t>(u)] = unique_to_dense(field.kind(), n, u);

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
        grid.unflatten(p, idx);
        grid.point_of_flat(p, x);
        for (int k = 0; k < n; ++k) {
            out += std::to_string(idx[static_cast<std::size_t>(k)]);
            out += ',';
        }
        for (int k = 0; k < n; ++k) {
            format17(out, x[static_cast<std::size_t>(k)]);
            out += ',';
        }
        for (int u = 0; u < nunique; ++u) {
            format17(out, field.at(p, udense[static_cast<std::size_t>(u)]));
            out += (u + 1 < nunique) ? "," : "\n";
        }
    }
    return out;
}

void write_csv(const TensorField& field, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
    f << csv_string(field);
    require(f.good(), ErrorCode::Io, "write failed for '" + path + "'");
}

} // namespace riemoc
