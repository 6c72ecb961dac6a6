#ifndef RIEMOC_CORE_GRID_HPP
#define RIEMOC_CORE_GRID_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"

namespace riemoc {

/// Axis-aligned box [x0, x1] in R^n. x1[k] > x0[k] for every axis.
struct Domain {
    int n = 0;
    std::vector<double> x0;
    std::vector<double> x1;

    static Domain create(std::span<const double> lower, std::span<const double> upper);
};

/// Per-axis sample counts. Every count must be odd and >= 3 so that
/// composite Simpson quadrature applies uniformly.
struct GridSpec {
    std::vector<int> m;
};

/// Immutable uniform lattice over a Domain. Storage order of flattened
/// indices is row-major with the last axis fastest; all reductions in this
/// library run in that fixed order.
class Grid {
public:
    Grid(Domain domain, GridSpec spec); // validates; names the offending axis

    int dim() const { return domain_.n; }
    const Domain& domain() const { return domain_; }
    const std::vector<int>& counts() const { return spec_.m; }
    const std::vector<double>& spacing() const { return h_; }
    std::size_t point_count() const { return npoints_; }

    std::size_t flatten(std::span<const int> idx) const;
    void unflatten(std::size_t flat, std::span<int> idx) const;

    /// x[k] = x0[k] + idx[k] * h[k]; throws on out-of-range indices.
    void point(std::span<const int> idx, std::span<double> x) const;
    std::vector<double> point(std::span<const int> idx) const;
    void point_of_flat(std::size_t flat, std::span<double> x) const;

    /// Composite-Simpson weight along one axis: (h/3) * {1,4,2,...,4,1}.
    double simpson_weight(int axis, int i) const;

private:
    Domain domain_;
    GridSpec spec_;
    std::vector<double> h_;
    std::size_t npoints_ = 0;
    std::vector<std::size_t> stride_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const Domain& domain, const GridSpec& spec);

// ---------------------------------------------------------------------------

/// Index signature of a stored tensor field. The tuple order matches the
/// written index order of the object it stores.
enum class FieldKind {
    Scalar,          // f
    Vector,          // X^i
    Metric,          // g_ij, symmetric
    InverseMetric,   // g^ij, symmetric
    Connection,      // Gamma^k_ij, symmetric in (i,j)
    CostateLower,    // p^k_ij, symmetric in (i,j)
    CostateUpperSym, // p^ijk, symmetric in (i,j)
    CostateUpperRaw, // lambda^ijk, no symmetry
    Curvature,       // R_ijkl, no enforced symmetry
};

int field_rank(FieldKind kind);
/// -1 when the kind carries no symmetric pair, else the first slot of the pair.
int symmetric_pair_slot(FieldKind kind);
int dense_component_count(FieldKind kind, int n);
int unique_component_count(FieldKind kind, int n);
/// Column labels of the unique components, in canonical (lexicographic,
/// upper-triangle) order; also the expected input order everywhere.
std::vector<std::string> component_names(FieldKind kind, int n);
/// Dense component index of the u-th unique component.
int unique_to_dense(FieldKind kind, int n, int u);

/// Grid-sampled tensor field, immutable after construction. Symmetric kinds
/// store full dense components with the symmetry holding exactly. Fields
/// built from expressions keep the expressions, enabling exact off-grid
/// evaluation and exact differentiation.
class TensorField {
public:
    /// Evaluate one expression per unique component at every grid point.
    /// Evaluation failures name the point and component.
    static TensorField sample(GridPtr grid, FieldKind kind, std::span<const Expr> unique_exprs);

    /// Dense per-point values (point-major). Asymmetric data for a symmetric
    /// kind is rejected, not symmetrized.
    static TensorField from_dense_values(GridPtr grid, FieldKind kind,
                                         std::vector<double> values);

    static TensorField zeros(GridPtr grid, FieldKind kind);

    /// Internal builder: fn fills the dense component vector of one point.
    /// Callers are trusted to respect the kind's symmetry.
    static TensorField build(GridPtr grid, FieldKind kind,
                             const std::function<void(std::size_t flat,
                                                      std::span<const double> x,
                                                      std::span<double> comps)>& fn);

    const GridPtr& grid() const { return grid_; }
    FieldKind kind() const { return kind_; }
    int dim() const { return grid_->dim(); }
    int ncomp() const { return ncomp_; }

    double at(std::size_t flat, int comp) const {
        return values_[flat * static_cast<std::size_t>(ncomp_) + static_cast<std::size_t>(comp)];
    }
    std::span<const double> at(std::size_t flat) const {
        return {values_.data() + flat * static_cast<std::size_t>(ncomp_),
                static_cast<std::size_t>(ncomp_)};
    }

    // 0-based tuple component accessors for ranks 1..4.
    int comp1(int i) const { return i; }
    int comp2(int i, int j) const { return i * dim() + j; }
    int comp3(int a, int b, int c) const { return (a * dim() + b) * dim() + c; }
    int comp4(int a, int b, int c, int d) const {
        return ((a * dim() + b) * dim() + c) * dim() + d;
    }

    bool expression_backed() const { return !backing_.empty(); }
    const Expr& backing(int comp) const;

    /// Off-grid evaluation through the expression backing.
    double eval(std::span<const double> x, int comp) const;

    /// max over points and components of |v| (fixed reduction order).
    double max_abs() const;

    std::vector<std::string> names() const { return component_names(kind_, dim()); }

private:
    TensorField(GridPtr grid, FieldKind kind);

    GridPtr grid_;
    FieldKind kind_;
    int ncomp_ = 0;
    std::vector<double> values_;  // point-major
    std::vector<Expr> backing_;   // empty, or one per dense component
};

/// d(field)/dx^axis (1-based). Expression-backed fields differentiate
/// symbolically; grid-only fields use 2nd-order central differences in the
/// interior and 2nd-order one-sided stencils on the faces.
TensorField fd_partial(const TensorField& field, int axis);

/// Composite-Simpson tensor-product quadrature of a scalar field over the
/// whole domain. Deterministic summation in storage order.
double integrate_interior(const TensorField& field);

/// Integrand evaluated on one boundary face: full grid multi-index (face
/// axis pinned), coordinates, 1-based face axis, side -1/+1 (the outward
/// Euclidean normal covector is side * e_axis).
using BoundaryIntegrand = std::function<double(
    std::span<const int> idx, std::span<const double> x, int axis, int side)>;

/// Sum of composite-Simpson integrals over the 2n axis-aligned faces.
/// For n = 1 each endpoint carries measure 1.
double integrate_boundary(const Grid& grid, const BoundaryIntegrand& fn);

/// Leading principal minors > 0 at every point (error names the first
/// offending point).
void check_riemannian(const TensorField& g);

/// max over points of |g_is g^sj - delta_i^j|.
double inverse_pair_residual(const TensorField& g, const TensorField& ginv);

/// Grid CSV: header `i1,...,in,x1,...,xn,<comp>...`, unique components in
/// canonical order, floats with 17 significant digits, rows in storage order.
void write_csv(const TensorField& field, const std::string& path);
std::string csv_string(const TensorField& field);

} // namespace riemoc

#endif
