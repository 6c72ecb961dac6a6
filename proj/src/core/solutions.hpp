#ifndef RIEMOC_CORE_SOLUTIONS_HPP
#define RIEMOC_CORE_SOLUTIONS_HPP

#include <array>
#include <functional>

#include "grid.hpp"

namespace riemoc {

/// Euclidean-conformal closed form: constant connection
///     Gamma^k_ij = delta^k_i eps_j + delta^k_j eps_i - delta_ij eps^k
/// paired with the inverse metric g^ij = K delta^ij exp(-2 eps_l x^l),
/// a soliton solution of the dual compatibility system.
struct ConformalPair {
    TensorField gamma; // Connection, constant entries in {-1, 0, 1}
    TensorField g_inv; // InverseMetric, expression-backed
};

ConformalPair conformal_pair(const GridPtr& grid, std::span<const int> eps, double K);

/// Primal metric of the same pair: g_ij = (1/K) delta_ij exp(+2 eps_l x^l).
TensorField conformal_primal_metric(const GridPtr& grid, std::span<const int> eps, double K);

/// Rank-one closed form: Gamma^k_ij = eps^k eps_i eps_j with
///     g^ij = [alpha e^{-2n phi} + (alpha^i + alpha^j)/2 e^{-n phi}] eps^i eps^j
/// (no summation), phi = eps_k x^k. Requires sum(alpha^i) = 0. The result
/// is at best semi-Riemannian; `exact` is false when some eps^i = 0 (the
/// closed form no longer solves the system then).
struct RankOnePair {
    TensorField gamma;
    TensorField g_upper; // symmetric (2,0), expression-backed
    bool exact = true;
    bool semi_riemannian_candidate = true;
};

RankOnePair rank_one_pair(const GridPtr& grid, std::span<const int> eps, double alpha,
                          std::span<const double> alpha_i);

/// Residual of the dual compatibility system for an expression-backed pair:
///     max |d_k g^ij + (g^is Gamma^j_sk + g^js Gamma^i_sk)|.
/// With `plus_sign_intermediate` the bracket enters with the opposite sign,
/// matching the displayed intermediate form of the rank-one derivation; a
/// large residual there documents that the displayed sign contradicts the
/// system the final metric actually solves.
double verify_closed_form(const TensorField& g_upper, const TensorField& gamma,
                          bool plus_sign_intermediate = false);

// ---------------------------------------------------------------------------
// Pipe geometry on M = D^1 x (0,1), chart (rho, theta, z) in (0,1]x(0,2pi)x(0,1)

enum class PipeChart { Cartesian, Cylindrical };

/// Flow field on the pipe, evaluated in its own chart. Transformed flows
/// compose the chart maps functionally, so round trips are exact away from
/// the axis rho = 0 (where Cartesian->cylindrical data is undefined).
class PipeFlow {
public:
    using Component = std::function<double(const std::array<double, 3>&)>;

    static PipeFlow from_exprs(PipeChart chart, const Expr& c1, const Expr& c2,
                               const Expr& c3);

    PipeChart chart() const { return chart_; }

    /// Components of the flow at a point of its own chart.
    std::array<double, 3> eval(const std::array<double, 3>& p) const;

    friend PipeFlow field_transform(const PipeFlow& flow, PipeChart to);

private:
    PipeChart chart_ = PipeChart::Cartesian;
    std::array<Component, 3> comps_;
};

/// Chart change per the cylindrical coordinate maps. The radial component
/// transforms as R = X cos(theta) + Y sin(theta); the angular component is
/// the coordinate-basis coefficient T = (-X sin(theta) + Y cos(theta))/rho,
/// which inverts exactly through X = R x/rho - T y, Y = R y/rho + T x.
PipeFlow field_transform(const PipeFlow& flow, PipeChart to);

/// Wall sign S(theta, z) = sgn(R(1, theta, z)) = sgn<N, F> on the boundary.
class PipeMetric {
public:
    PipeMetric(const PipeFlow& flow, double K);

    double wall_sign(double theta, double z) const;

    /// Metric components (upper triangle, row-major 11,12,13,22,23,33) in
    /// the requested chart: cylindrical K e^{2 S rho} I, Cartesian
    /// K e^{2 S sqrt(x^2+y^2)} diag(1, x^2+y^2, 1). S is evaluated on the
    /// wall point above (theta, z) and extended radially constant inward.
    std::array<double, 6> components(PipeChart chart, const std::array<double, 3>& p) const;

    double conformal_scale() const { return K_; }

private:
    PipeFlow cylindrical_;
    double K_;
};

/// Triangulated wall surface r(theta, z) = exp(a S(theta, z)) with its
/// sign/radius table on the (theta, z) lattice.
struct PipeMesh {
    int n_theta = 0;
    int n_z = 0;
    std::vector<std::array<double, 3>> vertices;  // n_theta * n_z, theta-major
    std::vector<std::array<int, 3>> triangles;    // 0-based, seam closed
    std::vector<double> sign;                      // per vertex
    std::vector<double> radius;                    // per vertex
};

PipeMesh pipe_mesh(const PipeFlow& flow, double amplitude, int n_theta, int n_z);

/// Wavefront-style text mesh: `v x y z` lines then `f i j k` (1-based).
std::string obj_string(const PipeMesh& mesh);
void write_obj(const PipeMesh& mesh, const std::string& path);

/// CSV `theta,z,S,r` in vertex order.
std::string sign_csv_string(const PipeMesh& mesh);
void write_sign_csv(const PipeMesh& mesh, const std::string& path);

} // namespace riemoc

#endif
