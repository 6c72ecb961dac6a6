#ifndef RIEMOC_CORE_CONTROL_HPP
#define RIEMOC_CORE_CONTROL_HPP

#include <cstdint>
#include <map>
#include <optional>

#include "evolution.hpp"
#include "geometry.hpp"
#include "report.hpp"

namespace riemoc {

enum class Direction { Maximize, Minimize };
enum class BolzaKind { Divergence, Laplacian };
enum class BoundarySign { Paper, Derived };

/// Flux-type cost data: the fixed vector field X (divergence problem) or
/// the fixed scalar f (Laplacian problem).
struct BolzaSpec {
    BolzaKind kind = BolzaKind::Divergence;
    TensorField field; // Vector for Divergence, Scalar for Laplacian
    Direction direction = Direction::Maximize;
};

/// Costate ansatz p^k_ij = C^k g_ij with its attached solenoidal residual.
struct CostateAnsatz {
    TensorField C;       // Vector
    TensorField costate; // CostateLower
    double solenoidal_residual = 0.0;
};

struct BangBangResult {
    TensorField gamma;     // Connection, components in {-1, 0, 1}
    TensorField eps;       // Vector of switching signs per point
    TensorField arbitrary; // Connection-shaped mask, 1 where the component is free
};

struct BruteForceResult {
    double value = 0.0;
    long long argmax_count = 0;
    std::vector<double> first_argmax; // dense n^3 connection components
};

/// Reduced control Hamiltonian at one point, running cost X (zero for the
/// flux problems). Primal: X + g_is Gamma^s_jk p^ijk with p upper-symmetric;
/// dual: X - g^is Gamma^j_sk p^k_ij with p lower.
double reduced_hamiltonian(int n, EvolutionMode mode, std::span<const double> g_or_inv,
                           std::span<const double> gamma, std::span<const double> p,
                           double running_cost = 0.0);

/// Hamiltonian of the ansatz p = C (x) g, which contracts to the trace form
/// -C^k Gamma^s_ks (dual) / +C^k Gamma^s_ks (primal), independent of g.
/// The bang-bang value, the brute-force oracle and the certificate all
/// evaluate through this one function so comparisons are exact.
double hamiltonian_trace(int n, EvolutionMode mode, std::span<const double> C,
                         std::span<const double> gamma);

/// Pointwise reduced Hamiltonian of (g_or_inv, Gamma, p) as a scalar field
/// (running cost zero). Dual mode expects an InverseMetric and a lower
/// costate; primal mode a Metric and an upper-symmetric costate.
TensorField hamiltonian_field(const TensorField& g_or_inv, const TensorField& gamma,
                              const TensorField& p, EvolutionMode mode);

/// Pointwise trace Hamiltonian of the ansatz, -C^k Gamma^s_ks (dual) or
/// +C^k Gamma^s_ks (primal), as a scalar field.
TensorField hamiltonian_trace_field(const TensorField& C, const TensorField& gamma,
                                    EvolutionMode mode);

/// p^k_ij = C^k g_ij, with the solenoidal residual of C attached.
CostateAnsatz costate_from_C(const TensorField& C, const TensorField& g);

/// Upper variant of the same ansatz: p^ijk = C^k g^ij (CostateUpperSym).
TensorField costate_upper_from_C(const TensorField& C, const TensorField& ginv);

/// max over the grid of |d_k C^k| (Euclidean divergence).
double solenoidal_residual(const TensorField& C);

/// How far the connection leaves the admissible box [-1, 1]: zero iff every
/// component is admissible.
double box_violation(const TensorField& gamma);

/// Pointwise bang-bang synthesis: eps = sgn(-C) when maximizing, sgn(C)
/// when minimizing (|C| < 1e-12 counts as zero). Components with zero
/// switching coefficient are arbitrary: emitted as 0 and flagged.
BangBangResult bang_bang_synthesize(const TensorField& C, Direction direction);

/// Enumerates all symmetric connections with components in {-1, 0, 1}
/// (3^(n^2(n+1)/2) vertices, n <= 3) and maximizes the dual trace
/// Hamiltonian for the costate ansatz with C at one point.
BruteForceResult brute_force_hamiltonian_max(std::span<const double> C, int n);

struct FluxValues {
    double interior = 0.0;
    double boundary = 0.0;
};

/// Interior and boundary quadratures of the flux functional:
/// divergence: int Div X sqrt(g) dx  vs  int X^i n_i sqrt(g) dsigma;
/// laplacian:  int Lap f sqrt(g) dx  vs  int g^ij f_i n_j sqrt(g) dsigma.
FluxValues total_flux_functional(const BolzaSpec& spec, const TensorField& g);

/// Transversality residual on the boundary. Divergence kind:
/// max |n_k (C^k - sqrt(g) X^k)| (Paper) or |n_k (C^k + sqrt(g) X^k)|
/// (Derived, sign from differentiating the boundary cost). Laplacian kind:
/// max over (i,j) of |n_k C^k g_ij - n_k g^kl (f_i g_lj + f_j g_li - f_l g_ij) sqrt(g)|
/// (identical under both conventions).
double boundary_residual(const BolzaSpec& spec, const TensorField& C,
                         const TensorField& g, BoundarySign sign);

struct CertificateOptions {
    EvolutionMode mode = EvolutionMode::Dual;
    int samples = 1000;
    std::uint64_t seed = 1;
    BoundarySign sign = BoundarySign::Paper;
    std::map<std::string, double> tolerances; // overrides per clause name
};

/// Checkable content of the Riemannian maximum principle for a candidate
/// (g*, Gamma*, p* = C (x) g*): evolution residual, adjoint residual,
/// sampled + vertex Hamiltonian gap, boundary residual, solenoidal residual.
Report mp_certificate(const TensorField& g, const TensorField& ginv,
                      const TensorField& gamma, const CostateAnsatz& ansatz,
                      const BolzaSpec& spec, const CertificateOptions& options);

} // namespace riemoc

#endif
