#ifndef RIEMOC_CORE_EVOLUTION_HPP
#define RIEMOC_CORE_EVOLUTION_HPP

#include <vector>

#include "grid.hpp"

namespace riemoc {

enum class EvolutionMode { Primal, Dual };

/// Compatibility evolution of a metric state from the lower corner of the
/// domain. mode Primal integrates
///     d_k g_ij = g_is Gamma^s_jk + g_js Gamma^s_ik
/// for the initial value g(x0) = eta; mode Dual integrates
///     d_k g^ij = -(g^is Gamma^j_sk + g^js Gamma^i_sk)
/// for g^{-1}(x0) = eta.
struct EvolutionProblem {
    EvolutionMode mode = EvolutionMode::Primal;
    TensorField gamma;       // Connection on the target grid
    std::vector<double> eta; // n*n row-major, symmetric
};

/// Right side of the compatibility system at one point. `state` and `out`
/// are n*n row-major; `gamma` is the dense n^3 connection (comp3 layout);
/// `axis` is 0-based. The output is symmetrized exactly.
void compat_rhs(int n, EvolutionMode mode, std::span<const double> state,
                std::span<const double> gamma, int axis, std::span<double> out);

/// Tensor-product RK4 sweep: one grid cell per step, axis 1 first (or the
/// given 0-based axis order). Expression-backed connections are evaluated
/// exactly at half steps; grid-only connections are interpolated linearly
/// along the sweep axis. A component magnitude above 1e100 aborts with an
/// error naming the grid point.
TensorField evolve_metric(const EvolutionProblem& problem);
TensorField evolve_metric(const EvolutionProblem& problem, std::span<const int> axis_order);

/// Max componentwise discrepancy between sweeps in axis order (1,...,n) and
/// (n,...,1). Small iff the integrability conditions hold.
double path_independence_check(const EvolutionProblem& problem);

/// Max over the grid of |d_k g - rhs_k(g, Gamma)| over all components and
/// axes; the pointwise defect of (PDE) / (PDE').
double evolution_residual(const TensorField& g, const TensorField& gamma,
                          EvolutionMode mode);

/// Divergence-summed adjoint residual; the variant is chosen by p's kind:
///   CostateUpperRaw  d_k lam^ijk = -(lam^isk + lam^sik) Gamma^j_sk
///   CostateUpperSym  d_k p^ijk   = -(p^isk Gamma^j_sk + p^jsk Gamma^i_sk)
///   CostateLower     d_k p^k_ij  =  p^k_is Gamma^s_jk + p^k_js Gamma^s_ik
/// Returns max over the grid of |sum_k d_k p - rhs|.
double adjoint_residual(const TensorField& p, const TensorField& gamma);

/// Duality flux: S^k = y_ij p^ijk (or Q^k = y_ij lam^ijk); returns
/// max |d_k S^k| over interior grid points.
double duality_flux_divergence(const TensorField& y, const TensorField& p);

} // namespace riemoc

#endif
