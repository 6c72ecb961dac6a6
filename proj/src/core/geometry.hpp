#ifndef RIEMOC_CORE_GEOMETRY_HPP
#define RIEMOC_CORE_GEOMETRY_HPP

#include "grid.hpp"

namespace riemoc {

struct MetricDecomposition {
    TensorField inverse;  // InverseMetric
    TensorField det;      // Scalar
    TensorField sqrt_det; // Scalar
};

/// Pointwise inverse, determinant and sqrt(det) of a metric field.
/// Requires det > 0 at every grid point; the error names the first
/// offending point. Expression-backed input (n <= 3) yields
/// expression-backed outputs via adjugate/determinant formulas.
MetricDecomposition metric_inverse_det(const TensorField& g);

/// Pointwise inverse of a Metric (-> InverseMetric) or InverseMetric
/// (-> Metric). Only needs det != 0, so semi-Riemannian input is fine.
TensorField pointwise_inverse(const TensorField& a);

/// Levi-Civita connection Gamma^k_ij = 1/2 g^{ks} (d_i g_sj + d_j g_si - d_s g_ij).
/// Derivatives are symbolic when g is expression-backed, else central
/// differences.
TensorField christoffel_from_metric(const TensorField& g);

/// Lowered Riemann tensor of (g, Gamma), fixed convention:
///     R^s_{jkl} = d_k Gamma^s_{lj} - d_l Gamma^s_{kj}
///               + Gamma^s_{kt} Gamma^t_{lj} - Gamma^s_{lt} Gamma^t_{kj},
///     R_ijkl = g_is R^s_{jkl}.
/// Antisymmetry in the last pair (k,l) holds by construction.
TensorField riemann_lowered(const TensorField& g, const TensorField& gamma);

/// Integrability diagnostics: the symmetrized-curvature residual
/// max |R_ijkl + R_jikl| and the direct mixed-partial defect
/// max |d_l(rhs_ijk) - d_k(rhs_ijl)| of the compatibility right side
/// rhs_ijk = g_is Gamma^s_jk + g_js Gamma^s_ik. Both vanish along
/// integrable pairs; neither depends on a curvature sign convention.
struct CicResiduals {
    double curvature = 0.0;
    double mixed_partial = 0.0;

    double max() const { return curvature > mixed_partial ? curvature : mixed_partial; }
};

CicResiduals cic_residuals(const TensorField& g, const TensorField& gamma);

/// The larger of the two diagnostics.
double cic_residual(const TensorField& g, const TensorField& gamma);

/// Div X = (1/sqrt g) d_i (sqrt g X^i). Expression-backed inputs produce an
/// expression-backed scalar (exact pointwise values).
TensorField riemannian_divergence(const TensorField& X, const TensorField& g);

/// Laplace-Beltrami: (1/sqrt g) d_i (sqrt g g^{ij} d_j f).
TensorField laplace_beltrami(const TensorField& f, const TensorField& g);

/// d_i (sqrt g X^i), the density integrated by the total-divergence
/// functional (equals Div X * sqrt g).
TensorField flux_density_divergence(const TensorField& X, const TensorField& g);

/// d_i (sqrt g g^{ij} d_j f), the density of the total-Laplacian functional.
TensorField flux_density_laplacian(const TensorField& f, const TensorField& g);

} // namespace riemoc

#endif
