#ifndef CHFILM_AVERAGING_HPP
#define CHFILM_AVERAGING_HPP

#include <functional>

#include "chfilm/bulk_solver.hpp"
#include "chfilm/surface_geometry.hpp"
#include "chfilm/surface_solver.hpp"

namespace chfilm {

// Weighted thin-direction average and its calculus. The trapezoid rule in s3
// shares its weights with the bulk mass, which makes the pairing identity
// with constant extensions exact at the discrete level.
class AveragingContext {
public:
    AveragingContext(const BulkOperators& bulk, const SurfaceGeometryCache& surf);

    const BulkOperators& bulk() const { return *bulk_; }
    const SurfaceGeometryCache& surface() const { return *surf_; }

    // M_eps u (s') = (1/eps) integral_0^eps U(s', s3) J(s', s3) ds3.
    SurfaceField average(const BulkField& u) const;

    // |(u, eta-bar)_{Omega_eps} - eps (g M_eps u, eta)_Gamma| over both sides'
    // shared quadrature; exact up to round-off.
    double pairing_residual(const BulkField& u, const SurfaceField& eta) const;

    // Right-hand side of the tangential-gradient identity
    // grad_Gamma M_eps u = M_eps(B grad u) + M_eps((dnu u + u f_J) b_eps)
    //                      + M_eps(u b_J),
    // returned as the two covariant chart components (t_i . grad).
    std::pair<SurfaceField, SurfaceField> average_tangential_gradient(
        const BulkField& u) const;

    // Chart-difference gradient of a surface field, same components.
    std::pair<SurfaceField, SurfaceField> chart_gradient(const SurfaceField& v) const;

    // zeta_Delta = M_eps(Lap u) - A_g M_eps u, from the defining identity.
    SurfaceField residual_zeta_delta(const BulkField& u,
                                     const SurfaceOperators& surf_ops) const;

    // zeta_G = M_eps(G(u)) - G(M_eps u), the nonlinear commutator.
    SurfaceField residual_zeta_G(const BulkField& u,
                                 const std::function<double(double)>& G) const;
    SurfaceField residual_zeta_F(const BulkField& u, const Potential& F) const;

    // Normal derivative (1/g) d_{s3} U at a node (centered inside, one-sided
    // second order at the s3 boundaries).
    double normal_derivative(const BulkField& u, int i, int j, int k) const;

    // Ambient gradient reconstructed from chart differences,
    // grad u = [grad_s Psi]^{-1} grad_s U.
    Vec3 ambient_gradient(const BulkField& u, int i, int j, int k) const;

private:
    const BulkOperators* bulk_;
    const SurfaceGeometryCache* surf_;
};

}  // namespace chfilm

#endif
