#include "chfilm/averaging.hpp"

#include <cmath>

namespace chfilm {

AveragingContext::AveragingContext(const BulkOperators& bulk,
                                   const SurfaceGeometryCache& surf)
    : bulk_(&bulk), surf_(&surf) {
    if (surf.n1() != bulk.grid().n1 || surf.n2() != bulk.grid().n2)
        throw std::invalid_argument("surface cache does not match the bulk grid");
}

SurfaceField AveragingContext::average(const BulkField& u) const {
    const ReferenceGrid& g = bulk_->grid();
    const auto& c = bulk_->coeffs();
    SurfaceField out(g.n1, g.n2);
    const double scale = g.h3() / g.eps;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            KahanSum s;
            for (int k = 0; k <= g.n3; ++k) {
                const std::size_t p = g.node(i, j, k);
                s.add(g.layer_weight(k) * u.values[p] * c.jval[p]);
            }
            out.at(i, j) = scale * s.value();
        }
    return out;
}

double AveragingContext::pairing_residual(const BulkField& u,
                                          const SurfaceField& eta) const {
    const ReferenceGrid& g = bulk_->grid();
    const auto& mass = bulk_->mass();
    KahanSum lhs;
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const std::size_t p = g.node(i, j, k);
                lhs.add(mass[p] * u.values[p] * eta.at(i, j));
            }
    const SurfaceField avg = average(u);
    KahanSum rhs;
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t q = surf_->index(i, j);
            rhs.add(g.eps * surf_->g[q] * surf_->area_weight(q) * avg.at(i, j) *
                    eta.at(i, j));
        }
    return std::abs(lhs.value() - rhs.value());
}

double AveragingContext::normal_derivative(const BulkField& u, int i, int j,
                                           int k) const {
    const ReferenceGrid& g = bulk_->grid();
    const double h3 = g.h3();
    double du;
    if (k == 0)
        du = (-3.0 * u.at(i, j, 0) + 4.0 * u.at(i, j, 1) - u.at(i, j, 2)) /
             (2.0 * h3);
    else if (k == g.n3)
        du = (3.0 * u.at(i, j, k) - 4.0 * u.at(i, j, k - 1) +
              u.at(i, j, k - 2)) /
             (2.0 * h3);
    else
        du = (u.at(i, j, k + 1) - u.at(i, j, k - 1)) / (2.0 * h3);
    return du / bulk_->coeffs().gval[g.column(i, j)];
}

Vec3 AveragingContext::ambient_gradient(const BulkField& u, int i, int j,
                                        int k) const {
    const ReferenceGrid& g = bulk_->grid();
    const int n1 = g.n1, n2 = g.n2;
    Vec3 grad_s;
    grad_s[0] = (u.at((i + 1) % n1, j, k) - u.at((i + n1 - 1) % n1, j, k)) /
                (2.0 * g.h1());
    grad_s[1] = (u.at(i, (j + 1) % n2, k) - u.at(i, (j + n2 - 1) % n2, k)) /
                (2.0 * g.h2());
    if (k == 0)
        grad_s[2] = (-3.0 * u.at(i, j, 0) + 4.0 * u.at(i, j, 1) -
                     u.at(i, j, 2)) /
                    (2.0 * g.h3());
    else if (k == g.n3)
        grad_s[2] = (3.0 * u.at(i, j, k) - 4.0 * u.at(i, j, k - 1) +
                     u.at(i, j, k - 2)) /
                    (2.0 * g.h3());
    else
        grad_s[2] = (u.at(i, j, k + 1) - u.at(i, j, k - 1)) / (2.0 * g.h3());
    return bulk_->coeffs().inv_grad_psi[g.node(i, j, k)] * grad_s;
}

std::pair<SurfaceField, SurfaceField> AveragingContext::average_tangential_gradient(
    const BulkField& u) const {
    const ReferenceGrid& g = bulk_->grid();
    const auto& c = bulk_->coeffs();
    SurfaceField out1(g.n1, g.n2), out2(g.n1, g.n2);
    const double scale = g.h3() / g.eps;

    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t q = surf_->index(i, j);
            const Vec3 nu = surf_->normal[q];
            const Mat3 P = Mat3::Identity() - nu * nu.transpose();
            const Mat3& W = surf_->W[q];
            const double eps_g0 = g.eps * surf_->g0[q];
            const double eps_g1 = g.eps * surf_->g1[q];
            const double inv_g = 1.0 / surf_->g[q];

            KahanSum s1, s2;
            for (int k = 0; k <= g.n3; ++k) {
                const std::size_t p = g.node(i, j, k);
                const double d = c.dval[p];
                const double Jn = c.jval[p];
                const double uval = u.values[p];
                const Vec3 grad_u = ambient_gradient(u, i, j, k);
                const double dnu = normal_derivative(u, i, j, k);

                const Mat3 B = P - d * W;
                const double f_J = (-surf_->H[q] + 2.0 * d * surf_->K[q]) / Jn;
                const Vec3 b_eps = inv_g * ((d - eps_g0) * surf_->grad_g1[q] +
                                            (eps_g1 - d) * surf_->grad_g0[q]);
                const Vec3 b_J =
                    (d / Jn) * (-surf_->grad_H[q] + d * surf_->grad_K[q]);

                const Vec3 integrand =
                    B * grad_u + (dnu + uval * f_J) * b_eps + uval * b_J;
                const double w = g.layer_weight(k) * Jn;
                s1.add(w * surf_->t1[q].dot(integrand));
                s2.add(w * surf_->t2[q].dot(integrand));
            }
            out1.at(i, j) = scale * s1.value();
            out2.at(i, j) = scale * s2.value();
        }
    return {out1, out2};
}

std::pair<SurfaceField, SurfaceField> AveragingContext::chart_gradient(
    const SurfaceField& v) const {
    const int n1 = v.n1, n2 = v.n2;
    const double h1 = 1.0 / n1, h2 = 1.0 / n2;
    SurfaceField d1(n1, n2), d2(n1, n2);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            d1.at(i, j) = (v.at((i + 1) % n1, j) - v.at((i + n1 - 1) % n1, j)) /
                          (2.0 * h1);
            d2.at(i, j) = (v.at(i, (j + 1) % n2) - v.at(i, (j + n2 - 1) % n2)) /
                          (2.0 * h2);
        }
    return {d1, d2};
}

SurfaceField AveragingContext::residual_zeta_delta(
    const BulkField& u, const SurfaceOperators& surf_ops) const {
    const BulkField lap = bulk_->discrete_laplacian(u);
    const SurfaceField avg_lap = average(lap);
    const SurfaceField ag_avg = surf_ops.apply_Ag(average(u));
    SurfaceField out(avg_lap.n1, avg_lap.n2);
    for (std::size_t q = 0; q < out.values.size(); ++q)
        out.values[q] = avg_lap.values[q] - ag_avg.values[q];
    return out;
}

SurfaceField AveragingContext::residual_zeta_G(
    const BulkField& u, const std::function<double(double)>& G) const {
    BulkField gu = u;
    for (double& x : gu.values) x = G(x);
    const SurfaceField avg_gu = average(gu);
    const SurfaceField avg_u = average(u);
    SurfaceField out(avg_u.n1, avg_u.n2);
    for (std::size_t q = 0; q < out.values.size(); ++q)
        out.values[q] = avg_gu.values[q] - G(avg_u.values[q]);
    return out;
}

SurfaceField AveragingContext::residual_zeta_F(const BulkField& u,
                                               const Potential& F) const {
    return residual_zeta_G(u, [&F](double z) { return F.prime(z); });
}

}  // namespace chfilm
