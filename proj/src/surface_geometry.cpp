#include "chfilm/surface_geometry.hpp"

#include <cmath>

namespace chfilm {

SurfaceGeometryCache::SurfaceGeometryCache(const SurfaceChart& chart,
                                           const ThicknessProfile& profile,
                                           int n1, int n2)
    : chart_(chart), profile_(profile), n1_(n1), n2_(n2) {
    if (!chart.solver_eligible())
        throw GeometryError("surface grid requires a doubly periodic chart");
    if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0)
        throw std::invalid_argument("surface grid: n1, n2 must be even and >= 8");

    const std::size_t n = size();
    sqrt_det_theta.resize(n);
    g.resize(n);
    g0.resize(n);
    g1.resize(n);
    inv_theta11.resize(n);
    inv_theta22.resize(n);
    H.resize(n);
    K.resize(n);
    W.resize(n);
    t1.resize(n);
    t2.resize(n);
    normal.resize(n);
    grad_g0.resize(n);
    grad_g1.resize(n);
    grad_H.resize(n);
    grad_K.resize(n);

    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const double s1 = i * h1();
            const double s2 = j * h2();
            const ChartPoint p = chart.eval(s1, s2);
            const ShapeData sh = chart.shape(s1, s2);
            const ThicknessSample t = profile.eval(chart, s1, s2);
            const std::size_t q = index(i, j);
            if (std::abs(p.metric(0, 1)) > 1e-12 * p.metric(0, 0))
                throw GeometryError("surface stencil assumes a diagonal metric");
            sqrt_det_theta[q] = p.sqrt_det_metric;
            inv_theta11[q] = 1.0 / p.metric(0, 0);
            inv_theta22[q] = 1.0 / p.metric(1, 1);
            g[q] = t.g;
            g0[q] = t.g0;
            g1[q] = t.g1;
            H[q] = sh.H;
            K[q] = sh.K;
            W[q] = sh.W;
            t1[q] = p.t1;
            t2[q] = p.t2;
            normal[q] = p.normal;
            grad_g0[q] = t.grad_g0;
            grad_g1[q] = t.grad_g1;
            chart.curvature_gradients(s1, s2, grad_H[q], grad_K[q]);
        }
    }
}

}  // namespace chfilm
