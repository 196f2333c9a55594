#ifndef CHFILM_SURFACE_GEOMETRY_HPP
#define CHFILM_SURFACE_GEOMETRY_HPP

#include <vector>

#include "chfilm/geometry.hpp"

namespace chfilm {

// Scalar field on the n1 x n2 doubly periodic surface grid.
struct SurfaceField {
    int n1 = 0, n2 = 0;
    std::vector<double> values;

    SurfaceField() = default;
    SurfaceField(int n1, int n2)
        : n1(n1), n2(n2), values(static_cast<std::size_t>(n1) * n2, 0.0) {}

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * n1 + i;
    }
    double& at(int i, int j) { return values[index(i, j)]; }
    double at(int i, int j) const { return values[index(i, j)]; }
};

// Per-node geometric caches shared by the surface solver, the averaging
// operator, and the difference metrics.
class SurfaceGeometryCache {
public:
    SurfaceGeometryCache(const SurfaceChart& chart, const ThicknessProfile& profile,
                         int n1, int n2);

    const SurfaceChart& chart() const { return chart_; }
    const ThicknessProfile& profile() const { return profile_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double h1() const { return 1.0 / n1_; }
    double h2() const { return 1.0 / n2_; }
    std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * n1_ + i;
    }

    std::vector<double> sqrt_det_theta;
    std::vector<double> g, g0, g1;
    std::vector<double> inv_theta11, inv_theta22;  // theta is diagonal for all
                                                   // solver-eligible charts
    std::vector<double> H, K;
    std::vector<Mat3> W;
    std::vector<Vec3> t1, t2, normal;
    std::vector<Vec3> grad_g0, grad_g1;
    std::vector<Vec3> grad_H, grad_K;

    // Area weight of a node: sqrt(det theta) h1 h2.
    double area_weight(std::size_t idx) const {
        return sqrt_det_theta[idx] * h1() * h2();
    }

private:
    SurfaceChart chart_;
    ThicknessProfile profile_;
    int n1_, n2_;
};

}  // namespace chfilm

#endif
