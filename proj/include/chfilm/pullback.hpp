#ifndef CHFILM_PULLBACK_HPP
#define CHFILM_PULLBACK_HPP

#include <array>
#include <vector>

#include "chfilm/geometry.hpp"

namespace chfilm {

// Vertex-centered reference box [0,1)^2 x [0, eps]: n1 x n2 periodic nodes
// in s', n3 + 1 layers in s3. Node (i, j, k) sits at (i h1, j h2, k h3).
struct ReferenceGrid {
    int n1 = 0, n2 = 0, n3 = 0;
    double eps = 0.0;

    ReferenceGrid() = default;
    ReferenceGrid(int n1, int n2, int n3, double eps);

    double h1() const { return 1.0 / n1; }
    double h2() const { return 1.0 / n2; }
    double h3() const { return eps / n3; }
    int layers() const { return n3 + 1; }
    std::size_t num_nodes() const {
        return static_cast<std::size_t>(n1) * n2 * (n3 + 1);
    }
    std::size_t num_columns() const { return static_cast<std::size_t>(n1) * n2; }
    std::size_t node(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n2 + j) * n1 + i;
    }
    std::size_t column(int i, int j) const {
        return static_cast<std::size_t>(j) * n1 + i;
    }
    // Trapezoid weight of layer k (1 in the interior, 1/2 at the ends).
    double layer_weight(int k) const { return (k == 0 || k == n3) ? 0.5 : 1.0; }
};

// Symmetric 3x3 stored as (11, 22, 33, 12, 13, 23).
using Sym3 = std::array<double, 6>;

inline Vec3 sym3_apply(const Sym3& A, const Vec3& x) {
    return Vec3(A[0] * x[0] + A[3] * x[1] + A[4] * x[2],
                A[3] * x[0] + A[1] * x[1] + A[5] * x[2],
                A[4] * x[0] + A[5] * x[1] + A[2] * x[2]);
}

// Per-node data of the box-to-shell map: determinant weight, elliptic
// coefficient matrix, thin-direction Jacobian, and per-column surface data.
struct PullbackCoefficients {
    ReferenceGrid grid;

    std::vector<double> detjac;   // det grad Psi_eps, per node
    std::vector<Sym3> aeps;       // A_eps = detjac * G^{-1}, per node
    std::vector<double> jval;     // J(psi(s'), r_eps(s)), per node
    std::vector<double> dval;     // r_eps(s) (signed distance d), per node
    std::vector<Mat3> inv_grad_psi;  // [grad_s Psi]^{-1}, rows-of-partials convention

    std::vector<double> gval, g0val, g1val;  // per column
    std::vector<double> sqrt_det_theta;      // per column

    double min_rayleigh = 0.0;       // smallest sampled A_eps eigenvalue
    double max_det_mismatch = 0.0;   // relative |det 3x3 - closed form|
};

// Psi_eps(s) = psi(s') + r_eps(s) nu(s'), r_eps = (eps - s3) g0 + s3 g1.
Vec3 map_psi(const SurfaceChart& chart, const ThicknessProfile& profile,
             double eps, double s1, double s2, double s3);

// Recomputes s3 from r_eps along the normal line and returns |recovered - s3|.
double inverse_check(const SurfaceChart& chart, const ThicknessProfile& profile,
                     double eps, double s1, double s2, double s3);

// Builds all per-node coefficient tables. Throws GeometryError if the
// determinant is not positive somewhere (eps too large for the chart).
PullbackCoefficients build_coefficients(const SurfaceChart& chart,
                                        const ThicknessProfile& profile,
                                        const ReferenceGrid& grid);

}  // namespace chfilm

#endif
