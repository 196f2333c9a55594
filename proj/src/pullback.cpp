#include "chfilm/pullback.hpp"

#include <cmath>

namespace chfilm {

ReferenceGrid::ReferenceGrid(int n1, int n2, int n3, double eps)
    : n1(n1), n2(n2), n3(n3), eps(eps) {
    if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0)
        throw std::invalid_argument("grid: n1, n2 must be even and >= 8");
    if (n3 < 2) throw std::invalid_argument("grid: n3 must be >= 2");
    if (!(eps > 0.0)) throw std::invalid_argument("grid: eps must be positive");
}

namespace {

double r_eps(const ThicknessSample& t, double eps, double s3) {
    return (eps - s3) * t.g0 + s3 * t.g1;
}

}  // namespace

Vec3 map_psi(const SurfaceChart& chart, const ThicknessProfile& profile,
             double eps, double s1, double s2, double s3) {
    if (s3 < 0.0 || s3 > eps)
        throw GeometryError("map_psi: s3 outside [0, eps]");
    const ChartPoint p = chart.eval(s1, s2);
    const ThicknessSample t = profile.eval(chart, s1, s2);
    return p.position + r_eps(t, eps, s3) * p.normal;
}

double inverse_check(const SurfaceChart& chart, const ThicknessProfile& profile,
                     double eps, double s1, double s2, double s3) {
    const ThicknessSample t = profile.eval(chart, s1, s2);
    const double r = r_eps(t, eps, s3);
    // s3 = (d - eps g0) / g with d the signed offset recovered on the line.
    const double recovered = (r - eps * t.g0) / t.g;
    return std::abs(recovered - s3);
}

PullbackCoefficients build_coefficients(const SurfaceChart& chart,
                                        const ThicknessProfile& profile,
                                        const ReferenceGrid& grid) {
    const double eps_max = max_epsilon(chart, profile);
    if (!(grid.eps <= eps_max))
        throw GeometryError("eps exceeds the tubular-radius bound of the chart");

    PullbackCoefficients c;
    c.grid = grid;
    const std::size_t nn = grid.num_nodes();
    const std::size_t nc = grid.num_columns();
    c.detjac.resize(nn);
    c.aeps.resize(nn);
    c.jval.resize(nn);
    c.dval.resize(nn);
    c.inv_grad_psi.resize(nn);
    c.gval.resize(nc);
    c.g0val.resize(nc);
    c.g1val.resize(nc);
    c.sqrt_det_theta.resize(nc);

    double min_rayleigh = std::numeric_limits<double>::max();
    double max_mismatch = 0.0;

    for (int j = 0; j < grid.n2; ++j) {
        for (int i = 0; i < grid.n1; ++i) {
            const double s1 = i * grid.h1();
            const double s2 = j * grid.h2();
            const ChartPoint p = chart.eval(s1, s2);
            const ShapeData sh = chart.shape(s1, s2);
            const ThicknessSample t = profile.eval(chart, s1, s2);
            const std::size_t col = grid.column(i, j);
            c.gval[col] = t.g;
            c.g0val[col] = t.g0;
            c.g1val[col] = t.g1;
            c.sqrt_det_theta[col] = p.sqrt_det_metric;

            for (int k = 0; k <= grid.n3; ++k) {
                const double s3 = k * grid.h3();
                const double r = r_eps(t, grid.eps, s3);
                const double J = 1.0 - r * sh.H + r * r * sh.K;
                const double d1r = (grid.eps - s3) * t.d1_g0 + s3 * t.d1_g1;
                const double d2r = (grid.eps - s3) * t.d2_g0 + s3 * t.d2_g1;

                // Rows of grad_s Psi_eps in the gradient-matrix
                // convention; ambient gradients obey grad_x u = M^{-1} grad_s U.
                Mat3 M;
                M.row(0) = ((Mat3::Identity() - r * sh.W) * p.t1 + d1r * p.normal)
                               .transpose();
                M.row(1) = ((Mat3::Identity() - r * sh.W) * p.t2 + d2r * p.normal)
                               .transpose();
                M.row(2) = (t.g * p.normal).transpose();

                const double det = M.determinant();
                if (!(det > 0.0))
                    throw GeometryError("non-positive det grad Psi_eps (eps too large)");
                const double closed = t.g * J * p.sqrt_det_metric;
                max_mismatch =
                    std::max(max_mismatch, std::abs(det - closed) / closed);

                const Mat3 G = M * M.transpose();
                const Mat3 A = det * G.inverse();
                const std::size_t q = grid.node(i, j, k);
                c.detjac[q] = det;
                c.jval[q] = J;
                c.dval[q] = r;
                c.inv_grad_psi[q] = M.inverse();
                c.aeps[q] = {A(0, 0), A(1, 1), A(2, 2), A(0, 1), A(0, 2), A(1, 2)};

                Eigen::SelfAdjointEigenSolver<Mat3> es(A, Eigen::EigenvaluesOnly);
                min_rayleigh = std::min(min_rayleigh, es.eigenvalues()(0));
            }
        }
    }
    c.min_rayleigh = min_rayleigh;
    c.max_det_mismatch = max_mismatch;
    return c;
}

}  // namespace chfilm
