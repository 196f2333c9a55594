#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chfilm/numerics.hpp"
#include "chfilm/pullback.hpp"

using namespace chfilm;

TEST_CASE("reference grid validation") {
    CHECK_NOTHROW(ReferenceGrid(8, 8, 2, 0.1));
    CHECK_THROWS(ReferenceGrid(7, 8, 2, 0.1));   // odd
    CHECK_THROWS(ReferenceGrid(8, 6, 2, 0.1));   // too small
    CHECK_THROWS(ReferenceGrid(8, 8, 1, 0.1));   // too few layers
    CHECK_THROWS(ReferenceGrid(8, 8, 2, 0.0));   // eps
    const ReferenceGrid g(16, 8, 4, 0.2);
    CHECK(g.h1() == doctest::Approx(1.0 / 16));
    CHECK(g.h3() == doctest::Approx(0.05));
    CHECK(g.num_nodes() == 16u * 8u * 5u);
    // Trapezoid weights sum to n3 panels.
    double s = 0.0;
    for (int k = 0; k <= g.n3; ++k) s += g.layer_weight(k) * g.h3();
    CHECK(s == doctest::Approx(g.eps).epsilon(1e-15));
}

TEST_CASE("map_psi") {
    const SurfaceChart flat = SurfaceChart::flat_sheet();
    const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
    CHECK(map_psi(flat, unit, 0.1, 0.5, 0.5, 0.07).isApprox(Vec3(0.5, 0.5, 0.07)));
    CHECK_THROWS(map_psi(flat, unit, 0.1, 0.5, 0.5, 0.2));
    CHECK_THROWS(map_psi(flat, unit, 0.1, 0.5, 0.5, -0.01));

    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    CHECK(map_psi(torus, unit, 0.1, 0.0, 0.0, 0.05).isApprox(Vec3(3.05, 0, 0)));
    // s3 = 0 lands on the inner offset surface psi + eps g0 nu.
    const ThicknessProfile shifted = ThicknessProfile::constant(-0.5, 0.5);
    CHECK(map_psi(torus, shifted, 0.1, 0.0, 0.0, 0.0)
              .isApprox(Vec3(3.0 - 0.05, 0, 0)));
}

TEST_CASE("inverse recovery of the thin coordinate") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ThicknessProfile prof = ThicknessProfile::sinusoidal(0.2, 1.0);
    const double eps = 0.1;
    CHECK(inverse_check(torus, prof, eps, 0.3, 0.7, 0.02) <= 1e-12);
    CHECK(inverse_check(torus, prof, eps, 0.3, 0.7, eps) <= 1e-12);
    CHECK(inverse_check(torus, prof, eps, 0.99, 0.01, 0.0) <= 1e-12);
    const SurfaceChart flat = SurfaceChart::flat_sheet();
    CHECK(inverse_check(flat, prof, eps, 0.2, 0.4, 0.05) <= 1e-14);
}

TEST_CASE("flat sheet coefficients are the identity") {
    const SurfaceChart flat = SurfaceChart::flat_sheet();
    const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
    const PullbackCoefficients c =
        build_coefficients(flat, unit, ReferenceGrid(8, 8, 2, 0.1));
    for (std::size_t q = 0; q < c.detjac.size(); ++q) {
        CHECK(std::abs(c.detjac[q] - 1.0) <= 1e-12);
        CHECK(std::abs(c.jval[q] - 1.0) <= 1e-12);
        const Sym3& A = c.aeps[q];
        CHECK(std::abs(A[0] - 1.0) <= 1e-12);
        CHECK(std::abs(A[1] - 1.0) <= 1e-12);
        CHECK(std::abs(A[2] - 1.0) <= 1e-12);
        CHECK(std::abs(A[3]) <= 1e-12);
        CHECK(std::abs(A[4]) <= 1e-12);
        CHECK(std::abs(A[5]) <= 1e-12);
    }
    CHECK(c.min_rayleigh == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("torus coefficients: determinant identity and ellipticity") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
    const PullbackCoefficients c =
        build_coefficients(torus, unit, ReferenceGrid(32, 16, 4, 0.1));
    CHECK(c.max_det_mismatch <= 1e-6);
    CHECK(c.min_rayleigh > 0.0);
    for (const double d : c.detjac) CHECK(d > 0.0);

    // Rayleigh quotients of random unit vectors respect the recorded bound.
    Lcg rng(7);
    for (const std::size_t q : {std::size_t{0}, c.detjac.size() / 2,
                                c.detjac.size() - 1})
        for (int trial = 0; trial < 100; ++trial) {
            Vec3 x(rng.symmetric(1.0), rng.symmetric(1.0), rng.symmetric(1.0));
            x.normalize();
            CHECK(x.dot(sym3_apply(c.aeps[q], x)) >=
                  c.min_rayleigh * (1.0 - 1e-10));
        }
}

TEST_CASE("detjac matches g J sqrt(det theta) nodewise") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ThicknessProfile prof = ThicknessProfile::sinusoidal(0.2, 1.0);
    const ReferenceGrid grid(16, 8, 4, 0.05);
    const PullbackCoefficients c = build_coefficients(torus, prof, grid);
    for (int k = 0; k <= grid.n3; ++k)
        for (int j = 0; j < grid.n2; ++j)
            for (int i = 0; i < grid.n1; ++i) {
                const std::size_t p = grid.node(i, j, k);
                const std::size_t col = grid.column(i, j);
                const double closed = c.gval[col] * c.jval[p] *
                                      c.sqrt_det_theta[col];
                CHECK(std::abs(c.detjac[p] - closed) <=
                      1e-6 * std::abs(closed));
            }
}

TEST_CASE("excessive epsilon is rejected") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
    CHECK_THROWS_AS(
        build_coefficients(torus, unit, ReferenceGrid(16, 8, 2, 0.6)),
        GeometryError);
}
