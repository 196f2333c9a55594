#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chfilm/geometry.hpp"

using namespace chfilm;

TEST_CASE("flat sheet chart") {
    const SurfaceChart flat = SurfaceChart::flat_sheet();
    const ChartPoint p = flat.eval(0.25, 0.5);
    CHECK(p.position.isApprox(Vec3(0.25, 0.5, 0.0)));
    CHECK(p.normal.isApprox(Vec3(0, 0, 1)));
    const ShapeData d = flat.shape(0.3, 0.7);
    CHECK(d.W.norm() == 0.0);
    CHECK(d.H == 0.0);
    CHECK(d.K == 0.0);
    CHECK(flat.jacobian(0.1, 0.2, 3.0) == 1.0);
}

TEST_CASE("torus chart evaluation") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ChartPoint p = torus.eval(0.0, 0.0);
    CHECK(p.position.isApprox(Vec3(3, 0, 0)));
    CHECK(p.normal.isApprox(Vec3(1, 0, 0)));

    const ShapeData d = torus.shape(0.0, 0.0);
    const double k_lo = std::min(d.kappa1, d.kappa2);
    const double k_hi = std::max(d.kappa1, d.kappa2);
    CHECK(k_lo == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(k_hi == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(d.H == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
    CHECK(d.K == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(SurfaceChart::torus(1.0, 1.0), GeometryError);
    CHECK_THROWS_AS(SurfaceChart::torus(1.0, -2.0), GeometryError);
}

TEST_CASE("torus shape operator matches finite differences of the normal") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const double h = 1e-5;
    for (const auto [s1, s2] : {std::pair{0.13, 0.31}, {0.6, 0.85}, {0.0, 0.5}}) {
        const ShapeData d = torus.shape(s1, s2);
        // W t_i = -d(nu)/ds_i along the chart directions.
        const Vec3 dn1 =
            (torus.eval(s1 + h, s2).normal - torus.eval(s1 - h, s2).normal) /
            (2 * h);
        const Vec3 dn2 =
            (torus.eval(s1, s2 + h).normal - torus.eval(s1, s2 - h).normal) /
            (2 * h);
        const ChartPoint p = torus.eval(s1, s2);
        CHECK((d.W * p.t1 + dn1).norm() <= 1e-6 * p.t1.norm());
        CHECK((d.W * p.t2 + dn2).norm() <= 1e-6 * p.t2.norm());
    }
}

TEST_CASE("sphere patch") {
    const SurfaceChart sph = SurfaceChart::unit_sphere_patch();
    CHECK_FALSE(sph.solver_eligible());
    const ChartPoint p = sph.eval(0.2, 0.5);  // equator
    CHECK(p.normal.isApprox(p.position, 1e-14));
    const ShapeData d = sph.shape(0.2, 0.5);
    const Mat3 P = Mat3::Identity() - p.normal * p.normal.transpose();
    CHECK((d.W + P).norm() <= 1e-12);
    CHECK(d.H == doctest::Approx(-2.0));
    CHECK(d.K == doctest::Approx(1.0));
    CHECK(sph.jacobian(0.2, 0.5, 0.1) == doctest::Approx(1.21).epsilon(1e-12));
    CHECK_THROWS_AS(sph.eval(0.1, 0.0), GeometryError);
    CHECK_THROWS_AS(sph.eval(0.1, 1.0), GeometryError);
}

TEST_CASE("jacobian values and validity bound") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    CHECK(torus.jacobian(0.4, 0.9, 0.0) == 1.0);
    // Outer equator: H = -4/3, K = 1/3.
    CHECK(torus.jacobian(0.0, 0.0, 0.05) ==
          doctest::Approx(1.0 + 0.05 * 4.0 / 3.0 + 0.0025 / 3.0).epsilon(1e-12));
    CHECK(torus.tubular_radius() == doctest::Approx(0.5));
    CHECK_THROWS_AS(torus.jacobian(0.0, 0.0, 0.6), GeometryError);

    // Cross-check against the 2x2 determinant det[I - r W] restricted to the
    // tangent plane (the rank-2 part of the 3x3 form).
    const ShapeData d = torus.shape(0.37, 0.81);
    const double r = 0.2;
    const double det2 = (1.0 - r * d.kappa1) * (1.0 - r * d.kappa2);
    CHECK(torus.jacobian(0.37, 0.81, r) == doctest::Approx(det2).epsilon(1e-12));
}

TEST_CASE("pointwise chart invariants on a sample grid") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const int n = 16;
    const double hfd = 1e-6;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double s1 = static_cast<double>(i) / n;
            const double s2 = static_cast<double>(j) / n;
            const ChartPoint p = torus.eval(s1, s2);
            CHECK(std::abs(p.normal.norm() - 1.0) <= 1e-12);
            CHECK(p.metric.determinant() > 0.0);
            CHECK(std::abs(p.normal.dot(p.t1)) <= 1e-10);
            CHECK(std::abs(p.normal.dot(p.t2)) <= 1e-10);

            const ShapeData d = torus.shape(s1, s2);
            CHECK((d.W * p.normal).norm() <= 1e-10);
            CHECK((d.W - d.W.transpose()).norm() <= 1e-10);
            CHECK(std::abs(d.W.trace() - (d.kappa1 + d.kappa2)) <= 1e-8);
            const Mat3 P = Mat3::Identity() - p.normal * p.normal.transpose();
            CHECK((P * d.W - d.W).norm() <= 1e-10);
            CHECK((d.W * P - d.W).norm() <= 1e-10);

            // Metric from analytic tangents vs central-difference tangents.
            const Vec3 t1_fd = (torus.eval(s1 + hfd, s2).position -
                                torus.eval(s1 - hfd, s2).position) /
                               (2 * hfd);
            const Vec3 t2_fd = (torus.eval(s1, s2 + hfd).position -
                                torus.eval(s1, s2 - hfd).position) /
                               (2 * hfd);
            CHECK(std::abs(t1_fd.dot(t1_fd) - p.metric(0, 0)) <=
                  1e-6 * p.metric(0, 0));
            CHECK(std::abs(t2_fd.dot(t2_fd) - p.metric(1, 1)) <=
                  1e-6 * p.metric(1, 1));
        }
}

TEST_CASE("curvature gradients match finite differences") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const double h = 1e-6;
    for (const double s2 : {0.1, 0.35, 0.62, 0.9}) {
        Vec3 gH, gK;
        torus.curvature_gradients(0.3, s2, gH, gK);
        const double dH =
            (torus.shape(0.3, s2 + h).H - torus.shape(0.3, s2 - h).H) / (2 * h);
        const double dK =
            (torus.shape(0.3, s2 + h).K - torus.shape(0.3, s2 - h).K) / (2 * h);
        const ChartPoint p = torus.eval(0.3, s2);
        // Recover chart derivative: grad_Gamma f . t2 = df/ds2.
        CHECK(gH.dot(p.t2) == doctest::Approx(dH).epsilon(1e-6));
        CHECK(gK.dot(p.t2) == doctest::Approx(dK).epsilon(1e-6));
        CHECK(std::abs(gH.dot(p.normal)) <= 1e-12);
    }
}

TEST_CASE("thickness profiles") {
    const SurfaceChart flat = SurfaceChart::flat_sheet();
    const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
    ThicknessSample t = unit.eval(flat, 0.3, 0.4);
    CHECK(t.g0 == 0.0);
    CHECK(t.g1 == 1.0);
    CHECK(t.g == 1.0);
    CHECK(t.grad_g0.norm() == 0.0);
    CHECK(t.grad_g1.norm() == 0.0);

    const ThicknessProfile signed_prof = ThicknessProfile::constant(-0.5, 0.5);
    CHECK(signed_prof.eval(flat, 0.1, 0.1).g == 1.0);
    CHECK_THROWS_AS(ThicknessProfile::constant(1.0, 0.5), GeometryError);
    CHECK_THROWS_AS(ThicknessProfile::sinusoidal(1.0, 1.0), GeometryError);

    const ThicknessProfile sine = ThicknessProfile::sinusoidal(0.2, 1.0);
    t = sine.eval(flat, 0.25, 0.6);
    CHECK(t.g == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.d1_g1 == doctest::Approx(-0.4 * M_PI).epsilon(1e-13));
    // Tangential gradient vs central difference of the preset.
    const double h = 1e-6;
    const double dfd =
        (sine.eval(flat, 0.25 + h, 0.6).g1 - sine.eval(flat, 0.25 - h, 0.6).g1) /
        (2 * h);
    CHECK(t.grad_g1.x() == doctest::Approx(dfd).epsilon(1e-6));
    CHECK(sine.depends_on_s1());
    CHECK_FALSE(unit.depends_on_s1());
}

TEST_CASE("J deviation bound on the thin shell") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    const ThicknessProfile prof = ThicknessProfile::constant(-0.3, 0.7);
    const double eps = 0.1;
    // |J - 1| <= C eps with C = sup|H| max|g_i| + delta sup|K| max|g_i|.
    double supH = 0.0, supK = 0.0;
    const int n = 32;
    for (int j = 0; j < n; ++j) {
        const ShapeData d = torus.shape(0.0, static_cast<double>(j) / n);
        supH = std::max(supH, std::abs(d.H));
        supK = std::max(supK, std::abs(d.K));
    }
    const double gmax = prof.max_abs_g();
    const double C = supH * gmax + torus.tubular_radius() * supK * gmax;
    for (int j = 0; j < n; ++j)
        for (int q = 0; q <= 8; ++q) {
            const double s2 = static_cast<double>(j) / n;
            const ThicknessSample t = prof.eval(torus, 0.0, s2);
            const double r = eps * (t.g0 + (t.g1 - t.g0) * q / 8.0);
            CHECK(std::abs(torus.jacobian(0.0, s2, r) - 1.0) <= C * eps);
        }
}

TEST_CASE("max_epsilon") {
    const SurfaceChart torus = SurfaceChart::torus(2.0, 1.0);
    CHECK(max_epsilon(torus, ThicknessProfile::constant(0.0, 1.0)) ==
          doctest::Approx(0.5));
    CHECK(max_epsilon(torus, ThicknessProfile::constant(-2.0, 2.0)) ==
          doctest::Approx(0.25));
}
