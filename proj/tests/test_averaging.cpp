#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "chfilm/analysis.hpp"
#include "chfilm/averaging.hpp"

using namespace chfilm;

namespace {

struct World {
    SurfaceChart chart;
    ThicknessProfile profile;
    PullbackCoefficients coeffs;
    std::unique_ptr<BulkOperators> bulk;
    std::unique_ptr<SurfaceGeometryCache> scache;
    std::unique_ptr<SurfaceOperators> sops;
    std::unique_ptr<AveragingContext> ctx;

    World(const SurfaceChart& c, const ThicknessProfile& p, int n1, int n2,
          int n3, double eps)
        : chart(c),
          profile(p),
          coeffs(build_coefficients(c, p, ReferenceGrid(n1, n2, n3, eps))) {
        bulk = std::make_unique<BulkOperators>(coeffs);
        scache = std::make_unique<SurfaceGeometryCache>(c, p, n1, n2);
        sops = std::make_unique<SurfaceOperators>(*scache);
        ctx = std::make_unique<AveragingContext>(*bulk, *scache);
    }
};

World flat_world(int n, int n3, double eps) {
    return World(SurfaceChart::flat_sheet(), ThicknessProfile::constant(0, 1),
                 n, n, n3, eps);
}

World torus_world(int n1, int n2, int n3, double eps) {
    return World(SurfaceChart::torus(2.0, 1.0),
                 ThicknessProfile::constant(0, 1), n1, n2, n3, eps);
}

}  // namespace

TEST_CASE("average of simple profiles") {
    const double eps = 0.1;
    World w = flat_world(8, 4, eps);
    const ReferenceGrid& g = w.bulk->grid();

    BulkField lin(g), ones(g);
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                lin.at(i, j, k) = (k * g.h3()) / eps;
                ones.at(i, j, k) = 1.0;
            }
    for (double x : w.ctx->average(lin).values)
        CHECK(x == doctest::Approx(0.5).epsilon(1e-14));
    for (double x : w.ctx->average(ones).values)
        CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("matched initial data averages back exactly") {
    World w = torus_world(16, 16, 8, 0.1);
    SurfaceField v0(16, 16);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            v0.at(i, j) = 1.0 + 0.3 * std::sin(2.0 * M_PI * i / 16.0);
    const BulkField u0 = w.bulk->init_from_surface(v0);
    const SurfaceField back = w.ctx->average(u0);
    for (std::size_t q = 0; q < back.values.size(); ++q)
        CHECK(std::abs(back.values[q] - v0.values[q]) <= 1e-13);
}

TEST_CASE("pairing identity") {
    const double eps = 0.1;
    World flat = flat_world(8, 2, eps);
    BulkField u(flat.bulk->grid());
    SurfaceField eta(8, 8);
    for (double& x : u.values) x = 1.0;
    for (double& x : eta.values) x = 1.0;
    CHECK(flat.ctx->pairing_residual(u, eta) <= 1e-15);
    // Both sides equal the shell volume = eps.
    CHECK(flat.bulk->weighted_mass(u) == doctest::Approx(eps).epsilon(1e-13));

    SurfaceField zero(8, 8);
    CHECK(flat.ctx->pairing_residual(u, zero) == 0.0);

    World tor = torus_world(16, 8, 4, 0.1);
    for (int trial = 0; trial < 10; ++trial) {
        const BulkField a =
            random_bulk_field(tor.bulk->grid(), 0.0, 1.0, 100 + trial);
        const SurfaceField b = random_surface_field(16, 8, 0.0, 1.0, 200 + trial);
        CHECK(tor.ctx->pairing_residual(a, b) <= 1e-12);
    }
}

TEST_CASE("linearity of the average") {
    World w = torus_world(16, 8, 4, 0.1);
    const BulkField a = random_bulk_field(w.bulk->grid(), 0.0, 1.0, 1);
    const BulkField b = random_bulk_field(w.bulk->grid(), 0.0, 1.0, 2);
    BulkField comb(w.bulk->grid());
    for (std::size_t q = 0; q < comb.values.size(); ++q)
        comb.values[q] = 2.0 * a.values[q] - 3.0 * b.values[q];
    const SurfaceField ma = w.ctx->average(a), mb = w.ctx->average(b);
    const SurfaceField mc = w.ctx->average(comb);
    for (std::size_t q = 0; q < mc.values.size(); ++q)
        CHECK(std::abs(mc.values[q] - 2.0 * ma.values[q] + 3.0 * mb.values[q]) <=
              1e-12);
}

TEST_CASE("L2 bound of the average with explicit constant") {
    World w = torus_world(16, 8, 4, 0.1);
    const double eps = 0.1;
    double maxJ = 0.0, minJ = 1e30, ming = 1e30;
    for (const double j : w.coeffs.jval) {
        maxJ = std::max(maxJ, j);
        minJ = std::min(minJ, j);
    }
    for (const double g : w.coeffs.gval) ming = std::min(ming, g);
    const double C = maxJ / std::sqrt(ming * minJ);
    for (int trial = 0; trial < 5; ++trial) {
        const BulkField u =
            random_bulk_field(w.bulk->grid(), 0.0, 1.0, 300 + trial);
        const SurfaceField mu = w.ctx->average(u);
        const double lhs = surface_norm(mu, SurfaceNormKind::L2, *w.sops);
        KahanSum l2;
        for (std::size_t q = 0; q < u.values.size(); ++q)
            l2.add(w.bulk->mass()[q] * u.values[q] * u.values[q]);
        CHECK(lhs <= C / std::sqrt(eps) * std::sqrt(l2.value()) * (1 + 1e-12));
    }
}

TEST_CASE("pointwise difference to the average scales with eps") {
    SurfaceField v0(16, 8);
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 16; ++i)
            v0.at(i, j) = std::sin(2.0 * M_PI * i / 16.0);
    std::vector<std::pair<double, double>> pts;
    for (const double eps : {0.2, 0.1, 0.05}) {
        World w = torus_world(16, 8, 4, eps);
        const BulkField u = w.bulk->init_from_surface(v0);
        const SurfaceField mu = w.ctx->average(u);
        double worst = 0.0;
        const ReferenceGrid& g = w.bulk->grid();
        for (int k = 0; k <= g.n3; ++k)
            for (int j = 0; j < g.n2; ++j)
                for (int i = 0; i < g.n1; ++i)
                    worst = std::max(worst, std::abs(u.at(i, j, k) - mu.at(i, j)));
        pts.emplace_back(eps, worst);
    }
    CHECK(fit_rate(pts).slope >= 0.8);
}

TEST_CASE("tangential gradient identity") {
    // Flat sheet, s3-independent data: the identity reduces to the chart
    // gradient of the average.
    World flat = flat_world(32, 4, 0.1);
    BulkField u(flat.bulk->grid());
    for (int k = 0; k <= 4; ++k)
        for (int j = 0; j < 32; ++j)
            for (int i = 0; i < 32; ++i)
                u.at(i, j, k) = std::sin(2.0 * M_PI * i / 32.0);
    const auto [gt1, gt2] = flat.ctx->average_tangential_gradient(u);
    const auto [gc1, gc2] = flat.ctx->chart_gradient(flat.ctx->average(u));
    for (std::size_t q = 0; q < gt1.values.size(); ++q) {
        CHECK(std::abs(gt1.values[q] - gc1.values[q]) <= 1e-11);
        CHECK(std::abs(gt2.values[q] - gc2.values[q]) <= 1e-11);
    }

    // Constant field on flat geometry: all terms vanish.
    BulkField c(flat.bulk->grid());
    for (double& x : c.values) x = 4.2;
    const auto [ct1, ct2] = flat.ctx->average_tangential_gradient(c);
    for (std::size_t q = 0; q < ct1.values.size(); ++q) {
        CHECK(std::abs(ct1.values[q]) <= 1e-12);
        CHECK(std::abs(ct2.values[q]) <= 1e-12);
    }

    // Torus, manufactured field: the identity matches the chart gradient of
    // the average up to stencil consistency.
    World tor = torus_world(32, 16, 8, 0.05);
    SurfaceField v0(32, 16);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 32; ++i)
            v0.at(i, j) = std::sin(2.0 * M_PI * i / 32.0);
    const BulkField m = tor.bulk->init_from_surface(v0);
    const auto [tt1, tt2] = tor.ctx->average_tangential_gradient(m);
    const auto [tc1, tc2] = tor.ctx->chart_gradient(tor.ctx->average(m));
    double worst = 0.0;
    for (std::size_t q = 0; q < tt1.values.size(); ++q) {
        worst = std::max(worst, std::abs(tt1.values[q] - tc1.values[q]));
        worst = std::max(worst, std::abs(tt2.values[q] - tc2.values[q]));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("zeta_delta residual") {
    // Flat sheet, s3-independent field: zero to stencil round-off.
    World flat = flat_world(16, 4, 0.1);
    BulkField u(flat.bulk->grid());
    for (int k = 0; k <= 4; ++k)
        for (int j = 0; j < 16; ++j)
            for (int i = 0; i < 16; ++i)
                u.at(i, j, k) = std::sin(2.0 * M_PI * i / 16.0) +
                                0.5 * std::cos(2.0 * M_PI * j / 16.0);
    const SurfaceField zd = flat.ctx->residual_zeta_delta(u, *flat.sops);
    for (double x : zd.values) CHECK(std::abs(x) <= 1e-9);

    // Torus, u = 1: zeta = -A_g M(1), small but nonzero, O(eps).
    World tor = torus_world(16, 8, 4, 0.1);
    BulkField ones(tor.bulk->grid());
    for (double& x : ones.values) x = 1.0;
    const SurfaceField z1 = tor.ctx->residual_zeta_delta(ones, *tor.sops);
    const double norm = surface_norm(z1, SurfaceNormKind::L2, *tor.sops);
    CHECK(norm > 0.0);
    CHECK(norm <= 10.0 * 0.1);
}

TEST_CASE("zeta_G commutator") {
    World flat = flat_world(8, 8, 0.1);
    const ReferenceGrid& g = flat.bulk->grid();
    const double eps = g.eps, h3 = g.h3();

    // Linear G commutes with averaging exactly.
    const BulkField u = random_bulk_field(g, 0.0, 1.0, 17);
    const SurfaceField zlin =
        flat.ctx->residual_zeta_G(u, [](double z) { return z; });
    for (double x : zlin.values) CHECK(std::abs(x) <= 1e-14);

    // G(z) = z^2 on U = s3: trapezoid value eps^2/12 + h3^2/6.
    BulkField lin(g);
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) lin.at(i, j, k) = k * h3;
    const SurfaceField zsq =
        flat.ctx->residual_zeta_G(lin, [](double z) { return z * z; });
    const double expected = eps * eps / 12.0 + h3 * h3 / 6.0;
    for (double x : zsq.values)
        CHECK(x == doctest::Approx(expected).epsilon(1e-12));

    // s3-independent data: F' commutes.
    BulkField s3ind(g);
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                s3ind.at(i, j, k) = std::sin(2.0 * M_PI * i / g.n1);
    const SurfaceField zf =
        flat.ctx->residual_zeta_F(s3ind, Potential::quartic_double_well());
    for (double x : zf.values) CHECK(std::abs(x) <= 1e-14);
}

TEST_CASE("normal derivative and ambient gradient") {
    World flat = flat_world(16, 4, 0.1);
    const ReferenceGrid& g = flat.bulk->grid();
    BulkField lin(g);
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                lin.at(i, j, k) = 2.0 * (k * g.h3()) +
                                  std::sin(2.0 * M_PI * i / g.n1);
    CHECK(flat.ctx->normal_derivative(lin, 3, 5, 0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(flat.ctx->normal_derivative(lin, 3, 5, 2) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(flat.ctx->normal_derivative(lin, 3, 5, 4) ==
          doctest::Approx(2.0).epsilon(1e-12));
    const Vec3 grad = flat.ctx->ambient_gradient(lin, 0, 5, 2);
    // d/dx sin(2 pi s1) at s1 = 0 via centered difference.
    const double d1 = std::sin(2.0 * M_PI / g.n1) * g.n1;
    CHECK(grad.x() == doctest::Approx(d1).epsilon(1e-12));
    CHECK(grad.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(grad.z() == doctest::Approx(2.0).epsilon(1e-12));
}
