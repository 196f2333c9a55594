#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chfilm/potential.hpp"

using namespace chfilm;

TEST_CASE("quartic double well values") {
    const Potential F = Potential::quartic_double_well();
    CHECK(F.eval(0.0, 0) == doctest::Approx(0.25));
    CHECK(F.eval(1.0, 1) == doctest::Approx(0.0));
    CHECK(F.eval(-1.0, 1) == doctest::Approx(0.0));
    CHECK(F.eval(0.0, 2) == doctest::Approx(-1.0));
    CHECK(F.prime(2.0) == doctest::Approx(8.0 - 2.0));
    CHECK(F.second(2.0) == doctest::Approx(11.0));
    CHECK(F.C0() == 0.0);
    CHECK(F.C2() == 1.0);
    CHECK(F.C3() == 6.0);
}

TEST_CASE("growth verification") {
    const Potential quartic = Potential::quartic_double_well();
    CHECK(quartic.verify_growth(-5.0, 5.0, 1e-3).all_ok());

    // Convex F(z) = z^2 passes with all constants zero.
    const Potential convex = Potential::polynomial({0.0, 0.0, 1.0}, 0.0, 0.0, 0.0);
    CHECK(convex.verify_growth(-5.0, 5.0, 1e-3).all_ok());

    // F(z) = -z^4 has F'' unbounded below: the C2 check must fail.
    const Potential bad =
        Potential::polynomial({0.0, 0.0, 0.0, 0.0, -1.0}, 0.0, 1.0, 100.0);
    const Potential::GrowthReport rep = bad.verify_growth(-5.0, 5.0, 1e-3);
    CHECK_FALSE(rep.C2_ok);
    CHECK_FALSE(rep.all_ok());
}

TEST_CASE("derivative consistency under step refinement") {
    const Potential F = Potential::quartic_double_well();
    auto fd_error = [&](double h, int order) {
        double worst = 0.0;
        for (double z = -2.0; z <= 2.0; z += 0.25) {
            const double fd =
                (F.eval(z + h, order - 1) - F.eval(z - h, order - 1)) / (2 * h);
            worst = std::max(worst, std::abs(fd - F.eval(z, order)));
        }
        return worst;
    };
    for (int order : {1, 2}) {
        const double e1 = fd_error(1e-2, order);
        const double e2 = fd_error(1e-3, order);
        const double slope = std::log(e1 / e2) / std::log(10.0);
        CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
    }
}

TEST_CASE("invalid order") {
    const Potential F = Potential::quartic_double_well();
    CHECK_THROWS(F.eval(0.0, 3));
    CHECK_THROWS(F.eval(0.0, -1));
}
