#include "chfilm/potential.hpp"

#include <cmath>

namespace chfilm {

Potential Potential::quartic_double_well() {
    // (z^2 - 1)^2 / 4 = 1/4 - z^2/2 + z^4/4. min F'' = -1, F''' = 6 z.
    return Potential({0.25, 0.0, -0.5, 0.0, 0.25}, /*C0=*/0.0, /*C2=*/1.0,
                     /*C3=*/6.0);
}

Potential Potential::polynomial(std::vector<double> coeffs, double C0, double C2,
                                double C3) {
    if (coeffs.empty()) throw std::invalid_argument("empty potential coefficients");
    if (C0 < 0.0 || C2 < 0.0 || C3 < 0.0)
        throw std::invalid_argument("growth constants must be nonnegative");
    return Potential(std::move(coeffs), C0, C2, C3);
}

double Potential::eval(double z, int order) const {
    if (order < 0 || order > 2) throw std::invalid_argument("order must be 0, 1 or 2");
    // Horner evaluation of the order-th derivative.
    double acc = 0.0;
    const int n = static_cast<int>(coeffs_.size());
    for (int k = n - 1; k >= order; --k) {
        double factor = 1.0;
        for (int m = 0; m < order; ++m) factor *= static_cast<double>(k - m);
        acc = acc * z + factor * coeffs_[static_cast<std::size_t>(k)];
    }
    return acc;
}

Potential::GrowthReport Potential::verify_growth(double lo, double hi,
                                                 double step) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0))
        throw std::invalid_argument("growth sweep needs a finite range and step > 0");
    GrowthReport rep;
    rep.C0_ok = rep.C2_ok = rep.C3_ok = true;
    double worst0 = 0.0, worst2 = 0.0, worst3 = 0.0;
    const double fd = std::max(step, 1e-5);
    for (double z = lo; z <= hi + 0.5 * step; z += step) {
        const double F = eval(z, 0);
        const double F2 = eval(z, 2);
        if (!std::isfinite(F) || !std::isfinite(F2))
            throw std::runtime_error("non-finite potential value in growth sweep");
        const double F3 = (eval(z + fd, 2) - eval(z - fd, 2)) / (2.0 * fd);
        const double v0 = -C0_ - F;
        if (v0 > worst0) { worst0 = v0; rep.worst_C0_z = z; rep.C0_ok = false; }
        const double v2 = -C2_ - F2;
        if (v2 > worst2) { worst2 = v2; rep.worst_C2_z = z; rep.C2_ok = false; }
        // Allow finite-difference slack on the cubic-growth check.
        const double v3 = std::abs(F3) - C3_ * (std::abs(z) + 1.0) - 1e-6;
        if (v3 > worst3) { worst3 = v3; rep.worst_C3_z = z; rep.C3_ok = false; }
    }
    return rep;
}

}  // namespace chfilm
