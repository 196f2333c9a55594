#ifndef CHFILM_POTENTIAL_HPP
#define CHFILM_POTENTIAL_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace chfilm {

// Homogeneous free-energy density F and its derivatives. Growth constants:
// F >= -C0, F'' >= -C2, |F'''(z)| <= C3 (|z| + 1).
class Potential {
public:
    // F(z) = (z^2 - 1)^2 / 4, the standard double well.
    static Potential quartic_double_well();
    // F given by polynomial coefficients c0 + c1 z + ... (lowest order first).
    static Potential polynomial(std::vector<double> coeffs, double C0, double C2,
                                double C3);

    double eval(double z, int order) const;
    double operator()(double z) const { return eval(z, 0); }
    double prime(double z) const { return eval(z, 1); }
    double second(double z) const { return eval(z, 2); }

    double C0() const { return C0_; }
    double C2() const { return C2_; }
    double C3() const { return C3_; }

    struct GrowthReport {
        bool C0_ok = false, C2_ok = false, C3_ok = false;
        double worst_C0_z = 0.0, worst_C2_z = 0.0, worst_C3_z = 0.0;
        bool all_ok() const { return C0_ok && C2_ok && C3_ok; }
    };

    // Sweeps z over [lo, hi] with the given step and checks the three growth
    // inequalities; F''' is formed by a central difference of F''.
    GrowthReport verify_growth(double lo, double hi, double step) const;

private:
    explicit Potential(std::vector<double> coeffs, double C0, double C2, double C3)
        : coeffs_(std::move(coeffs)), C0_(C0), C2_(C2), C3_(C3) {}

    std::vector<double> coeffs_;
    double C0_, C2_, C3_;
};

}  // namespace chfilm

#endif
