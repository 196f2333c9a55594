#ifndef CHFILM_ORACLE_HPP
#define CHFILM_ORACLE_HPP

#include <complex>
#include <vector>

#include "chfilm/potential.hpp"

namespace chfilm {

// Fourier pseudo-spectral Cahn-Hilliard integrator on the flat doubly
// periodic unit square; reference solution for the grid solvers.
class SpectralCahnHilliard {
public:
    explicit SpectralCahnHilliard(int n);
    ~SpectralCahnHilliard();
    SpectralCahnHilliard(const SpectralCahnHilliard&) = delete;
    SpectralCahnHilliard& operator=(const SpectralCahnHilliard&) = delete;

    int n() const { return n_; }
    double time() const { return time_; }
    std::vector<double>& field() { return field_; }
    const std::vector<double>& field() const { return field_; }
    double& at(int i, int j) { return field_[static_cast<std::size_t>(j) * n_ + i]; }

    // One stabilized linearly implicit step; F may be null for the pure
    // biharmonic flow. The zero mode is exactly constant.
    void step(double tau, const Potential* F, double S);

    double mean() const;

private:
    int n_;
    double time_ = 0.0;
    std::vector<double> field_;
    std::vector<std::complex<double>> hat_u_, hat_f_;
    void* fwd_u_ = nullptr;
    void* fwd_f_ = nullptr;
    void* bwd_u_ = nullptr;
};

// Tiny-K Galerkin ODE oracle: real 1D Fourier modes exp(2 pi i k x),
// |k| <= K, quartic double well, cubic term by exact convolution, classical
// RK4 in time. Coefficients are stored for k = -K..K (index k + K).
struct GalerkinResult {
    std::vector<std::complex<double>> coeffs;
    double energy = 0.0;
};

GalerkinResult galerkin_ode(int K, std::vector<std::complex<double>> alpha0,
                            double T, int substeps);

// Ginzburg-Landau energy of the mode vector (quartic well), by dense
// quadrature of the reconstructed profile.
double galerkin_energy(int K, const std::vector<std::complex<double>>& alpha);

}  // namespace chfilm

#endif
