#include "chfilm/oracle.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace chfilm {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

SpectralCahnHilliard::SpectralCahnHilliard(int n) : n_(n) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("spectral grid: even n >= 4");
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    field_.assign(nn, 0.0);
    hat_u_.resize(nn);
    hat_f_.resize(nn);
    auto* bu = reinterpret_cast<fftw_complex*>(hat_u_.data());
    auto* bf = reinterpret_cast<fftw_complex*>(hat_f_.data());
    fwd_u_ = fftw_plan_dft_2d(n, n, bu, bu, FFTW_FORWARD, FFTW_ESTIMATE);
    fwd_f_ = fftw_plan_dft_2d(n, n, bf, bf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_u_ = fftw_plan_dft_2d(n, n, bu, bu, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralCahnHilliard::~SpectralCahnHilliard() {
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_u_));
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_f_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_u_));
}

void SpectralCahnHilliard::step(double tau, const Potential* F, double S) {
    const std::size_t nn = field_.size();
    for (std::size_t q = 0; q < nn; ++q) {
        hat_u_[q] = field_[q];
        hat_f_[q] = F ? F->prime(field_[q]) : 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(fwd_u_));
    fftw_execute(static_cast<fftw_plan>(fwd_f_));

    for (int j = 0; j < n_; ++j) {
        const int mj = (j <= n_ / 2) ? j : j - n_;
        for (int i = 0; i < n_; ++i) {
            const int mi = (i <= n_ / 2) ? i : i - n_;
            const double k2 = kTwoPi * kTwoPi * (mi * mi + mj * mj);
            const std::size_t q = static_cast<std::size_t>(j) * n_ + i;
            // (u+ - u)/tau = -k2 w,  w = k2 u+ + F'(u) + S (u+ - u)
            hat_u_[q] = (hat_u_[q] - tau * k2 * (hat_f_[q] - S * hat_u_[q])) /
                        (1.0 + tau * k2 * k2 + tau * S * k2);
        }
    }

    fftw_execute(static_cast<fftw_plan>(bwd_u_));
    const double scale = 1.0 / static_cast<double>(nn);
    for (std::size_t q = 0; q < nn; ++q) field_[q] = hat_u_[q].real() * scale;
    time_ += tau;
}

double SpectralCahnHilliard::mean() const {
    double s = 0.0;
    for (double x : field_) s += x;
    return s / static_cast<double>(field_.size());
}

namespace {

using CVec = std::vector<std::complex<double>>;

// dalpha/dt = -k2 (k2 alpha + (u^3 - u)_k), cubic by exact convolution
// truncated to |k| <= K (the Galerkin projection removes aliasing).
CVec galerkin_rhs(int K, const CVec& a) {
    const int n = 2 * K + 1;
    CVec rhs(n);
    for (int k = -K; k <= K; ++k) {
        std::complex<double> cubic(0.0, 0.0);
        for (int k1 = -K; k1 <= K; ++k1)
            for (int k2 = -K; k2 <= K; ++k2) {
                const int k3 = k - k1 - k2;
                if (k3 < -K || k3 > K) continue;
                cubic += a[k1 + K] * a[k2 + K] * a[k3 + K];
            }
        const double ksq = kTwoPi * kTwoPi * k * k;
        rhs[k + K] = -ksq * (ksq * a[k + K] + cubic - a[k + K]);
    }
    return rhs;
}

}  // namespace

GalerkinResult galerkin_ode(int K, CVec alpha0, double T, int substeps) {
    if (K < 0 || K > 16) throw std::invalid_argument("galerkin oracle: 0 <= K <= 16");
    if (alpha0.size() != static_cast<std::size_t>(2 * K + 1))
        throw std::invalid_argument("galerkin oracle: expected 2K+1 coefficients");
    if (substeps < 1) throw std::invalid_argument("galerkin oracle: substeps >= 1");

    const int n = 2 * K + 1;
    const double dt = T / substeps;
    CVec a = std::move(alpha0);
    for (int s = 0; s < substeps; ++s) {
        const CVec k1 = galerkin_rhs(K, a);
        CVec tmp(n);
        for (int q = 0; q < n; ++q) tmp[q] = a[q] + 0.5 * dt * k1[q];
        const CVec k2 = galerkin_rhs(K, tmp);
        for (int q = 0; q < n; ++q) tmp[q] = a[q] + 0.5 * dt * k2[q];
        const CVec k3 = galerkin_rhs(K, tmp);
        for (int q = 0; q < n; ++q) tmp[q] = a[q] + dt * k3[q];
        const CVec k4 = galerkin_rhs(K, tmp);
        double norm = 0.0;
        for (int q = 0; q < n; ++q) {
            a[q] += (dt / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
            norm += std::norm(a[q]);
        }
        if (!(norm < 1e12))
            throw std::runtime_error("galerkin oracle: step-size instability");
    }
    GalerkinResult res;
    res.coeffs = a;
    res.energy = galerkin_energy(K, res.coeffs);
    return res;
}

double galerkin_energy(int K, const CVec& alpha) {
    double grad = 0.0;
    for (int k = -K; k <= K; ++k)
        grad += kTwoPi * kTwoPi * k * k * std::norm(alpha[k + K]);
    // Potential part by rectangle-rule quadrature (spectrally accurate on
    // the periodic interval).
    const int nq = 512;
    double pot = 0.0;
    for (int q = 0; q < nq; ++q) {
        const double x = static_cast<double>(q) / nq;
        std::complex<double> u(0.0, 0.0);
        for (int k = -K; k <= K; ++k)
            u += alpha[k + K] *
                 std::exp(std::complex<double>(0.0, kTwoPi * k * x));
        const double ur = u.real();
        pot += 0.25 * (ur * ur - 1.0) * (ur * ur - 1.0);
    }
    return 0.5 * grad + pot / nq;
}

}  // namespace chfilm
