#ifndef CHFILM_SURFACE_SOLVER_HPP
#define CHFILM_SURFACE_SOLVER_HPP

#include <vector>

#include "chfilm/numerics.hpp"
#include "chfilm/potential.hpp"
#include "chfilm/surface_geometry.hpp"

namespace chfilm {

struct SurfaceStepperConfig {
    double tau = 1e-4;
    double stabilization = 2.0;
    double tol_lin = 1e-11;
    int max_iter = 20000;
};

struct SurfaceLogRecord {
    int step = 0;
    double time = 0.0;
    double weighted_mass = 0.0;
    double weighted_energy = 0.0;
    double grad_mu_norm = 0.0;
};

struct SurfaceTrajectory {
    std::vector<SurfaceLogRecord> records;
    std::vector<double> snapshot_times;
    std::vector<SurfaceField> snapshots;
    SurfaceField final_v, final_mu;
};

// Weighted Laplace-Beltrami machinery on the periodic surface grid: the
// stiffness form (g grad v, grad eta), its lumped mass, A_g, and L_g.
class SurfaceOperators {
public:
    explicit SurfaceOperators(const SurfaceGeometryCache& cache);

    const SurfaceGeometryCache& cache() const { return *cache_; }

    // y = K v with K the flux stencil of (w grad v, grad eta); w = g when
    // weighted, w = 1 otherwise (used for plain H1 norms).
    void apply_stiffness(const std::vector<double>& v, std::vector<double>& y,
                         bool weighted = true) const;

    const std::vector<double>& mass() const { return mass_; }  // g-weighted
    const std::vector<double>& plain_mass() const { return plain_mass_; }
    double total_mass() const { return total_mass_; }

    double weighted_mean(const std::vector<double>& v) const;

    // A_g v = (1/g) div_Gamma(g grad_Gamma v) = -M^{-1} K v.
    SurfaceField apply_Ag(const SurfaceField& v) const;

    // Solves -A_g phi = f on weighted-mean-zero data; the output has weighted
    // mean zero. A nonzero input mean (above 1e-10) is projected off and
    // reported through *projected_mean.
    SurfaceField solve_Lg(const SurfaceField& f, double tol = 1e-11,
                          double* projected_mean = nullptr) const;

    // One stabilized linearly implicit step of d_t v = A_g mu,
    // mu = -A_g v + F'(v).
    void step(SurfaceField& v, SurfaceField& mu, const Potential& F,
              const SurfaceStepperConfig& cfg) const;

    double energy(const SurfaceField& v, const Potential& F) const;
    double grad_norm(const SurfaceField& v, bool weighted = true) const;

    SurfaceTrajectory run(const SurfaceField& v0, double T, const Potential& F,
                          const SurfaceStepperConfig& cfg,
                          const std::vector<double>& snapshot_times = {}) const;

private:
    const SurfaceGeometryCache* cache_;
    std::vector<double> q1w_, q2w_;  // g sqrt(det theta) theta^{ii}
    std::vector<double> q1p_, q2p_;  // sqrt(det theta) theta^{ii}
    std::vector<double> mass_, plain_mass_;
    std::vector<double> stiff_diag_;  // diagonal of the weighted stiffness
    double total_mass_ = 0.0;
};

}  // namespace chfilm

#endif
