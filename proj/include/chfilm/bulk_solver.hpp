#ifndef CHFILM_BULK_SOLVER_HPP
#define CHFILM_BULK_SOLVER_HPP

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "chfilm/numerics.hpp"
#include "chfilm/potential.hpp"
#include "chfilm/pullback.hpp"
#include "chfilm/surface_geometry.hpp"

namespace chfilm {

// Scalar field on the reference grid (order parameter or potential pulled
// back to the box).
struct BulkField {
    ReferenceGrid grid;
    std::vector<double> values;

    BulkField() = default;
    explicit BulkField(const ReferenceGrid& g)
        : grid(g), values(g.num_nodes(), 0.0) {}

    double& at(int i, int j, int k) { return values[grid.node(i, j, k)]; }
    double at(int i, int j, int k) const { return values[grid.node(i, j, k)]; }
};

struct BulkStepperConfig {
    double tau = 1e-4;
    double stabilization = 2.0;
    double tol_lin = 1e-11;
    int max_iter = 20000;
};

struct BulkLogRecord {
    int step = 0;
    double time = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double grad_w_norm = 0.0;
    double normal_deriv_norm = 0.0;
    // Running sum of tau * |grad w|^2; E(u^n) + dissipation tracks E(u^0).
    double cumulative_dissipation = 0.0;
};

struct BulkTrajectory {
    std::vector<BulkLogRecord> records;
    std::vector<double> snapshot_times;
    std::vector<BulkField> snapshots;
    BulkField final_u, final_w;
};

// Divergence-form operators on the reference grid: the stiffness form
// (A_eps grad U, grad Phi), its lumped mass, and derived quantities. The
// stencil is assembled cell by cell from corner gradients, which reduces to
// centered face-averaged fluxes for diagonal A_eps; boundary fluxes in s3 are
// dropped (homogeneous Neumann), s1 and s2 wrap.
class BulkOperators {
public:
    explicit BulkOperators(const PullbackCoefficients& coeffs);

    const PullbackCoefficients& coeffs() const { return *coeffs_; }
    const ReferenceGrid& grid() const { return coeffs_->grid; }
    const std::vector<double>& mass() const { return mass_; }
    double total_mass() const { return total_mass_; }

    // y = K x; if cell_window is nonempty only cells with those i-indices
    // contribute (used when probing the operator column by column).
    void apply_stiffness(const std::vector<double>& x, std::vector<double>& y,
                         const std::vector<int>& cell_window = {}) const;

    // L U = (1/detjac) div(A_eps grad U) = -M^{-1} K U.
    BulkField discrete_laplacian(const BulkField& u) const;

    double energy(const BulkField& u, const Potential& F) const;
    double grad_norm(const BulkField& u) const;  // sqrt(u^T K u)
    double normal_derivative_norm(const BulkField& u) const;
    double weighted_mass(const BulkField& u) const;  // sum detjac-weights * u

    BulkField init_from_surface(const SurfaceField& v0) const;

private:
    const PullbackCoefficients* coeffs_;
    std::vector<double> mass_;
    double total_mass_ = 0.0;
};

// Block-diagonal solver for the Schur operator B = M + tau S K + tau K M^-1 K
// after a discrete Fourier transform along the periodic s1 direction. Exact
// when the coefficients do not depend on s1 (torus, flat sheet with constant
// thickness); otherwise it preconditions CG with the s1-frozen stencil.
class FourierBlockPreconditioner {
public:
    FourierBlockPreconditioner(const BulkOperators& ops, double tau, double S);
    ~FourierBlockPreconditioner();
    FourierBlockPreconditioner(const FourierBlockPreconditioner&) = delete;
    FourierBlockPreconditioner& operator=(const FourierBlockPreconditioner&) = delete;

    void apply(const std::vector<double>& r, std::vector<double>& z) const;

private:
    int n1_, nlines_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> factors_;
    void* fwd_plan_ = nullptr;
    void* bwd_plan_ = nullptr;
    mutable std::vector<std::complex<double>> buffer_;
};

// Time integrator for the bulk Cahn-Hilliard system; owns the preconditioner
// for its fixed (tau, S) pair.
class BulkStepper {
public:
    BulkStepper(const BulkOperators& ops, const Potential& F,
                const BulkStepperConfig& cfg);

    // Advances u one step and writes the new chemical potential into w.
    SolveStats step(BulkField& u, BulkField& w) const;

    BulkTrajectory run(const BulkField& u0, double T,
                       const std::vector<double>& snapshot_times = {}) const;

    const BulkOperators& ops() const { return *ops_; }
    const BulkStepperConfig& config() const { return cfg_; }

private:
    const BulkOperators* ops_;
    const Potential* potential_;
    BulkStepperConfig cfg_;
    std::unique_ptr<FourierBlockPreconditioner> precond_;
};

// Seeded random perturbation around a mean value, filled in lexicographic
// node order with the pinned LCG.
BulkField random_bulk_field(const ReferenceGrid& grid, double mean, double amp,
                            std::uint64_t seed);
SurfaceField random_surface_field(int n1, int n2, double mean, double amp,
                                  std::uint64_t seed);

}  // namespace chfilm

#endif
