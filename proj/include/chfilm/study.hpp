#ifndef CHFILM_STUDY_HPP
#define CHFILM_STUDY_HPP

#include <string>
#include <vector>

#include "chfilm/analysis.hpp"
#include "chfilm/config.hpp"

namespace chfilm {

// Convergence study: for each epsilon, co-evolve the bulk shell problem and
// the limit surface problem from matched data with a matched time step, take
// the sup over snapshot times of every difference metric, then fit log-log
// rates against epsilon.
ConvergenceReport run_convergence_study(const Config& cfg);

struct VerificationCheck {
    enum class Status { pass, fail, skipped };
    std::string name;
    Status status = Status::skipped;
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status != VerificationCheck::Status::pass) return false;
        return !checks.empty();
    }
    std::string to_text() const;
};

// One line per invariant: geometry identities, ellipticity, pairing
// exactness, matched data, conservation, energy monotonicity, L_g round
// trip, oracle equivalence. A geometry failure skips the dependent checks.
VerificationReport run_verification_suite(const Config& cfg);

struct ResidualSweepEntry {
    double epsilon = 0.0;
    double zeta_delta_L2 = 0.0;
    double zeta_F_L2 = 0.0;
    double grad_zeta_delta_L2 = 0.0;
};

struct ResidualSweep {
    std::vector<ResidualSweepEntry> entries;
    RateFit rate_zeta_delta, rate_zeta_F, rate_grad_zeta_delta;
    std::string to_csv() const;
};

// Residuals of the averaging calculus on the manufactured field u = v0-bar/J.
ResidualSweep run_residual_sweep(const Config& cfg);

}  // namespace chfilm

#endif
