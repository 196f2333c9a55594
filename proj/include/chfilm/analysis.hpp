#ifndef CHFILM_ANALYSIS_HPP
#define CHFILM_ANALYSIS_HPP

#include <string>
#include <vector>

#include "chfilm/averaging.hpp"
#include "chfilm/surface_solver.hpp"

namespace chfilm {

enum class SurfaceNormKind { L2, H1, Lg_semi };

// L2 and H1 use the plain surface measure; Lg_semi is ||sqrt(g) grad L_g v||,
// the sharp difference metric of the limit estimate. Lg_semi requires
// weighted-mean-zero input (|mean| <= 1e-9).
double surface_norm(const SurfaceField& v, SurfaceNormKind kind,
                    const SurfaceOperators& ops);

double surface_norm_diff(const SurfaceField& a, const SurfaceField& b,
                         SurfaceNormKind kind, const SurfaceOperators& ops);

struct BulkDifference {
    double e_u = 0.0;     // eps^{-1/2} || U - v-bar ||
    double e_grad = 0.0;  // eps^{-1/2} || P-bar grad u - grad_Gamma v-bar ||
};

// Scaled bulk-vs-surface differences of the limit estimate.
BulkDifference bulk_difference(const BulkField& u, const SurfaceField& v,
                               const AveragingContext& ctx);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of log-log fit residuals
};

// Least-squares slope of log(error) against log(eps); needs >= 3 points with
// positive errors.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct ConvergenceEntry {
    double epsilon = 0.0;
    double error_L2 = 0.0;
    double error_H1 = 0.0;
    double error_Lg = 0.0;
    double error_bulk_u = 0.0;
    double error_bulk_grad = 0.0;
    double normal_deriv_scaled = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    RateFit rate_L2, rate_H1, rate_Lg, rate_bulk_u, rate_bulk_grad, rate_nd;
    double rate_threshold = 0.8;
    bool complete = false;

    bool pass_L2() const { return rate_L2.slope >= rate_threshold; }
    bool pass_Lg() const { return rate_Lg.slope >= rate_threshold; }
    bool pass_bulk_u() const { return rate_bulk_u.slope >= rate_threshold; }
    bool pass_bulk_grad() const { return rate_bulk_grad.slope >= rate_threshold; }
    bool pass_nd() const { return rate_nd.slope >= rate_threshold; }
    bool all_pass() const {
        return complete && pass_L2() && pass_Lg() && pass_bulk_u() &&
               pass_bulk_grad() && pass_nd();
    }

    void fit_all();
    std::string to_csv() const;
};

}  // namespace chfilm

#endif
