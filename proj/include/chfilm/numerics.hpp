#ifndef CHFILM_NUMERICS_HPP
#define CHFILM_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chfilm {

// Compensated accumulator. All conservation logs are built from sums with a
// fixed lexicographic traversal order, so results are bit-reproducible.
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline double kahan_total(const std::vector<double>& xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// Minimal-standard linear congruential generator (Park-Miller, 48271 mod
// 2^31-1). Pinned explicitly so seeded runs are byte-identical across
// platforms; std::uniform_real_distribution is implementation-defined.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed % 2147483647u) {
        if (state_ == 0) state_ = 1;
    }
    std::uint32_t next() {
        state_ = static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(state_) * 48271u) % 2147483647u);
        return state_;
    }
    // Uniform in [0, 1).
    double uniform() { return (next() - 1) / 2147483646.0; }
    // Uniform in [-amp, amp].
    double symmetric(double amp) { return amp * (2.0 * uniform() - 1.0); }

private:
    std::uint32_t state_;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, const SolveStats& stats)
        : std::runtime_error(what), stats(stats) {}
    SolveStats stats;
};

using LinearOp = std::function<void(const std::vector<double>&, std::vector<double>&)>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

// Preconditioned conjugate gradients for SPD operators. Reductions run in a
// fixed order. Stops when ||r|| <= tol * ||b|| (or ||r|| <= tol for b = 0).
inline SolveStats pcg(const LinearOp& apply, const LinearOp& precond,
                      const std::vector<double>& b, std::vector<double>& x,
                      double tol, int max_iter) {
    const std::size_t n = b.size();
    std::vector<double> r(n), z(n), p(n), q(n);

    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    const double bnorm = std::sqrt(dot(b, b));
    const double target = (bnorm > 0.0) ? tol * bnorm : tol;

    SolveStats stats;
    double rnorm = std::sqrt(dot(r, r));
    if (rnorm <= target) {
        stats.converged = true;
        stats.relative_residual = (bnorm > 0.0) ? rnorm / bnorm : rnorm;
        return stats;
    }

    precond(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        apply(p, q);
        const double alpha = rz / dot(p, q);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = std::sqrt(dot(r, r));
        stats.iterations = it;
        if (rnorm <= target) {
            stats.converged = true;
            break;
        }
        precond(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    stats.relative_residual = (bnorm > 0.0) ? rnorm / bnorm : rnorm;
    return stats;
}

}  // namespace chfilm

#endif
