#include "chfilm/surface_solver.hpp"

#include <cmath>

namespace chfilm {

SurfaceOperators::SurfaceOperators(const SurfaceGeometryCache& cache)
    : cache_(&cache) {
    const std::size_t n = cache.size();
    q1w_.resize(n);
    q2w_.resize(n);
    q1p_.resize(n);
    q2p_.resize(n);
    mass_.resize(n);
    plain_mass_.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        q1p_[q] = cache.sqrt_det_theta[q] * cache.inv_theta11[q];
        q2p_[q] = cache.sqrt_det_theta[q] * cache.inv_theta22[q];
        q1w_[q] = cache.g[q] * q1p_[q];
        q2w_[q] = cache.g[q] * q2p_[q];
        plain_mass_[q] = cache.area_weight(q);
        mass_[q] = cache.g[q] * plain_mass_[q];
    }
    total_mass_ = kahan_total(mass_);

    // Stiffness diagonal for Jacobi preconditioning.
    stiff_diag_.assign(n, 0.0);
    const int n1 = cache.n1(), n2 = cache.n2();
    const double r1 = cache.h2() / cache.h1();
    const double r2 = cache.h1() / cache.h2();
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const std::size_t q = cache.index(i, j);
            const int il = (i + n1 - 1) % n1, ir = (i + 1) % n1;
            const int jl = (j + n2 - 1) % n2, jr = (j + 1) % n2;
            stiff_diag_[q] =
                0.5 * r1 * (q1w_[cache.index(il, j)] + 2.0 * q1w_[q] +
                            q1w_[cache.index(ir, j)]) +
                0.5 * r2 * (q2w_[cache.index(i, jl)] + 2.0 * q2w_[q] +
                            q2w_[cache.index(i, jr)]);
        }
    }
}

void SurfaceOperators::apply_stiffness(const std::vector<double>& v,
                                       std::vector<double>& y,
                                       bool weighted) const {
    const auto& c = *cache_;
    const int n1 = c.n1(), n2 = c.n2();
    const double r1 = c.h2() / c.h1();
    const double r2 = c.h1() / c.h2();
    const std::vector<double>& q1 = weighted ? q1w_ : q1p_;
    const std::vector<double>& q2 = weighted ? q2w_ : q2p_;
    y.assign(v.size(), 0.0);
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const std::size_t p = c.index(i, j);
            const std::size_t p1 = c.index((i + 1) % n1, j);
            const std::size_t p2 = c.index(i, (j + 1) % n2);
            const double f1 = 0.5 * (q1[p] + q1[p1]) * (v[p1] - v[p]) * r1;
            y[p] -= f1;
            y[p1] += f1;
            const double f2 = 0.5 * (q2[p] + q2[p2]) * (v[p2] - v[p]) * r2;
            y[p] -= f2;
            y[p2] += f2;
        }
    }
}

double SurfaceOperators::weighted_mean(const std::vector<double>& v) const {
    KahanSum s;
    for (std::size_t q = 0; q < v.size(); ++q) s.add(mass_[q] * v[q]);
    return s.value() / total_mass_;
}

SurfaceField SurfaceOperators::apply_Ag(const SurfaceField& v) const {
    SurfaceField out(v.n1, v.n2);
    apply_stiffness(v.values, out.values, true);
    for (std::size_t q = 0; q < out.values.size(); ++q)
        out.values[q] = -out.values[q] / mass_[q];
    return out;
}

SurfaceField SurfaceOperators::solve_Lg(const SurfaceField& f, double tol,
                                        double* projected_mean) const {
    const std::size_t n = f.values.size();
    std::vector<double> rhs(n);
    const double mean = weighted_mean(f.values);
    if (projected_mean) *projected_mean = mean;
    for (std::size_t q = 0; q < n; ++q) rhs[q] = mass_[q] * (f.values[q] - mean);

    auto apply = [this](const std::vector<double>& x, std::vector<double>& y) {
        apply_stiffness(x, y, true);
    };
    auto precond = [this](const std::vector<double>& r, std::vector<double>& z) {
        z.resize(r.size());
        for (std::size_t q = 0; q < r.size(); ++q) z[q] = r[q] / stiff_diag_[q];
    };

    SurfaceField phi(f.n1, f.n2);
    const SolveStats stats = pcg(apply, precond, rhs, phi.values, tol, 100000);
    if (!stats.converged) throw SolverError("L_g solve did not converge", stats);
    const double phi_mean = weighted_mean(phi.values);
    for (double& x : phi.values) x -= phi_mean;
    return phi;
}

void SurfaceOperators::step(SurfaceField& v, SurfaceField& mu, const Potential& F,
                            const SurfaceStepperConfig& cfg) const {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (!(cfg.tol_lin > 0.0 && cfg.tol_lin <= 1e-6))
        throw std::invalid_argument("tol_lin must lie in (0, 1e-6]");
    const std::size_t n = v.values.size();
    const double tau = cfg.tau, S = cfg.stabilization;

    // rhs = M v^n - tau K (F'(v^n) - S v^n)
    std::vector<double> fe(n), kfe(n), rhs(n);
    for (std::size_t q = 0; q < n; ++q)
        fe[q] = F.prime(v.values[q]) - S * v.values[q];
    apply_stiffness(fe, kfe, true);
    for (std::size_t q = 0; q < n; ++q)
        rhs[q] = mass_[q] * v.values[q] - tau * kfe[q];

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::vector<double> kx(n), mkx(n), kkx(n);
        apply_stiffness(x, kx, true);
        for (std::size_t q = 0; q < n; ++q) mkx[q] = kx[q] / mass_[q];
        apply_stiffness(mkx, kkx, true);
        y.resize(n);
        for (std::size_t q = 0; q < n; ++q)
            y[q] = mass_[q] * x[q] + tau * S * kx[q] + tau * kkx[q];
    };
    auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
        z.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            const double d = mass_[q] + tau * S * stiff_diag_[q] +
                             tau * stiff_diag_[q] * stiff_diag_[q] / mass_[q];
            z[q] = r[q] / d;
        }
    };

    SurfaceField vnext = v;  // warm start
    const SolveStats stats = pcg(apply, precond, rhs, vnext.values, cfg.tol_lin,
                                 cfg.max_iter);
    if (!stats.converged) throw SolverError("surface step solve failed", stats);

    // mu^{n+1} = -A_g v^{n+1} + F'(v^n) + S (v^{n+1} - v^n)
    std::vector<double> kv(n);
    apply_stiffness(vnext.values, kv, true);
    mu.n1 = v.n1;
    mu.n2 = v.n2;
    mu.values.resize(n);
    for (std::size_t q = 0; q < n; ++q)
        mu.values[q] = kv[q] / mass_[q] + F.prime(v.values[q]) +
                       S * (vnext.values[q] - v.values[q]);
    v = vnext;
}

double SurfaceOperators::energy(const SurfaceField& v, const Potential& F) const {
    std::vector<double> kv(v.values.size());
    apply_stiffness(v.values, kv, true);
    KahanSum s;
    for (std::size_t q = 0; q < v.values.size(); ++q)
        s.add(0.5 * v.values[q] * kv[q] + mass_[q] * F(v.values[q]));
    return s.value();
}

double SurfaceOperators::grad_norm(const SurfaceField& v, bool weighted) const {
    std::vector<double> kv(v.values.size());
    apply_stiffness(v.values, kv, weighted);
    return std::sqrt(std::max(0.0, dot(v.values, kv)));
}

SurfaceTrajectory SurfaceOperators::run(const SurfaceField& v0, double T,
                                        const Potential& F,
                                        const SurfaceStepperConfig& cfg,
                                        const std::vector<double>& snapshot_times) const {
    if (T < 0.0) throw std::invalid_argument("T must be nonnegative");
    SurfaceTrajectory traj;
    SurfaceField v = v0;
    SurfaceField mu(v0.n1, v0.n2);
    for (std::size_t q = 0; q < mu.values.size(); ++q)
        mu.values[q] = F.prime(v.values[q]);

    const int nsteps = static_cast<int>(std::llround(T / cfg.tau));
    std::size_t next_snap = 0;
    auto record = [&](int step, double time) {
        SurfaceLogRecord rec;
        rec.step = step;
        rec.time = time;
        KahanSum m;
        for (std::size_t q = 0; q < v.values.size(); ++q)
            m.add(mass_[q] * v.values[q]);
        rec.weighted_mass = m.value();
        rec.weighted_energy = energy(v, F);
        rec.grad_mu_norm = grad_norm(mu, true);
        traj.records.push_back(rec);
    };
    record(0, 0.0);
    for (int s = 1; s <= nsteps; ++s) {
        step(v, mu, F, cfg);
        const double time = s * cfg.tau;
        record(s, time);
        while (next_snap < snapshot_times.size() &&
               time >= snapshot_times[next_snap] - 0.5 * cfg.tau) {
            traj.snapshot_times.push_back(time);
            traj.snapshots.push_back(v);
            ++next_snap;
        }
    }
    traj.final_v = v;
    traj.final_mu = mu;
    return traj;
}

}  // namespace chfilm
