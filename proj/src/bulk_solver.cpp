#include "chfilm/bulk_solver.hpp"

#include <fftw3.h>

#include <cmath>

namespace chfilm {

BulkOperators::BulkOperators(const PullbackCoefficients& coeffs)
    : coeffs_(&coeffs) {
    const ReferenceGrid& g = coeffs.grid;
    const double vol = g.h1() * g.h2() * g.h3();
    mass_.resize(g.num_nodes());
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const std::size_t p = g.node(i, j, k);
                mass_[p] = coeffs.detjac[p] * vol * g.layer_weight(k);
            }
    total_mass_ = kahan_total(mass_);
}

void BulkOperators::apply_stiffness(const std::vector<double>& x,
                                    std::vector<double>& y,
                                    const std::vector<int>& cell_window) const {
    const ReferenceGrid& g = grid();
    const int n1 = g.n1, n2 = g.n2, n3 = g.n3;
    const double h1 = g.h1(), h2 = g.h2(), h3 = g.h3();
    const double w8 = h1 * h2 * h3 / 8.0;
    y.assign(x.size(), 0.0);

    std::vector<int> cis;
    if (cell_window.empty()) {
        cis.resize(n1);
        for (int i = 0; i < n1; ++i) cis[i] = i;
    } else {
        cis = cell_window;
    }

    const auto& A = coeffs_->aeps;
    for (int ck = 0; ck < n3; ++ck) {
        for (int cj = 0; cj < n2; ++cj) {
            const int cjp = (cj + 1) % n2;
            for (int ci : cis) {
                const int cip = (ci + 1) % n1;
                // Node indices of the 8 cell corners, [a][b][c].
                std::size_t p[2][2][2];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            p[a][b][c] = g.node(a ? cip : ci, b ? cjp : cj, ck + c);

                // Edge differences: one per direction and transverse corner.
                double ex[2][2], ey[2][2], ez[2][2];
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        ex[b][c] = (x[p[1][b][c]] - x[p[0][b][c]]) / h1;
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c)
                        ey[a][c] = (x[p[a][1][c]] - x[p[a][0][c]]) / h2;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        ez[a][b] = (x[p[a][b][1]] - x[p[a][b][0]]) / h3;

                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c) {
                            const Sym3& Aq = A[p[a][b][c]];
                            const double gx = ex[b][c], gy = ey[a][c], gz = ez[a][b];
                            const double fx =
                                w8 * (Aq[0] * gx + Aq[3] * gy + Aq[4] * gz) / h1;
                            const double fy =
                                w8 * (Aq[3] * gx + Aq[1] * gy + Aq[5] * gz) / h2;
                            const double fz =
                                w8 * (Aq[4] * gx + Aq[5] * gy + Aq[2] * gz) / h3;
                            y[p[1][b][c]] += fx;
                            y[p[0][b][c]] -= fx;
                            y[p[a][1][c]] += fy;
                            y[p[a][0][c]] -= fy;
                            y[p[a][b][1]] += fz;
                            y[p[a][b][0]] -= fz;
                        }
            }
        }
    }
}

BulkField BulkOperators::discrete_laplacian(const BulkField& u) const {
    BulkField out(grid());
    apply_stiffness(u.values, out.values);
    for (std::size_t q = 0; q < out.values.size(); ++q)
        out.values[q] = -out.values[q] / mass_[q];
    return out;
}

double BulkOperators::energy(const BulkField& u, const Potential& F) const {
    std::vector<double> ku(u.values.size());
    apply_stiffness(u.values, ku);
    KahanSum s;
    for (std::size_t q = 0; q < u.values.size(); ++q)
        s.add(0.5 * u.values[q] * ku[q] + mass_[q] * F(u.values[q]));
    return s.value();
}

double BulkOperators::grad_norm(const BulkField& u) const {
    std::vector<double> ku(u.values.size());
    apply_stiffness(u.values, ku);
    return std::sqrt(std::max(0.0, dot(u.values, ku)));
}

double BulkOperators::normal_derivative_norm(const BulkField& u) const {
    const ReferenceGrid& g = grid();
    const double h3 = g.h3();
    KahanSum s;
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const std::size_t p = g.node(i, j, k);
                double du;
                if (k == 0)
                    du = (-3.0 * u.at(i, j, 0) + 4.0 * u.at(i, j, 1) -
                          u.at(i, j, 2)) /
                         (2.0 * h3);
                else if (k == g.n3)
                    du = (3.0 * u.at(i, j, k) - 4.0 * u.at(i, j, k - 1) +
                          u.at(i, j, k - 2)) /
                         (2.0 * h3);
                else
                    du = (u.at(i, j, k + 1) - u.at(i, j, k - 1)) / (2.0 * h3);
                const double dnu = du / coeffs_->gval[g.column(i, j)];
                s.add(mass_[p] * dnu * dnu);
            }
    return std::sqrt(s.value());
}

double BulkOperators::weighted_mass(const BulkField& u) const {
    KahanSum s;
    for (std::size_t q = 0; q < u.values.size(); ++q)
        s.add(mass_[q] * u.values[q]);
    return s.value();
}

BulkField BulkOperators::init_from_surface(const SurfaceField& v0) const {
    const ReferenceGrid& g = grid();
    if (v0.n1 != g.n1 || v0.n2 != g.n2)
        throw std::invalid_argument("surface grid does not match the bulk grid");
    BulkField u(g);
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                u.at(i, j, k) =
                    v0.at(i, j) / coeffs_->jval[g.node(i, j, k)];
    return u;
}

FourierBlockPreconditioner::FourierBlockPreconditioner(const BulkOperators& ops,
                                                       double tau, double S) {
    const ReferenceGrid& g = ops.grid();
    n1_ = g.n1;
    nlines_ = g.n2 * (g.n3 + 1);
    const int N = nlines_;
    const std::size_t nn = g.num_nodes();
    const auto& mass = ops.mass();

    auto schur_apply = [&](const std::vector<double>& x, std::vector<double>& y,
                           const std::vector<int>& win1,
                           const std::vector<int>& win2) {
        std::vector<double> kx(nn), mkx(nn), kkx(nn);
        ops.apply_stiffness(x, kx, win1);
        for (std::size_t q = 0; q < nn; ++q) mkx[q] = kx[q] / mass[q];
        ops.apply_stiffness(mkx, kkx, win2);
        y.resize(nn);
        for (std::size_t q = 0; q < nn; ++q)
            y[q] = mass[q] * x[q] + tau * S * kx[q] + tau * kkx[q];
    };

    // Probe the Schur stencil at i = 0; it has width two in the periodic s1
    // direction, so only cells i in {-2, ..., 1} can contribute.
    auto wrap = [&](int i) { return (i % n1_ + n1_) % n1_; };
    const std::vector<int> win1 = {wrap(-1), wrap(0)};
    const std::vector<int> win2 = {wrap(-2), wrap(-1), wrap(0), wrap(1)};

    std::vector<Eigen::MatrixXd> kernel(5);  // offsets -2..2
    for (auto& m : kernel) m.setZero(N, N);
    std::vector<double> x(nn, 0.0), y;
    for (int line = 0; line < N; ++line) {
        x[static_cast<std::size_t>(line) * n1_] = 1.0;
        schur_apply(x, y, win1, win2);
        x[static_cast<std::size_t>(line) * n1_] = 0.0;
        for (int m = -2; m <= 2; ++m)
            for (int q = 0; q < N; ++q)
                kernel[m + 2](q, line) =
                    y[static_cast<std::size_t>(q) * n1_ + wrap(m)];
    }
    // With s1-dependent coefficients the frozen stencil need not be exactly
    // symmetric; symmetrize so the preconditioner stays SPD.
    kernel[2] = 0.5 * (kernel[2] + kernel[2].transpose()).eval();
    for (int m = 1; m <= 2; ++m) {
        const Eigen::MatrixXd sym =
            0.5 * (kernel[2 + m] + kernel[2 - m].transpose());
        kernel[2 + m] = sym;
        kernel[2 - m] = sym.transpose();
    }

    factors_.reserve(n1_);
    for (int k = 0; k < n1_; ++k) {
        Eigen::MatrixXcd Bk = Eigen::MatrixXcd::Zero(N, N);
        for (int m = -2; m <= 2; ++m) {
            const double phase = -2.0 * M_PI * k * m / n1_;
            Bk += kernel[m + 2] * std::complex<double>(std::cos(phase),
                                                       std::sin(phase));
        }
        factors_.emplace_back(Bk);
    }

    buffer_.resize(nn);
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_.data());
    fwd_plan_ = fftw_plan_many_dft(1, &n1_, nlines_, buf, nullptr, 1, n1_, buf,
                                   nullptr, 1, n1_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_plan_ = fftw_plan_many_dft(1, &n1_, nlines_, buf, nullptr, 1, n1_, buf,
                                   nullptr, 1, n1_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FourierBlockPreconditioner::~FourierBlockPreconditioner() {
    if (fwd_plan_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
    if (bwd_plan_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_plan_));
}

void FourierBlockPreconditioner::apply(const std::vector<double>& r,
                                       std::vector<double>& z) const {
    const int N = nlines_;
    for (std::size_t q = 0; q < r.size(); ++q)
        buffer_[q] = std::complex<double>(r[q], 0.0);
    fftw_execute(static_cast<fftw_plan>(fwd_plan_));

    Eigen::VectorXcd rhs(N);
    for (int k = 0; k < n1_; ++k) {
        for (int line = 0; line < N; ++line)
            rhs(line) = buffer_[static_cast<std::size_t>(line) * n1_ + k];
        const Eigen::VectorXcd sol = factors_[k].solve(rhs);
        for (int line = 0; line < N; ++line)
            buffer_[static_cast<std::size_t>(line) * n1_ + k] = sol(line);
    }

    fftw_execute(static_cast<fftw_plan>(bwd_plan_));
    z.resize(r.size());
    const double scale = 1.0 / n1_;
    for (std::size_t q = 0; q < r.size(); ++q)
        z[q] = buffer_[q].real() * scale;
}

BulkStepper::BulkStepper(const BulkOperators& ops, const Potential& F,
                         const BulkStepperConfig& cfg)
    : ops_(&ops), potential_(&F), cfg_(cfg) {
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (!(cfg.tol_lin > 0.0 && cfg.tol_lin <= 1e-6))
        throw std::invalid_argument("tol_lin must lie in (0, 1e-6]");
    precond_ = std::make_unique<FourierBlockPreconditioner>(ops, cfg.tau,
                                                            cfg.stabilization);
}

SolveStats BulkStepper::step(BulkField& u, BulkField& w) const {
    const std::size_t n = u.values.size();
    const auto& mass = ops_->mass();
    const double tau = cfg_.tau, S = cfg_.stabilization;

    std::vector<double> fe(n), kfe(n), rhs(n);
    for (std::size_t q = 0; q < n; ++q)
        fe[q] = potential_->prime(u.values[q]) - S * u.values[q];
    ops_->apply_stiffness(fe, kfe);
    for (std::size_t q = 0; q < n; ++q)
        rhs[q] = mass[q] * u.values[q] - tau * kfe[q];

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::vector<double> kx(n), mkx(n), kkx(n);
        ops_->apply_stiffness(x, kx);
        for (std::size_t q = 0; q < n; ++q) mkx[q] = kx[q] / mass[q];
        ops_->apply_stiffness(mkx, kkx);
        y.resize(n);
        for (std::size_t q = 0; q < n; ++q)
            y[q] = mass[q] * x[q] + tau * S * kx[q] + tau * kkx[q];
    };
    auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
        precond_->apply(r, z);
    };

    BulkField unext = u;  // warm start
    const SolveStats stats =
        pcg(apply, precond, rhs, unext.values, cfg_.tol_lin, cfg_.max_iter);
    if (!stats.converged) throw SolverError("bulk step solve failed", stats);

    std::vector<double> ku(n);
    ops_->apply_stiffness(unext.values, ku);
    w.grid = u.grid;
    w.values.resize(n);
    for (std::size_t q = 0; q < n; ++q)
        w.values[q] = ku[q] / mass[q] + potential_->prime(u.values[q]) +
                      S * (unext.values[q] - u.values[q]);
    u = unext;
    return stats;
}

BulkTrajectory BulkStepper::run(const BulkField& u0, double T,
                                const std::vector<double>& snapshot_times) const {
    if (T < 0.0) throw std::invalid_argument("T must be nonnegative");
    BulkTrajectory traj;
    BulkField u = u0;
    BulkField w(u0.grid);
    for (std::size_t q = 0; q < w.values.size(); ++q)
        w.values[q] = potential_->prime(u.values[q]);

    const int nsteps = static_cast<int>(std::llround(T / cfg_.tau));
    std::size_t next_snap = 0;
    KahanSum dissipation;
    auto record = [&](int step, double time) {
        BulkLogRecord rec;
        rec.step = step;
        rec.time = time;
        rec.mass = ops_->weighted_mass(u);
        rec.energy = ops_->energy(u, *potential_);
        rec.grad_w_norm = ops_->grad_norm(w);
        rec.normal_deriv_norm = ops_->normal_derivative_norm(u);
        rec.cumulative_dissipation = dissipation.value();
        traj.records.push_back(rec);
    };
    record(0, 0.0);
    for (int s = 1; s <= nsteps; ++s) {
        try {
            step(u, w);
        } catch (const SolverError& e) {
            throw SolverError("bulk run aborted at step " + std::to_string(s) +
                                  ": " + e.what(),
                              e.stats);
        }
        const double gw = ops_->grad_norm(w);
        dissipation.add(cfg_.tau * gw * gw);
        const double time = s * cfg_.tau;
        record(s, time);
        while (next_snap < snapshot_times.size() &&
               time >= snapshot_times[next_snap] - 0.5 * cfg_.tau) {
            traj.snapshot_times.push_back(time);
            traj.snapshots.push_back(u);
            ++next_snap;
        }
    }
    traj.final_u = u;
    traj.final_w = w;
    return traj;
}

BulkField random_bulk_field(const ReferenceGrid& grid, double mean, double amp,
                            std::uint64_t seed) {
    BulkField u(grid);
    Lcg rng(seed);
    for (double& x : u.values) x = mean + rng.symmetric(amp);
    return u;
}

SurfaceField random_surface_field(int n1, int n2, double mean, double amp,
                                  std::uint64_t seed) {
    SurfaceField v(n1, n2);
    Lcg rng(seed);
    for (double& x : v.values) x = mean + rng.symmetric(amp);
    return v;
}

}  // namespace chfilm
