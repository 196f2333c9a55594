#include "chfilm/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "chfilm/averaging.hpp"
#include "chfilm/bulk_solver.hpp"
#include "chfilm/oracle.hpp"
#include "chfilm/surface_solver.hpp"

namespace chfilm {

namespace {

std::vector<double> default_snapshots(double T) {
    return {0.25 * T, 0.5 * T, 0.75 * T, T};
}

// Matched time step: tau = c_tau h^4 capped at the configured value; keeps
// the time error below the spatial and epsilon errors being measured.
double matched_tau(int n1, int n2, double cap) {
    const double h = std::max(1.0 / n1, 1.0 / n2);
    return std::min(1e3 * h * h * h * h, cap);
}

void validate_epsilons(const std::vector<double>& eps, const SurfaceChart& chart,
                       const ThicknessProfile& profile) {
    if (eps.size() < 3)
        throw ConfigError("study.epsilons: need at least 3 values");
    const double bound = max_epsilon(chart, profile);
    for (std::size_t q = 0; q < eps.size(); ++q) {
        if (!(eps[q] > 0.0) || eps[q] > bound)
            throw ConfigError("study.epsilons: value outside (0, tubular bound]");
        if (q > 0 && !(eps[q] < eps[q - 1]))
            throw ConfigError("study.epsilons: must be strictly decreasing");
    }
}

}  // namespace

ConvergenceReport run_convergence_study(const Config& cfg) {
    const SurfaceChart chart = make_chart(cfg);
    if (!chart.solver_eligible())
        throw ConfigError("surface.kind: chart is not solver-eligible");
    const ThicknessProfile profile = make_profile(cfg);
    const Potential F = make_potential(cfg);

    const int n1 = cfg.get_int("grid.n1", 48);
    const int n2 = cfg.get_int("grid.n2", 24);
    const int n3 = cfg.get_int("grid.n3", 8);
    const std::vector<double> epsilons =
        cfg.get_list("study.epsilons", {0.2, 0.1, 0.05, 0.025});
    validate_epsilons(epsilons, chart, profile);

    const double T = cfg.get_double("study.T", 0.5);
    const double tau = matched_tau(n1, n2, cfg.get_double("bulk.tau", 1e-4));
    const std::vector<double> snaps =
        cfg.get_list("bulk.snapshot_times", default_snapshots(T));
    const std::uint64_t seed = cfg.get_u64("bulk.seed", 1);

    const SurfaceGeometryCache scache(chart, profile, n1, n2);
    const SurfaceOperators sops(scache);
    const SurfaceField v0 = make_v0(cfg, n1, n2, seed);

    SurfaceStepperConfig scfg;
    scfg.tau = tau;
    scfg.stabilization = cfg.get_double("surface.stabilization", 2.0);
    scfg.tol_lin = cfg.get_double("surface.tol_lin", 1e-11);
    const SurfaceTrajectory straj = sops.run(v0, T, F, scfg, snaps);

    BulkStepperConfig bcfg;
    bcfg.tau = tau;
    bcfg.stabilization = cfg.get_double("bulk.stabilization", 2.0);
    bcfg.tol_lin = cfg.get_double("bulk.tol_lin", 1e-11);

    ConvergenceReport report;
    report.complete = true;
    for (const double eps : epsilons) {
        try {
            const ReferenceGrid grid(n1, n2, n3, eps);
            const PullbackCoefficients coeffs =
                build_coefficients(chart, profile, grid);
            const BulkOperators bops(coeffs);
            const AveragingContext ctx(bops, scache);

            BulkField u0 = bops.init_from_surface(v0);
            if (cfg.has("study.alpha")) {
                // Ill-prepared family: a thin-direction oscillation of
                // amplitude eps^{1-alpha}, Neumann-compatible at both faces.
                const double alpha = cfg.get_double("study.alpha", 0.0);
                const double amp = std::pow(eps, 1.0 - alpha);
                for (int k = 0; k <= n3; ++k) {
                    const double c =
                        amp * std::cos(2.0 * M_PI * k / static_cast<double>(n3));
                    for (int j = 0; j < n2; ++j)
                        for (int i = 0; i < n1; ++i) u0.at(i, j, k) += c;
                }
            }

            const BulkStepper stepper(bops, F, bcfg);
            const BulkTrajectory btraj = stepper.run(u0, T, snaps);
            if (btraj.snapshots.size() != straj.snapshots.size())
                throw SolverError("mismatched snapshot counts", SolveStats{});

            ConvergenceEntry entry;
            entry.epsilon = eps;
            for (std::size_t q = 0; q < btraj.snapshots.size(); ++q) {
                const BulkField& u = btraj.snapshots[q];
                const SurfaceField& v = straj.snapshots[q];
                SurfaceField diff = ctx.average(u);
                for (std::size_t p = 0; p < diff.values.size(); ++p)
                    diff.values[p] -= v.values[p];

                entry.error_L2 = std::max(
                    entry.error_L2, surface_norm(diff, SurfaceNormKind::L2, sops));
                entry.error_H1 = std::max(
                    entry.error_H1, surface_norm(diff, SurfaceNormKind::H1, sops));

                // The weighted mean of the difference vanishes up to the
                // linear-solver tolerance; project it off before L_g.
                SurfaceField zdiff = diff;
                const double mean = sops.weighted_mean(zdiff.values);
                for (double& x : zdiff.values) x -= mean;
                entry.error_Lg = std::max(
                    entry.error_Lg,
                    surface_norm(zdiff, SurfaceNormKind::Lg_semi, sops));

                const BulkDifference bd = bulk_difference(u, v, ctx);
                entry.error_bulk_u = std::max(entry.error_bulk_u, bd.e_u);
                entry.error_bulk_grad = std::max(entry.error_bulk_grad, bd.e_grad);
                entry.normal_deriv_scaled =
                    std::max(entry.normal_deriv_scaled,
                             bops.normal_derivative_norm(u) / std::sqrt(eps));
            }
            report.entries.push_back(entry);
        } catch (const std::exception&) {
            report.complete = false;
            break;
        }
    }

    if (report.entries.size() >= 3) {
        try {
            report.fit_all();
        } catch (const std::invalid_argument&) {
            // Degenerate (round-off level) errors: rates not applicable.
            report.complete = false;
        }
    } else {
        report.complete = false;
    }
    return report;
}

namespace {

const char* status_name(VerificationCheck::Status s) {
    switch (s) {
        case VerificationCheck::Status::pass: return "pass";
        case VerificationCheck::Status::fail: return "FAIL";
        case VerificationCheck::Status::skipped: return "skip";
    }
    return "?";
}

}  // namespace

std::string VerificationReport::to_text() const {
    std::string out;
    for (const auto& c : checks) {
        out += c.name;
        out.append(c.name.size() < 24 ? 24 - c.name.size() : 1, ' ');
        out += status_name(c.status);
        if (!c.detail.empty()) {
            out += "  ";
            out += c.detail;
        }
        out += '\n';
    }
    return out;
}

VerificationReport run_verification_suite(const Config& cfg) {
    VerificationReport rep;
    auto add = [&rep](const std::string& name, bool ok,
                      const std::string& detail = "") {
        rep.checks.push_back({name,
                              ok ? VerificationCheck::Status::pass
                                 : VerificationCheck::Status::fail,
                              detail});
        return ok;
    };
    auto skip = [&rep](const std::string& name) {
        rep.checks.push_back(
            {name, VerificationCheck::Status::skipped, "geometry invalid"});
    };
    char buf[160];

    const SurfaceChart chart = make_chart(cfg);
    const ThicknessProfile profile = make_profile(cfg);
    const Potential F = make_potential(cfg);
    const int n1 = cfg.get_int("grid.n1", 32);
    const int n2 = cfg.get_int("grid.n2", 16);
    const int n3 = cfg.get_int("grid.n3", 8);
    const double eps = cfg.get_double("epsilon", 0.1);
    const std::uint64_t seed = cfg.get_u64("bulk.seed", 1);

    // 1. Geometry validity: tubular-radius admissibility, determinant
    // identity, inverse recovery of the thin coordinate.
    PullbackCoefficients coeffs;
    bool geom_ok = false;
    std::string geom_detail;
    try {
        if (eps > max_epsilon(chart, profile))
            throw GeometryError("epsilon exceeds the tubular bound");
        coeffs = build_coefficients(chart, profile, ReferenceGrid(n1, n2, n3, eps));
        double worst_inv = 0.0;
        for (int i = 0; i < 5; ++i)
            worst_inv = std::max(
                worst_inv, inverse_check(chart, profile, eps, 0.13 + 0.17 * i,
                                         0.29 + 0.11 * i, eps * (0.2 * i)));
        geom_ok = coeffs.max_det_mismatch <= 1e-6 && worst_inv <= 1e-8;
        std::snprintf(buf, sizeof(buf), "det mismatch %.2e, inverse %.2e",
                      coeffs.max_det_mismatch, worst_inv);
        geom_detail = buf;
    } catch (const std::exception& e) {
        geom_detail = e.what();
    }
    add("geometry-identities", geom_ok, geom_detail);
    const char* names[] = {"ellipticity",     "pairing-identity",
                           "matched-data",    "mass-conservation",
                           "energy-monotone", "Lg-round-trip",
                           "oracle-agreement"};
    if (!geom_ok) {
        for (const char* n : names) skip(n);
        return rep;
    }

    const BulkOperators bops(coeffs);
    const SurfaceGeometryCache scache(chart, profile, n1, n2);
    const SurfaceOperators sops(scache);
    const AveragingContext ctx(bops, scache);
    const ReferenceGrid& grid = bops.grid();

    // 2. Ellipticity of the pulled-back coefficient matrix.
    std::snprintf(buf, sizeof(buf), "min Rayleigh %.3e", coeffs.min_rayleigh);
    add("ellipticity", coeffs.min_rayleigh > 0.0, buf);

    // 3. Pairing identity on random field pairs (relative residual).
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const BulkField u =
                random_bulk_field(grid, 0.0, 1.0, seed + 2 * trial);
            const SurfaceField eta = random_surface_field(
                n1, n2, 0.0, 1.0, seed + 2 * trial + 1);
            KahanSum rhs;
            const SurfaceField mu = ctx.average(u);
            for (int j = 0; j < n2; ++j)
                for (int i = 0; i < n1; ++i) {
                    const std::size_t q = scache.index(i, j);
                    rhs.add(eps * scache.g[q] * scache.area_weight(q) *
                            mu.values[q] * eta.values[q]);
                }
            const double scale = std::max(1.0, std::abs(rhs.value()));
            worst = std::max(worst, ctx.pairing_residual(u, eta) / scale);
        }
        std::snprintf(buf, sizeof(buf), "worst relative %.2e", worst);
        add("pairing-identity", worst <= 1e-12, buf);
    }

    // 4. Matched initial data: the average returns v0 exactly and the
    // weighted masses agree.
    {
        const SurfaceField v0 = make_v0(cfg, n1, n2, seed);
        const BulkField u0 = bops.init_from_surface(v0);
        const SurfaceField back = ctx.average(u0);
        double linf = 0.0;
        KahanSum smass;
        for (std::size_t q = 0; q < back.values.size(); ++q) {
            linf = std::max(linf, std::abs(back.values[q] - v0.values[q]));
            smass.add(eps * scache.g[q] * scache.area_weight(q) * v0.values[q]);
        }
        const double bmass = bops.weighted_mass(u0);
        const double mdiff = std::abs(bmass - smass.value()) /
                             std::max(1.0, std::abs(smass.value()));
        std::snprintf(buf, sizeof(buf), "sup %.2e, mass gap %.2e", linf, mdiff);
        add("matched-data", linf <= 1e-12 && mdiff <= 1e-12, buf);
    }

    // 5 & 6. Conservation and energy monotonicity along one short run of
    // each solver (the stabilization setting only affects the energy check).
    {
        BulkStepperConfig bcfg;
        bcfg.tau = cfg.get_double("bulk.tau", 1e-4);
        bcfg.stabilization = cfg.get_double("bulk.stabilization", 2.0);
        bcfg.tol_lin = cfg.get_double("bulk.tol_lin", 1e-11);
        SurfaceStepperConfig scfg;
        scfg.tau = cfg.get_double("surface.tau", bcfg.tau);
        scfg.stabilization = cfg.get_double("surface.stabilization", 2.0);
        scfg.tol_lin = cfg.get_double("surface.tol_lin", 1e-11);
        const int nsteps = 200;

        const BulkField u0 = random_bulk_field(grid, 0.1, 0.1, seed);
        const SurfaceField w0 = random_surface_field(n1, n2, 0.1, 0.1, seed + 1);

        double mass_drift = 0.0, energy_rise = 0.0;
        bool solver_ok = true;
        std::string solver_detail;
        try {
            const BulkStepper stepper(bops, F, bcfg);
            const BulkTrajectory bt = stepper.run(u0, nsteps * bcfg.tau);
            const SurfaceTrajectory st =
                sops.run(w0, nsteps * scfg.tau, F, scfg);
            const double bm0 = bt.records.front().mass;
            const double sm0 = st.records.front().weighted_mass;
            for (std::size_t q = 1; q < bt.records.size(); ++q) {
                mass_drift = std::max(mass_drift,
                                      std::abs(bt.records[q].mass - bm0) /
                                          std::max(1.0, std::abs(bm0)));
                energy_rise = std::max(energy_rise, bt.records[q].energy -
                                                        bt.records[q - 1].energy);
            }
            for (std::size_t q = 1; q < st.records.size(); ++q) {
                mass_drift = std::max(
                    mass_drift, std::abs(st.records[q].weighted_mass - sm0) /
                                    std::max(1.0, std::abs(sm0)));
                energy_rise =
                    std::max(energy_rise, st.records[q].weighted_energy -
                                              st.records[q - 1].weighted_energy);
            }
        } catch (const std::exception& e) {
            solver_ok = false;
            solver_detail = e.what();
        }
        std::snprintf(buf, sizeof(buf), "drift %.2e", mass_drift);
        add("mass-conservation", solver_ok && mass_drift <= 1e-10,
            solver_ok ? buf : solver_detail);
        std::snprintf(buf, sizeof(buf), "max rise %.2e", energy_rise);
        add("energy-monotone", solver_ok && energy_rise <= 1e-10,
            solver_ok ? buf : solver_detail);
    }

    // 7. L_g round trip on random weighted-mean-zero data.
    {
        double worst_res = 0.0, worst_mean = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            SurfaceField f = random_surface_field(n1, n2, 0.0, 1.0, seed + trial);
            const double mean = sops.weighted_mean(f.values);
            for (double& x : f.values) x -= mean;
            const SurfaceField phi = sops.solve_Lg(f, 1e-12);
            const SurfaceField back = sops.apply_Ag(phi);
            SurfaceField res(n1, n2);
            for (std::size_t q = 0; q < res.values.size(); ++q)
                res.values[q] = -back.values[q] - f.values[q];
            worst_res = std::max(
                worst_res, surface_norm(res, SurfaceNormKind::L2, sops));
            worst_mean =
                std::max(worst_mean, std::abs(sops.weighted_mean(phi.values)));
        }
        std::snprintf(buf, sizeof(buf), "residual %.2e, mean %.2e", worst_res,
                      worst_mean);
        add("Lg-round-trip", worst_res <= 1e-8 && worst_mean <= 1e-12, buf);
    }

    // 8. Grid bulk solver vs the spectral oracle on the flat sheet with
    // thin-direction-independent band-limited data; both use the same time
    // scheme, so the discrepancy is purely spatial.
    {
        bool ok = false;
        std::string detail;
        try {
            const int n = 64, m3 = 4;
            const double tau = cfg.get_double("oracle.tau", 1e-4), Tor = 0.01;
            const SurfaceChart flat = SurfaceChart::flat_sheet();
            const ThicknessProfile unit = ThicknessProfile::constant(0.0, 1.0);
            const PullbackCoefficients fc =
                build_coefficients(flat, unit, ReferenceGrid(n, n, m3, 0.1));
            const BulkOperators fops(fc);
            BulkField u0(fops.grid());
            SpectralCahnHilliard oracle(n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double s1 = static_cast<double>(i) / n;
                    const double s2 = static_cast<double>(j) / n;
                    const double val = 0.1 * std::sin(2.0 * M_PI * s1) +
                                       0.05 * std::cos(2.0 * M_PI * s2);
                    oracle.at(i, j) = val;
                    for (int k = 0; k <= m3; ++k) u0.at(i, j, k) = val;
                }
            BulkStepperConfig fcfg;
            fcfg.tau = tau;
            const BulkStepper fstep(fops, F, fcfg);
            BulkField u = u0, w(fops.grid());
            const int nsteps = static_cast<int>(std::llround(Tor / tau));
            for (int s = 0; s < nsteps; ++s) {
                fstep.step(u, w);
                oracle.step(tau, &F, fcfg.stabilization);
            }
            double linf = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    linf = std::max(linf, std::abs(u.at(i, j, 0) -
                                                   oracle.field()[static_cast<std::size_t>(j) * n + i]));
            std::snprintf(buf, sizeof(buf), "sup gap %.2e", linf);
            detail = buf;
            ok = linf <= 1e-3;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        add("oracle-agreement", ok, detail);
    }

    return rep;
}

ResidualSweep run_residual_sweep(const Config& cfg) {
    const SurfaceChart chart = make_chart(cfg);
    const ThicknessProfile profile = make_profile(cfg);
    const Potential F = make_potential(cfg);
    const int n1 = cfg.get_int("grid.n1", 48);
    const int n2 = cfg.get_int("grid.n2", 24);
    const int n3 = cfg.get_int("grid.n3", 8);
    const std::vector<double> epsilons =
        cfg.get_list("study.epsilons", {0.2, 0.1, 0.05});
    validate_epsilons(epsilons, chart, profile);

    const SurfaceGeometryCache scache(chart, profile, n1, n2);
    const SurfaceOperators sops(scache);
    const SurfaceField v0 = make_v0(cfg, n1, n2, cfg.get_u64("bulk.seed", 1));

    ResidualSweep sweep;
    for (const double eps : epsilons) {
        const PullbackCoefficients coeffs =
            build_coefficients(chart, profile, ReferenceGrid(n1, n2, n3, eps));
        const BulkOperators bops(coeffs);
        const AveragingContext ctx(bops, scache);
        const BulkField u = bops.init_from_surface(v0);

        ResidualSweepEntry e;
        e.epsilon = eps;
        const SurfaceField zd = ctx.residual_zeta_delta(u, sops);
        const SurfaceField zf = ctx.residual_zeta_F(u, F);
        e.zeta_delta_L2 = surface_norm(zd, SurfaceNormKind::L2, sops);
        e.zeta_F_L2 = surface_norm(zf, SurfaceNormKind::L2, sops);
        e.grad_zeta_delta_L2 = sops.grad_norm(zd, /*weighted=*/false);
        sweep.entries.push_back(e);
    }

    auto fit = [&sweep](double ResidualSweepEntry::* field) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& e : sweep.entries) pts.emplace_back(e.epsilon, e.*field);
        return fit_rate(pts);
    };
    sweep.rate_zeta_delta = fit(&ResidualSweepEntry::zeta_delta_L2);
    sweep.rate_zeta_F = fit(&ResidualSweepEntry::zeta_F_L2);
    sweep.rate_grad_zeta_delta = fit(&ResidualSweepEntry::grad_zeta_delta_L2);
    return sweep;
}

std::string ResidualSweep::to_csv() const {
    std::string out = "epsilon,zeta_delta_L2,zeta_F_L2,grad_zeta_delta_L2\n";
    char line[256];
    for (const auto& e : entries) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", e.epsilon,
                      e.zeta_delta_L2, e.zeta_F_L2, e.grad_zeta_delta_L2);
        out += line;
    }
    std::snprintf(line, sizeof(line), "fitted_slope,%.17g,%.17g,%.17g\n",
                  rate_zeta_delta.slope, rate_zeta_F.slope,
                  rate_grad_zeta_delta.slope);
    out += line;
    return out;
}

}  // namespace chfilm
