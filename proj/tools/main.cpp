#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chfilm/averaging.hpp"
#include "chfilm/bulk_solver.hpp"
#include "chfilm/config.hpp"
#include "chfilm/study.hpp"
#include "chfilm/surface_solver.hpp"

namespace fs = std::filesystem;
using namespace chfilm;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

std::string bulk_log_csv(const BulkTrajectory& traj) {
    std::string out = "step,time,mass,energy,grad_w_norm,normal_deriv_norm\n";
    for (const auto& r : traj.records)
        out += format("%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.time,
                      r.mass, r.energy, r.grad_w_norm, r.normal_deriv_norm);
    return out;
}

std::string surface_log_csv(const SurfaceTrajectory& traj) {
    std::string out = "step,time,weighted_mass,weighted_energy,grad_mu_norm\n";
    for (const auto& r : traj.records)
        out += format("%d,%.17g,%.17g,%.17g,%.17g\n", r.step, r.time,
                      r.weighted_mass, r.weighted_energy, r.grad_mu_norm);
    return out;
}

std::string snapshot_csv(const BulkField& u, double time) {
    const ReferenceGrid& g = u.grid;
    std::string out = format("# n1 %d\n# n2 %d\n# n3 %d\n# epsilon %.17g\n# time %.17g\n",
                             g.n1, g.n2, g.n3, g.eps, time);
    for (double v : u.values) out += format("%.17g\n", v);
    return out;
}

std::string surface_field_csv(const SurfaceField& v) {
    std::string out = "i,j,value\n";
    for (int j = 0; j < v.n2; ++j)
        for (int i = 0; i < v.n1; ++i)
            out += format("%d,%d,%.17g\n", i, j, v.at(i, j));
    return out;
}

struct Setup {
    SurfaceChart chart;
    ThicknessProfile profile;
    Potential potential;
    int n1, n2, n3;
    double eps;
    std::uint64_t seed;
};

Setup make_setup(const Config& cfg) {
    return {make_chart(cfg),
            make_profile(cfg),
            make_potential(cfg),
            cfg.get_int("grid.n1", 48),
            cfg.get_int("grid.n2", 24),
            cfg.get_int("grid.n3", 8),
            cfg.get_double("epsilon", 0.1),
            cfg.get_u64("bulk.seed", 1)};
}

int cmd_verify(const Config& cfg) {
    const VerificationReport rep = run_verification_suite(cfg);
    std::cout << rep.to_text();
    return rep.all_pass() ? 0 : 1;
}

int cmd_simulate_bulk(const Config& cfg, const fs::path& out_dir) {
    const Setup s = make_setup(cfg);
    const ReferenceGrid grid(s.n1, s.n2, s.n3, s.eps);
    const PullbackCoefficients coeffs =
        build_coefficients(s.chart, s.profile, grid);
    const BulkOperators ops(coeffs);

    const double T = cfg.get_double("bulk.T", 0.01);
    BulkStepperConfig bcfg;
    bcfg.tau = cfg.get_double("bulk.tau", 1e-4);
    bcfg.stabilization = cfg.get_double("bulk.stabilization", 2.0);
    bcfg.tol_lin = cfg.get_double("bulk.tol_lin", 1e-11);
    const std::vector<double> snaps = cfg.get_list("bulk.snapshot_times", {T});

    const SurfaceField v0 = make_v0(cfg, s.n1, s.n2, s.seed);
    const BulkField u0 = ops.init_from_surface(v0);
    const BulkStepper stepper(ops, s.potential, bcfg);
    const BulkTrajectory traj = stepper.run(u0, T, snaps);

    write_file(out_dir / "bulk_log.csv", bulk_log_csv(traj));
    for (std::size_t q = 0; q < traj.snapshots.size(); ++q)
        write_file(out_dir / format("bulk_snapshot_%03zu.csv", q),
                   snapshot_csv(traj.snapshots[q], traj.snapshot_times[q]));
    std::cout << "bulk run: " << traj.records.size() - 1 << " steps, "
              << traj.snapshots.size() << " snapshots -> " << out_dir.string()
              << "\n";
    return 0;
}

int cmd_simulate_surface(const Config& cfg, const fs::path& out_dir) {
    const Setup s = make_setup(cfg);
    const SurfaceGeometryCache cache(s.chart, s.profile, s.n1, s.n2);
    const SurfaceOperators ops(cache);

    const double T = cfg.get_double("surface.T", 0.01);
    SurfaceStepperConfig scfg;
    scfg.tau = cfg.get_double("surface.tau", 1e-4);
    scfg.stabilization = cfg.get_double("surface.stabilization", 2.0);
    scfg.tol_lin = cfg.get_double("surface.tol_lin", 1e-11);

    const SurfaceField v0 = make_v0(cfg, s.n1, s.n2, s.seed);
    const SurfaceTrajectory traj = ops.run(v0, T, s.potential, scfg);

    write_file(out_dir / "surface_log.csv", surface_log_csv(traj));
    write_file(out_dir / "surface_final.csv", surface_field_csv(traj.final_v));
    std::cout << "surface run: " << traj.records.size() - 1 << " steps -> "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_converge(const Config& cfg, const fs::path& out_dir) {
    const ConvergenceReport rep = run_convergence_study(cfg);
    write_file(out_dir / "convergence.csv", rep.to_csv());
    std::cout << rep.to_csv();
    std::cout << format("pass: L2 %d, Lg %d, bulk_u %d, bulk_grad %d, nd %d\n",
                        int(rep.pass_L2()), int(rep.pass_Lg()),
                        int(rep.pass_bulk_u()), int(rep.pass_bulk_grad()),
                        int(rep.pass_nd()));
    return rep.all_pass() ? 0 : 1;
}

int cmd_residual_sweep(const Config& cfg, const fs::path& out_dir) {
    const ResidualSweep sweep = run_residual_sweep(cfg);
    write_file(out_dir / "residuals.csv", sweep.to_csv());
    std::cout << sweep.to_csv();
    const bool ok =
        sweep.rate_zeta_delta.slope >= 0.8 && sweep.rate_zeta_F.slope >= 0.8;
    return ok ? 0 : 1;
}

int cmd_dump_coefficients(const Config& cfg, const fs::path& out_dir) {
    const Setup s = make_setup(cfg);
    const PullbackCoefficients coeffs = build_coefficients(
        s.chart, s.profile, ReferenceGrid(s.n1, s.n2, s.n3, s.eps));
    std::string out = "node,detjac,a11,a22,a33,a12,a13,a23\n";
    for (std::size_t q = 0; q < coeffs.detjac.size(); ++q) {
        const Sym3& A = coeffs.aeps[q];
        out += format("%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", q,
                      coeffs.detjac[q], A[0], A[1], A[2], A[3], A[4], A[5]);
    }
    write_file(out_dir / "coefficients.csv", out);
    std::cout << "wrote " << coeffs.detjac.size() << " rows -> "
              << (out_dir / "coefficients.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Cahn-Hilliard dynamics in curved thin shells and their thin-film "
        "limit on the underlying surface"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--out-dir", out_dir, "output directory for CSV reports");
    app.add_option("--seed", seed, "override bulk.seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    auto* sim_bulk = app.add_subcommand("simulate-bulk", "evolve the shell problem");
    auto* sim_surf =
        app.add_subcommand("simulate-surface", "evolve the limit problem");
    auto* converge =
        app.add_subcommand("converge", "thin-film convergence study");
    auto* residual =
        app.add_subcommand("residual-sweep", "averaging residual decay");
    auto* dump =
        app.add_subcommand("dump-coefficients", "export pullback coefficients");
    for (auto* sub : {verify, sim_bulk, sim_surf, converge, residual, dump})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = config_path.empty() ? Config{}
                                         : Config::parse_file(config_path);
        if (seed_set) cfg.set("bulk.seed", std::to_string(seed));
        const fs::path out(out_dir);
        fs::create_directories(out);

        if (verify->parsed()) return cmd_verify(cfg);
        if (sim_bulk->parsed()) return cmd_simulate_bulk(cfg, out);
        if (sim_surf->parsed()) return cmd_simulate_surface(cfg, out);
        if (converge->parsed()) return cmd_converge(cfg, out);
        if (residual->parsed()) return cmd_residual_sweep(cfg, out);
        if (dump->parsed()) return cmd_dump_coefficients(cfg, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
