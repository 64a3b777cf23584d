// qgpe: ground-state search, time evolution, linear response and reference
// oracles for one-dimensional Bose gases on the cMPS manifold.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qgpe/qgpe.hpp"

namespace fs = std::filesystem;
using namespace qgpe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitIntegration = 3;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    return out;
}

struct CommonOpts {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->set_config("--config", "", "key = value configuration file");
    cmd->add_option("--out-dir", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
    cmd->add_option("--threads", c.threads, "worker threads for momentum sweeps")
        ->envname("QGPE_THREADS");
}

// ---- ground ---------------------------------------------------------------

int cmd_ground(const CommonOpts& c, int D, double g, double mu, double gamma_target,
               double tol, int max_steps, double dt0) {
    if (D < 1 || !(g >= 0) || !(tol > 0)) throw ConfigError("invalid ground parameters");
    fs::create_directories(c.out_dir);

    GroundStateOptions opt;
    opt.tol = tol;
    opt.max_steps = max_steps;
    opt.seed = c.seed;
    opt.dt0 = dt0;

    GroundStateResult res;
    double mu_used = mu;
    if (gamma_target > 0) {
        CalibrationResult cal = find_mu_for_gamma(g, gamma_target, D, opt, mu);
        res = cal.ground;
        mu_used = cal.mu;
    } else {
        if (!(mu > 0)) throw ConfigError("ground: mu must be positive (or give --gamma)");
        LiebLinigerParams p;
        p.g = g;
        p.mu = mu;
        res = imaginary_time_ground_state(p, D, opt);
    }

    save_checkpoint((fs::path(c.out_dir) / "ground_checkpoint.json").string(), res.state);

    Json report;
    report["energy_density"] = res.energy;
    report["particle_density"] = res.density;
    report["gamma"] = g / res.density;
    report["grad_norm"] = res.grad_norm;
    report["steps"] = res.steps;
    report["converged"] = res.converged;
    report["D"] = D;
    report["g"] = g;
    report["mu"] = mu_used;
    report["seed"] = c.seed;
    open_out(fs::path(c.out_dir) / "ground_report.json") << report.dump(2) << "\n";

    auto csv = open_out(fs::path(c.out_dir) / "ground_trace.csv");
    csv << "step,tau,energy,grad_norm,dt\n";
    for (const auto& rec : res.trace)
        csv << rec.step << "," << fmt(rec.tau) << "," << fmt(rec.energy) << ","
            << fmt(rec.grad_norm) << "," << fmt(rec.dt) << "\n";

    std::printf("%s\n", report.dump(2).c_str());
    return res.converged ? kExitOk : kExitNoConvergence;
}

// ---- evolve ---------------------------------------------------------------

int cmd_evolve(const CommonOpts& c, const std::string& checkpoint, const std::string& mode,
               double g, double mu, double t_end, double dt) {
    fs::create_directories(c.out_dir);
    CheckpointState loaded = load_checkpoint(checkpoint);
    LiebLinigerParams p;
    p.g = g;
    p.mu = mu;
    TimeMode tm;
    if (mode == "real")
        tm = TimeMode::Real;
    else if (mode == "imaginary")
        tm = TimeMode::Imaginary;
    else
        throw ConfigError("evolve: mode must be real or imaginary");

    const fs::path traj_path = fs::path(c.out_dir) / "evolve_trajectory.csv";
    const fs::path ckpt_path = fs::path(c.out_dir) / "evolve_checkpoint.json";

    if (std::holds_alternative<UniformCmps>(loaded)) {
        UniformCmps state = std::get<UniformCmps>(loaded);
        if (!(dt > 0)) dt = 1e-3;
        auto csv = open_out(traj_path);
        csv << "time,energy,density,canonical_residual\n";
        const int nsteps = std::max(1, static_cast<int>(std::llround(t_end / dt)));
        double t = 0.0;
        int code = kExitOk;
        // one RK4 step per call so the last good state survives a failure
        try {
            UniformEvolutionResult first = real_time_evolve(state, p, 0.0, dt, tm);
            const auto& p0 = first.trajectory.front();
            csv << fmt(p0.t) << "," << fmt(p0.energy) << "," << fmt(p0.density) << ","
                << fmt(p0.canonical_residual) << "\n";
            for (int i = 0; i < nsteps; ++i) {
                UniformEvolutionResult seg =
                    real_time_evolve(state, p, dt, dt, tm, tm == TimeMode::Imaginary);
                state = seg.state;
                t += dt;
                const auto& pt = seg.trajectory.back();
                csv << fmt(t) << "," << fmt(pt.energy) << "," << fmt(pt.density) << ","
                    << fmt(pt.canonical_residual) << "\n";
            }
        } catch (const StepTooLarge&) {
            code = kExitIntegration;
        } catch (const NonFiniteDerivative&) {
            code = kExitIntegration;
        }
        save_checkpoint(ckpt_path.string(), state);
        return code;
    }

    FiniteCmps state = std::get<FiniteCmps>(loaded);
    if (!(dt > 0)) dt = state.dx() * state.dx() / 8.0;
    auto csv = open_out(traj_path);
    csv << "time,energy,particles,norm_spread\n";
    int code = kExitOk;
    try {
        if (tm == TimeMode::Imaginary) {
            FiniteEvolutionResult res = imaginary_time_evolve(state, p, t_end, dt);
            for (const auto& pt : res.trajectory)
                csv << fmt(pt.t) << "," << fmt(pt.energy) << "," << fmt(pt.particles) << ","
                    << fmt(pt.norm_spread) << "\n";
            state = res.state;
        } else {
            const int nsteps = std::max(1, static_cast<int>(std::llround(t_end / dt)));
            FiniteEvolutionResult first = real_time_evolve(state, p, 0.0, dt);
            const auto& p0 = first.trajectory.front();
            csv << fmt(p0.t) << "," << fmt(p0.energy) << "," << fmt(p0.particles) << ","
                << fmt(p0.norm_spread) << "\n";
            double t = 0.0;
            for (int i = 0; i < nsteps; ++i) {
                FiniteEvolutionResult seg = real_time_evolve(state, p, dt, dt);
                state = seg.state;
                t += dt;
                const auto& pt = seg.trajectory.back();
                csv << fmt(t) << "," << fmt(pt.energy) << "," << fmt(pt.particles) << ","
                    << fmt(pt.norm_spread) << "\n";
            }
        }
    } catch (const StepTooLarge&) {
        code = kExitIntegration;
    } catch (const NonFiniteDerivative&) {
        code = kExitIntegration;
    }
    save_checkpoint(ckpt_path.string(), state);
    return code;
}

// ---- respond / spectrum -----------------------------------------------------

GroundStateBundle bundle_from_checkpoint(const std::string& checkpoint, double g, double mu) {
    CheckpointState loaded = load_checkpoint(checkpoint);
    if (!std::holds_alternative<UniformCmps>(loaded))
        throw ConfigError("response commands need a uniform ground-state checkpoint");
    LiebLinigerParams p;
    p.g = g;
    p.mu = mu;
    return prepare_bundle(std::get<UniformCmps>(loaded), p);
}

std::vector<double> momentum_grid(double kmin, double kmax, int nk, double kf) {
    std::vector<double> ks;
    for (int i = 0; i < nk; ++i) {
        double f = nk == 1 ? kmin : kmin + (kmax - kmin) * i / (nk - 1);
        ks.push_back(f * kf);
    }
    return ks;
}

int cmd_respond(const CommonOpts& c, const std::string& checkpoint, double g, double mu,
                double kmin, double kmax, int nk, double omega) {
    fs::create_directories(c.out_dir);
    GroundStateBundle b = bundle_from_checkpoint(checkpoint, g, mu);
    const double kf = M_PI * b.density;
    std::vector<double> ks = momentum_grid(kmin, kmax, nk, kf);

    std::vector<SweepEntry> table = sweep_k(b, ks, omega, c.threads);
    auto csv = open_out(fs::path(c.out_dir) / "response.csv");
    csv << "k_over_kf,amplitude,residual,error\n";
    size_t ok_count = 0;
    for (const auto& e : table) {
        csv << fmt(e.k / kf) << "," << fmt(e.amplitude) << "," << fmt(e.residual) << ","
            << (e.ok ? "" : e.error) << "\n";
        if (e.ok) ++ok_count;
    }
    if (table.empty()) return kExitOk;
    return (10 * ok_count >= 9 * table.size()) ? kExitOk : kExitIntegration;
}

int cmd_spectrum(const CommonOpts& c, const std::string& checkpoint, double g, double mu,
                 double kmin, double kmax, int nk, int n_modes) {
    fs::create_directories(c.out_dir);
    GroundStateBundle b = bundle_from_checkpoint(checkpoint, g, mu);
    const double kf = M_PI * b.density;
    std::vector<double> ks = momentum_grid(kmin, kmax, nk, kf);

    auto csv = open_out(fs::path(c.out_dir) / "spectrum.csv");
    csv << "k";
    for (int m = 1; m <= n_modes; ++m) csv << ",omega_" << m;
    csv << ",error\n";
    for (double k : ks) {
        csv << fmt(k);
        try {
            std::vector<double> ws = excitation_spectrum(b, k, n_modes);
            for (int m = 0; m < n_modes; ++m)
                csv << "," << (m < static_cast<int>(ws.size()) ? fmt(ws[m]) : "");
            csv << ",\n";
        } catch (const std::exception& ex) {
            for (int m = 0; m < n_modes; ++m) csv << ",";
            csv << "," << ex.what() << "\n";
        }
    }
    return kExitOk;
}

// ---- oracle -------------------------------------------------------------------

int cmd_oracle_bethe(const CommonOpts& c, double gamma, int n_quad) {
    Json j;
    j["gamma"] = gamma;
    j["e"] = bethe_ground_energy(gamma, n_quad);
    j["n_quad"] = n_quad;
    std::printf("%s\n", j.dump(2).c_str());
    if (c.out_dir != ".") {
        fs::create_directories(c.out_dir);
        open_out(fs::path(c.out_dir) / "oracle_bethe.json") << j.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_oracle_bogoliubov(const CommonOpts& c, double k, double g, double rho) {
    Json j;
    j["k"] = k;
    j["g"] = g;
    j["rho"] = rho;
    j["omega"] = bogoliubov_dispersion(k, g, rho);
    std::printf("%s\n", j.dump(2).c_str());
    if (c.out_dir != ".") {
        fs::create_directories(c.out_dir);
        open_out(fs::path(c.out_dir) / "oracle_bogoliubov.json") << j.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum Gross-Pitaevskii simulations for the 1D Bose gas"};
    app.require_subcommand(1);

    CommonOpts common;

    // ground
    int D = 1;
    double g = 1.0, mu = 1.0, gamma_target = 0.0, tol = 1e-8, dt0 = 1e-3;
    int max_steps = 200000;
    CLI::App* ground = app.add_subcommand("ground", "imaginary-time ground-state search");
    add_common(ground, common);
    ground->add_option("--D", D, "bond dimension")->capture_default_str();
    ground->add_option("--g", g, "interaction strength")->capture_default_str();
    ground->add_option("--mu", mu, "chemical potential")->capture_default_str();
    ground->add_option("--gamma", gamma_target,
                       "target gamma = g/rho (overrides --mu via bisection)");
    ground->add_option("--tol", tol, "gradient-norm tolerance")->capture_default_str();
    ground->add_option("--max-steps", max_steps, "step budget")->capture_default_str();
    ground->add_option("--dt0", dt0, "initial imaginary-time step")->capture_default_str();

    // evolve
    std::string checkpoint, mode = "real";
    double t_end = 1.0, dt = 0.0;
    CLI::App* evolve = app.add_subcommand("evolve", "real/imaginary time evolution");
    add_common(evolve, common);
    evolve->add_option("--checkpoint", checkpoint, "input state")->required();
    evolve->add_option("--mode", mode, "real | imaginary")->capture_default_str();
    evolve->add_option("--g", g, "interaction strength")->capture_default_str();
    evolve->add_option("--mu", mu, "chemical potential")->capture_default_str();
    evolve->add_option("--t-end", t_end, "evolution window")->capture_default_str();
    evolve->add_option("--dt", dt, "time step (default: 1e-3 uniform, dx^2/8 finite)");

    // respond
    double kmin = 0.1, kmax = 3.0, omega = 0.0;
    int nk = 16, n_modes = 4;
    CLI::App* respond = app.add_subcommand("respond", "driven linear-response sweep");
    add_common(respond, common);
    respond->add_option("--checkpoint", checkpoint, "uniform ground state")->required();
    respond->add_option("--g", g, "interaction strength")->capture_default_str();
    respond->add_option("--mu", mu, "chemical potential")->capture_default_str();
    respond->add_option("--kmin", kmin, "lowest k in units of k_F")->capture_default_str();
    respond->add_option("--kmax", kmax, "highest k in units of k_F")->capture_default_str();
    respond->add_option("--nk", nk, "number of k points")->capture_default_str();
    respond->add_option("--omega", omega, "drive frequency")->capture_default_str();

    // spectrum
    CLI::App* spectrum = app.add_subcommand("spectrum", "excitation dispersion");
    add_common(spectrum, common);
    spectrum->add_option("--checkpoint", checkpoint, "uniform ground state")->required();
    spectrum->add_option("--g", g, "interaction strength")->capture_default_str();
    spectrum->add_option("--mu", mu, "chemical potential")->capture_default_str();
    spectrum->add_option("--kmin", kmin, "lowest k in units of k_F")->capture_default_str();
    spectrum->add_option("--kmax", kmax, "highest k in units of k_F")->capture_default_str();
    spectrum->add_option("--nk", nk, "number of k points")->capture_default_str();
    spectrum->add_option("--n-modes", n_modes, "branches to report")->capture_default_str();

    // oracle
    CLI::App* oracle = app.add_subcommand("oracle", "reference values");
    double orc_gamma = 1.0, orc_k = 1.0, orc_rho = 1.0, orc_g = 1.0;
    int n_quad = 128;
    CLI::App* bethe = oracle->add_subcommand("bethe", "ground-state energy e(gamma)");
    add_common(bethe, common);
    bethe->add_option("--gamma", orc_gamma, "dimensionless coupling")->required();
    bethe->add_option("--n-quad", n_quad, "quadrature points")->capture_default_str();
    CLI::App* bogo = oracle->add_subcommand("bogoliubov", "classical dispersion");
    add_common(bogo, common);
    bogo->add_option("--k", orc_k, "momentum")->required();
    bogo->add_option("--g", orc_g, "interaction strength")->capture_default_str();
    bogo->add_option("--rho", orc_rho, "density")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (ground->parsed())
            return cmd_ground(common, D, g, mu, gamma_target, tol, max_steps, dt0);
        if (evolve->parsed()) return cmd_evolve(common, checkpoint, mode, g, mu, t_end, dt);
        if (respond->parsed())
            return cmd_respond(common, checkpoint, g, mu, kmin, kmax, nk, omega);
        if (spectrum->parsed())
            return cmd_spectrum(common, checkpoint, g, mu, kmin, kmax, nk, n_modes);
        if (oracle->parsed()) {
            if (bethe->parsed()) return cmd_oracle_bethe(common, orc_gamma, n_quad);
            if (bogo->parsed()) return cmd_oracle_bogoliubov(common, orc_k, orc_g, orc_rho);
            throw ConfigError("oracle: choose bethe or bogoliubov");
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const NoConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIntegration;
    }
    return kExitConfig;
}
