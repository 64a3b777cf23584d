#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;

// transcription of find_mu_for_gamma with per-solve diagnostics
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    double g = 1.0, gamma_target = 1.35;
    int D = 4;
    GroundStateOptions opt;
    opt.tol = 1e-8;
    opt.seed = 1;
    GroundStateOptions probe = opt;
    probe.tol = 1e-6;
    const double n_t = g / gamma_target;
    double mu = 2.0 * g * n_t + M_PI * M_PI * n_t * n_t;
    int nsolve = 0;
    auto solve_at = [&](double mu_try, const std::optional<UniformCmps>& init) {
        LiebLinigerParams p; p.g = g; p.mu = mu_try;
        GroundStateOptions o = probe;
        o.initial = init;
        auto t0 = Clock::now();
        GroundStateResult r = imaginary_time_ground_state(p, D, o);
        double el = std::chrono::duration<double>(Clock::now() - t0).count();
        double last_dt = r.trace.empty() ? 0.0 : r.trace.back().dt;
        std::printf("solve %2d mu=%.5f steps=%6d conv=%d grad=%.2e n=%.5f  dt_last=%.2e  %.2fs\n",
                    ++nsolve, mu_try, r.steps, (int)r.converged, r.grad_norm, r.density,
                    last_dt, el);
        return r;
    };
    GroundStateResult r = solve_at(mu, std::nullopt);
    double gamma = gamma_of(r, g);
    double mu_lo, mu_hi;
    if (gamma > gamma_target) {
        mu_lo = mu;
        do { mu *= 2; r = solve_at(mu, r.state); gamma = gamma_of(r, g); } while (gamma > gamma_target && mu < 1e12);
        mu_hi = mu;
    } else {
        mu_hi = mu;
        do { mu *= 0.5; r = solve_at(mu, r.state); gamma = gamma_of(r, g); } while (gamma < gamma_target && mu > 1e-12);
        mu_lo = mu;
    }
    for (int i = 0; i < 40 && std::abs(gamma / gamma_target - 1.0) > 0.01; ++i) {
        mu = 0.5 * (mu_lo + mu_hi);
        r = solve_at(mu, r.state);
        gamma = gamma_of(r, g);
        if (gamma > gamma_target) mu_lo = mu; else mu_hi = mu;
    }
    std::printf("done gamma=%.4f\n", gamma);
    return 0;
}
