#include "qgpe/tdvp.hpp"
#include "qgpe/oracle.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
double secs(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
int main(int argc, char** argv) {
    setvbuf(stdout, nullptr, _IONBF, 0);
    double gamma_t = argc > 1 ? std::atof(argv[1]) : 1.35;
    double g = argc > 2 ? std::atof(argv[2]) : 1.0;
    double tol_hi = argc > 3 ? std::atof(argv[3]) : 1e-8;

    auto t0 = Clock::now();
    GroundStateOptions opt;
    opt.tol = 1e-6;
    opt.seed = 1;
    CalibrationResult cal = find_mu_for_gamma(g, gamma_t, 4, opt);
    std::printf("D=4 calib: mu=%.6f gamma=%.4f steps=%d  %.1fs\n", cal.mu,
                gamma_of(cal.ground, g), cal.ground.steps, secs(t0));

    LiebLinigerParams p; p.g = g; p.mu = cal.mu;
    UniformCmps seed_state = cal.ground.state;
    for (int D : {8, 16}) {
        auto t1 = Clock::now();
        GroundStateOptions o;
        o.tol = tol_hi;
        o.seed = 2;
        o.initial = pad_state(seed_state, D, 0.05, 100 + D);
        GroundStateResult r = imaginary_time_ground_state(p, D, o);
        double n = r.density;
        double gamma = g / n;
        double e_ll = (r.energy + cal.mu * n) / (n * n * n);
        double e_ba = bethe_ground_energy(gamma, 128);
        std::printf("D=%2d: steps=%d conv=%d grad=%.2e gamma=%.4f rel(Bethe)=%.3e  %.1fs\n",
                    D, r.steps, (int)r.converged, r.grad_norm, gamma,
                    std::abs(e_ll / e_ba - 1.0), secs(t1));
        seed_state = r.state;
    }
    return 0;
}
