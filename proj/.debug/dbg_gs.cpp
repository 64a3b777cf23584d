#include "qgpe/tdvp.hpp"
#include "qgpe/oracle.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
int main(int argc, char** argv) {
    setvbuf(stdout, nullptr, _IONBF, 0);
    int D = argc > 1 ? std::atoi(argv[1]) : 8;
    double gamma_t = argc > 2 ? std::atof(argv[2]) : 1.35;
    double g = argc > 3 ? std::atof(argv[3]) : 1.0;
    GroundStateOptions opt;
    opt.tol = 1e-8;
    opt.seed = 1;
    auto t0 = Clock::now();
    CalibrationResult cal = find_mu_for_gamma(g, gamma_t, D, opt);
    double el = std::chrono::duration<double>(Clock::now() - t0).count();
    double n = cal.ground.density;
    double gamma = g / n;
    double e_ll = (cal.ground.energy + cal.mu * n) / (n * n * n);
    double e_ba = bethe_ground_energy(gamma, 128);
    std::printf("D=%d target=%.4g: mu=%.6f n=%.6f gamma=%.4f steps=%d conv=%d grad=%.2e\n",
                D, gamma_t, cal.mu, n, gamma, cal.ground.steps, (int)cal.ground.converged,
                cal.ground.grad_norm);
    std::printf("  e_sim=%.8f e_bethe=%.8f rel=%.3e   elapsed=%.1fs\n", e_ll, e_ba,
                std::abs(e_ll / e_ba - 1.0), el);
    return 0;
}
