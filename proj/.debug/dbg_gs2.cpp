#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    GroundStateOptions opt;
    opt.tol = 1e-8;
    opt.seed = 1;
    auto t0 = Clock::now();
    GroundStateResult r = imaginary_time_ground_state(p, 4, opt);
    double el = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("D=4 mu=1: steps=%d conv=%d grad=%.2e E=%.8f n=%.6f  %.2fs\n", r.steps,
                (int)r.converged, r.grad_norm, r.energy, r.density, el);
    std::printf("trace size=%zu, attempts estimated\n", r.trace.size());
    // how long does a tol=1e-6 run take?
    opt.tol = 1e-6;
    t0 = Clock::now();
    GroundStateResult r2 = imaginary_time_ground_state(p, 4, opt);
    el = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("tol=1e-6: steps=%d conv=%d  %.2fs\n", r2.steps, (int)r2.converged, el);
    return 0;
}
