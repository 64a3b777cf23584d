#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    GroundStateOptions opt;
    opt.tol = 1e-6;
    opt.max_steps = 2000;
    opt.seed = 1;
    auto t0 = Clock::now();
    GroundStateResult r = imaginary_time_ground_state(p, 8, opt);
    double el = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("D=8 mu=1 capped2000: steps=%d conv=%d grad=%.2e n=%.5f  %.1fs (%.2f ms/step)\n",
                r.steps, (int)r.converged, r.grad_norm, r.density, el, 1e3 * el / std::max(1, r.steps));
    return 0;
}
