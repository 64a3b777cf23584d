#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    const int D = 4;
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    UniformCmps s = random_uniform_state(D, 1);
    UniformDensityMatrices dens = fixed_point_density(s);

    auto t0 = Clock::now();
    for (int i = 0; i < 100; ++i) {
        detail::FixedPointInfo fp = detail::dominant_fixed_point(
            detail::TransferSide::Right, s.Q, s.R, &dens.rhoR, 1e-13);
    }
    std::printf("warm right fixed point: %.3f ms/call\n", ms_since(t0) / 100);

    t0 = Clock::now();
    for (int i = 0; i < 100; ++i) Matrix f = solve_F(s, dens, p);
    std::printf("solve_F: %.3f ms/call\n", ms_since(t0) / 100);

    t0 = Clock::now();
    for (int i = 0; i < 100; ++i)
        UniformFlow fl = qgpe_rhs_uniform(s, dens, p, TimeMode::Imaginary);
    std::printf("qgpe_rhs_uniform: %.3f ms/call\n", ms_since(t0) / 100);

    t0 = Clock::now();
    for (int i = 0; i < 100; ++i) CanonicalizeResult c = left_canonicalize(s, &dens.rhoL);
    std::printf("left_canonicalize(warm): %.3f ms/call\n", ms_since(t0) / 100);

    t0 = Clock::now();
    for (int i = 0; i < 100; ++i) UniformDensityMatrices d2 = fixed_point_density(s);
    std::printf("fixed_point_density(dense): %.3f ms/call\n", ms_since(t0) / 100);
    return 0;
}
