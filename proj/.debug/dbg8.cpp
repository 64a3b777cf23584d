#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    const int n = 61;
    FiniteCmps s;
    s.v1 = Vector::Ones(1); s.v2 = Vector::Ones(1);
    s.bc = BoundaryCondition::dirichlet(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = 6.0 * i / (n - 1);
        s.grid.push_back(x);
        s.Qs.push_back(Matrix::Zero(1, 1));
        Matrix r(1, 1);
        r << 0.6 * std::sin(M_PI * x / 6.0) + 0.05 * std::sin(2 * M_PI * x / 6.0);
        s.Rs.push_back(r);
    }
    s.Rs.front().setZero(); s.Rs.back().setZero();
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    auto t0 = std::chrono::steady_clock::now();
    FiniteEvolutionResult ev = imaginary_time_evolve(s, p, 3.0, 5e-3);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    FiniteDensityMatrices dens = propagate_density(ev.state);
    double bulk = particle_density(ev.state, dens, n / 2);
    std::printf("records=%zu E0=%.8f E=%.8f tau=%.3f bulk=%.5f edge=%.3g  %.1fs\n",
                ev.trajectory.size(), ev.trajectory.front().energy,
                ev.trajectory.back().energy, ev.trajectory.back().t, bulk,
                particle_density(ev.state, dens, 0), secs);
    return 0;
}
