#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    const int n = 61;
    FiniteCmps state;
    state.v1 = Vector::Ones(1); state.v2 = Vector::Ones(1);
    state.bc = BoundaryCondition::dirichlet(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = 6.0 * i / (n - 1);
        state.grid.push_back(x);
        state.Qs.push_back(Matrix::Zero(1, 1));
        Matrix r(1, 1);
        r << 0.6 * std::sin(M_PI * x / 6.0) + 0.05 * std::sin(2 * M_PI * x / 6.0);
        state.Rs.push_back(r);
    }
    state.Rs.front().setZero(); state.Rs.back().setZero();
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    const double dt0 = 5e-3;

    FiniteDensityMatrices dm = propagate_density(state);
    auto m = detail::measure_finite(state, dm, p);
    detail::renormalize_finite(state, m.norm_mean);
    dm = propagate_density(state);
    m = detail::measure_finite(state, dm, p);
    double tau = 0, dt = dt0, energy = m.energy;
    int acc = 0, rej = 0, excount = 0, it = 0;
    auto t0 = Clock::now();
    while (tau < 3.0 && dt > 1e-14) {
        ++it;
        FiniteFlow flow = qgpe_rhs_finite(state, dm, p, TimeMode::Imaginary);
        FiniteCmps trial = state;
        for (int i = 0; i < n; ++i) {
            trial.Qs[i] += dt * flow.Qdot[i];
            trial.Rs[i] += dt * flow.Rdot[i];
        }
        trial.v1 += dt * flow.v1dot;
        trial.v2 += dt * flow.v2dot;
        bool ok = true;
        FiniteDensityMatrices dmt;
        detail::FiniteMeasurement mt{};
        try { dmt = propagate_density(trial); mt = detail::measure_finite(trial, dmt, p); }
        catch (...) { ok = false; ++excount; }
        if (ok && mt.energy <= energy + 1e-12 * std::abs(energy)) {
            detail::renormalize_finite(trial, mt.norm_mean);
            state = trial;
            dm = propagate_density(state);
            m = detail::measure_finite(state, dm, p);
            energy = m.energy;
            tau += dt;
            dt = std::min(dt * 1.2, 10 * dt0);
            ++acc;
        } else { dt *= 0.5; ++rej; }
        if (it % 100 == 0) {
            double maxr = 0, maxq = 0;
            for (int i = 0; i < n; ++i) { maxr = std::max(maxr, state.Rs[i].norm()); maxq = std::max(maxq, state.Qs[i].norm()); }
            std::printf("it=%5d acc=%d rej=%d exc=%d tau=%.4f dt=%.2e E=%.9f maxR=%.3g maxQ=%.3g |v2|=%.3g  %.1fs\n",
                        it, acc, rej, excount, tau, dt, energy, maxr, maxq, state.v2.norm(),
                        std::chrono::duration<double>(Clock::now() - t0).count());
        }
        if (std::chrono::duration<double>(Clock::now() - t0).count() > 110) break;
    }
    std::printf("final tau=%.4f E=%.9f acc=%d rej=%d\n", tau, energy, acc, rej);
    return 0;
}
