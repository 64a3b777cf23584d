#include "qgpe/tdvp.hpp"
#include <cstdio>
#include <chrono>
using namespace qgpe;
using Clock = std::chrono::steady_clock;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    const int D = 8;
    UniformCmps state = random_uniform_state(D, 1);
    Matrix warm_rho;
    auto density_of = [&](const UniformCmps& s) {
        UniformDensityMatrices dm;
        dm.rhoL = Matrix::Identity(s.dim(), s.dim());
        detail::FixedPointInfo fp = detail::dominant_fixed_point(
            detail::TransferSide::Right, s.Q, s.R,
            warm_rho.size() == s.Q.size() ? &warm_rho : nullptr, 1e-13);
        dm.rhoR = fp.rho;
        warm_rho = fp.rho;
        return dm;
    };
    UniformDensityMatrices dens = density_of(state);
    double energy = energy_density(state, dens, p.g, p.v0());
    double dt = 1e-3;
    int accepted = 0, rej_energy = 0, rej_exc = 0;
    auto t0 = Clock::now();
    for (int outer = 0; outer < 500; ++outer) {
        UniformFlow flow = qgpe_rhs_uniform(state, dens, p, TimeMode::Imaginary);
        bool stepped = false;
        while (dt > 1e-14) {
            UniformCmps trial{state.Q + dt * flow.Qdot, state.R + dt * flow.Rdot};
            UniformCmps canon;
            UniformDensityMatrices dtrial;
            double etrial;
            try {
                canon = left_canonicalize(trial, &dens.rhoL).state;
                dtrial = density_of(canon);
                etrial = energy_density(canon, dtrial, p.g, p.v0());
            } catch (const std::exception& e) {
                ++rej_exc;
                if (rej_exc < 5) std::printf("exc: %s\n", e.what());
                dt *= 0.5;
                continue;
            }
            if (etrial <= energy + 1e-12 * std::abs(energy)) {
                state = canon; dens = dtrial; energy = etrial;
                ++accepted; dt = std::min(dt * 1.2, 0.5);
                stepped = true;
                break;
            }
            ++rej_energy;
            if (rej_energy < 8)
                std::printf("reject: dE=%+.3e window=%.3e dt=%.2e grad=%.2e\n",
                            etrial - energy, 1e-12 * std::abs(energy), dt, flow.grad_norm);
            dt *= 0.5;
        }
        if (!stepped) break;
    }
    double el = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("accepted=%d rej_energy=%d rej_exc=%d E=%.10f  %.1fs\n", accepted,
                rej_energy, rej_exc, energy, el);
    return 0;
}
