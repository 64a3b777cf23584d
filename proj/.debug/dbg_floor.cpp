#include "qgpe/tdvp.hpp"
#include <cstdio>
using namespace qgpe;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    GroundStateOptions opt;
    opt.tol = 1e-6;
    opt.max_steps = 3000;
    opt.seed = 1;
    GroundStateResult r = imaginary_time_ground_state(p, 8, opt);
    UniformCmps s = r.state;
    std::printf("state: conv=%d grad=%.2e\n", (int)r.converged, r.grad_norm);
    double scale = std::max(1.0, s.Q.norm() + s.R.norm() * s.R.norm());

    // dense reference
    UniformDensityMatrices dref = fixed_point_density(s);
    std::printf("dense resid=%.3e  (scale=%.2f)\n",
                apply_transfer_right(s.Q, s.R, dref.rhoR).norm() / scale, scale);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dref.rhoR);
    std::printf("rho_R eigs: min=%.3e max=%.3e\n", es.eigenvalues().minCoeff(),
                es.eigenvalues().maxCoeff());

    // Picard floor from a warm start
    Matrix rho = dref.rhoR;
    // perturb slightly to emulate a step
    rho += 1e-8 * hermitize(RandomStream(3).gaussian_matrix(8, 8));
    rho /= rho.trace().real();
    bool ok = detail::picard_refine(detail::TransferSide::Right, s.Q, s.R, rho, 1e-13);
    std::printf("picard ok=%d resid=%.3e\n", (int)ok,
                apply_transfer_right(s.Q, s.R, rho).norm() / scale);
    Matrix rho2 = rho;
    bool ok2 = detail::inverse_power_refine(detail::TransferSide::Right, s.Q, s.R, rho2, 1e-14);
    std::printf("invpow ok=%d resid=%.3e\n", (int)ok2,
                apply_transfer_right(s.Q, s.R, rho2).norm() / scale);

    // energy noise between correlated evaluations
    auto energy_with = [&](const Matrix& rr) {
        UniformDensityMatrices dm;
        dm.rhoL = Matrix::Identity(8, 8);
        dm.rhoR = rr / rr.trace().real();
        return energy_density(s, dm, p.g, p.v0());
    };
    std::printf("E(dense)=%.15f E(picard)=%.15f E(invpow)=%.15f\n", energy_with(dref.rhoR),
                energy_with(rho), energy_with(rho2));
    return 0;
}
