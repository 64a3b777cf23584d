#include "qgpe/oracle.hpp"
#include "qgpe/transfer.hpp"
#include "qgpe/tdvp.hpp"
#include <cstdio>
using namespace qgpe;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    UniformCmps s = random_uniform_state(2, 33);
    UniformDensityMatrices d = fixed_point_density(s);
    double e_kin_ref = energy_density(s, d, 0.0, 0.0);
    std::printf("D=2 exact kinetic %.8f, cutoff 3:\n", e_kin_ref);
    for (double dx : {4e-2, 2e-2, 1e-2, 5e-3}) {
        auto o = lattice_discretization_oracle(s, dx, 3, 0.0, 0.0);
        std::printf("  dx=%.4g  kin=%.8f err=%.3e\n", dx, o.energy, o.energy - e_kin_ref);
    }
    RandomStream rng(35);
    UniformTangent t1, t2;
    t1.W = rng.gaussian_matrix(2, 2);
    t1.V = -(s.R.adjoint() * t1.W);
    t2.W = rng.gaussian_matrix(2, 2);
    t2.V = -(s.R.adjoint() * t2.W);
    Complex ref = tangent_metric(s, d, t1, t2);
    std::printf("metric ref = (%.8f, %.8f)\n", ref.real(), ref.imag());
    for (int cutoff : {2, 3})
        for (double dx : {8e-3, 4e-3, 2e-3, 1e-3}) {
            Complex o = lattice_tangent_overlap(s, t1, t2, dx, cutoff);
            std::printf("  cutoff=%d dx=%.4g overlap=(%.8f, %.8f) |err|=%.3e\n", cutoff, dx,
                        o.real(), o.imag(), std::abs(o - ref));
        }
    return 0;
}
