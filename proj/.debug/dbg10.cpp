#include "qgpe/oracle.hpp"
#include "qgpe/transfer.hpp"
#include <cstdio>
using namespace qgpe;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    // D=1: kinetic must vanish
    UniformCmps s1;
    s1.Q = Matrix(1, 1); s1.R = Matrix(1, 1);
    Complex phi(0.55, -0.35);
    s1.R << phi;
    s1.Q << Complex(-0.5 * std::norm(phi), 0.2);
    std::printf("D=1 (exact kinetic 0, density %.6f):\n", std::norm(phi));
    for (double dx : {4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3}) {
        auto o = lattice_discretization_oracle(s1, dx, 2, 0.0, 0.0);
        std::printf("  dx=%.4g  density=%.8f  energy(kin)=%.8f\n", dx, o.density, o.energy);
    }
    UniformCmps s = random_uniform_state(2, 33);
    UniformDensityMatrices d = fixed_point_density(s);
    double e_kin_ref = energy_density(s, d, 0.0, 0.0);
    std::printf("D=2 (exact kinetic %.8f):\n", e_kin_ref);
    for (double dx : {4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3}) {
        auto o = lattice_discretization_oracle(s, dx, 2, 0.0, 0.0);
        std::printf("  dx=%.4g  kin=%.8f err=%.3e\n", dx, o.energy, o.energy - e_kin_ref);
    }
    return 0;
}
