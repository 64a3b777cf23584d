#include "qgpe/tdvp.hpp"
#include <cstdio>
using namespace qgpe;
int main() {
    setvbuf(stdout, nullptr, _IONBF, 0);
    std::printf("start\n");
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
    std::printf("built\n");
    FiniteDensityMatrices dm = propagate_density(s);
    std::printf("propagated\n");
    LiebLinigerParams p; p.g = 1.0; p.mu = 1.0;
    auto m = detail::measure_finite(s, dm, p);
    std::printf("measured E=%.8f norm_mean=%.6f\n", m.energy, m.norm_mean);
    detail::renormalize_finite(s, m.norm_mean);
    std::printf("renormalized |v2|=%.6f\n", s.v2.norm());
    dm = propagate_density(s);
    std::printf("propagated2\n");
    FiniteFlow flow = qgpe_rhs_finite(s, dm, p, TimeMode::Imaginary);
    std::printf("rhs done |Rdot mid|=%.6f\n", flow.Rdot[n/2].norm());
    return 0;
}
