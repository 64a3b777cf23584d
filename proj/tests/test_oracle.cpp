#include <catch2/catch.hpp>

#include "qgpe/oracle.hpp"
#include "qgpe/transfer.hpp"

using namespace qgpe;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    Quadrature q = gauss_legendre(8);
    double s0 = 0, s2 = 0, s7 = 0;
    for (size_t i = 0; i < q.x.size(); ++i) {
        s0 += q.w[i];
        s2 += q.w[i] * q.x[i] * q.x[i];
        s7 += q.w[i] * std::pow(q.x[i], 7);
    }
    REQUIRE(s0 == Approx(2.0).margin(1e-14));
    REQUIRE(s2 == Approx(2.0 / 3.0).margin(1e-14));
    REQUIRE(s7 == Approx(0.0).margin(1e-14));
}

TEST_CASE("bethe energy: strong-coupling limit") {
    // Tonks-Girardeau: e -> pi^2/3, first correction -4/gamma
    double e = bethe_ground_energy(1e3, 128);
    double expect = M_PI * M_PI / 3.0 * (1.0 - 4.0 / 1e3);
    REQUIRE(e == Approx(expect).epsilon(0.01));
}

TEST_CASE("bethe energy: weak-coupling limit") {
    // mean field: e(gamma) ~ gamma
    double e = bethe_ground_energy(0.01, 256);
    REQUIRE(e / 0.01 == Approx(1.0).epsilon(0.05));
}

TEST_CASE("bethe energy: quadrature self-convergence at gamma = 1.35") {
    double e1 = detail::bethe_energy_one(1.35, 128);
    double e2 = detail::bethe_energy_one(1.35, 256);
    REQUIRE(std::abs(e1 - e2) < 1e-8);
}

TEST_CASE("bethe energy: monotone in gamma") {
    double prev = 0.0;
    for (double gamma : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
        double e = bethe_ground_energy(gamma, 128);
        REQUIRE(e > prev);
        prev = e;
    }
    REQUIRE(prev < M_PI * M_PI / 3.0 * 1.001);
}

TEST_CASE("bogoliubov dispersion limits") {
    REQUIRE(bogoliubov_dispersion(0.0, 1.0, 1.0) == 0.0);
    REQUIRE(bogoliubov_dispersion(0.7, 0.0, 2.0) == Approx(0.49).margin(1e-14));
    // large-k expansion: omega ~ k^2 + 2 g rho
    double g = 1.3, rho = 0.8;
    double k = 100.0 * std::sqrt(g * rho);
    double expect = k * k + 2.0 * g * rho;
    REQUIRE(bogoliubov_dispersion(k, g, rho) == Approx(expect).epsilon(1e-4));
    // even in k
    REQUIRE(bogoliubov_dispersion(-0.7, g, rho) ==
            Approx(bogoliubov_dispersion(0.7, g, rho)).margin(1e-14));
}

TEST_CASE("lattice oracle: zero R gives zero observables") {
    UniformCmps s;
    s.R = Matrix::Zero(2, 2);
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 0.3;
    h(1, 0) = -0.3;
    s.Q = h;
    LatticeObservables obs = lattice_discretization_oracle(s, 1e-2, 2, 1.0, -1.0);
    REQUIRE(obs.density == Approx(0.0).margin(1e-12));
    REQUIRE(obs.pair == Approx(0.0).margin(1e-12));
    REQUIRE(obs.energy == Approx(0.0).margin(1e-10));
}

namespace {
double richardson3(double f1, double f2, double f4) {
    // two-level Richardson elimination of O(dx) and O(dx^2) terms for
    // values at dx, dx/2, dx/4
    double g1 = 2.0 * f2 - f1;
    double g2 = 2.0 * f4 - f2;
    return (4.0 * g2 - g1) / 3.0;
}
}  // namespace

TEST_CASE("lattice oracle: D=1 density extrapolates to |phi|^2") {
    Complex phi(0.55, -0.35);
    UniformCmps s;
    s.Q = Matrix(1, 1);
    s.R = Matrix(1, 1);
    s.R << phi;
    s.Q << Complex(-0.5 * std::norm(phi), 0.2);
    double n_exact = std::norm(phi);
    double f1 = lattice_discretization_oracle(s, 1e-2, 2, 0.0, 0.0).density;
    double f2 = lattice_discretization_oracle(s, 5e-3, 2, 0.0, 0.0).density;
    double f4 = lattice_discretization_oracle(s, 2.5e-3, 2, 0.0, 0.0).density;
    REQUIRE(richardson3(f1, f2, f4) == Approx(n_exact).epsilon(1e-7));
}

TEST_CASE("lattice oracle: D=2 observables match the transfer module") {
    // this is the independent cross-check of the continuum formulas
    UniformCmps s = random_uniform_state(2, 33);
    UniformDensityMatrices d = fixed_point_density(s);
    double g = 1.1, v0 = -0.9;
    double n_ref = particle_density(s, d);
    double g2_ref = pair_correlation(s, d);
    double e_ref = energy_density(s, d, g, v0);

    // cutoff 3: the kinetic estimator amplifies the occupation-truncation
    // error by 1/dx^3, so double occupancy alone does not converge for it
    auto obs1 = lattice_discretization_oracle(s, 1e-2, 3, g, v0);
    auto obs2 = lattice_discretization_oracle(s, 5e-3, 3, g, v0);
    auto obs4 = lattice_discretization_oracle(s, 2.5e-3, 3, g, v0);
    REQUIRE(richardson3(obs1.density, obs2.density, obs4.density) ==
            Approx(n_ref).epsilon(2e-6));
    REQUIRE(richardson3(obs1.pair, obs2.pair, obs4.pair) == Approx(g2_ref).epsilon(2e-6));
    REQUIRE(richardson3(obs1.energy, obs2.energy, obs4.energy) == Approx(e_ref).epsilon(2e-6));
}

TEST_CASE("lattice oracle: tangent overlap matches the local metric") {
    UniformCmps s = random_uniform_state(2, 34);
    UniformDensityMatrices d = fixed_point_density(s);
    RandomStream rng(35);
    UniformTangent t1, t2;
    t1.W = rng.gaussian_matrix(2, 2);
    t1.V = -(s.R.adjoint() * t1.W);
    t2.W = rng.gaussian_matrix(2, 2);
    t2.V = -(s.R.adjoint() * t2.W);
    Complex ref = tangent_metric(s, d, t1, t2);

    Complex o1 = lattice_tangent_overlap(s, t1, t2, 4e-3, 2);
    Complex o2 = lattice_tangent_overlap(s, t1, t2, 2e-3, 2);
    Complex o3 = lattice_tangent_overlap(s, t1, t2, 1e-3, 2);
    Complex o4 = lattice_tangent_overlap(s, t1, t2, 5e-4, 2);
    Complex r1 = 2.0 * o2 - o1, r2 = 2.0 * o3 - o2, r3 = 2.0 * o4 - o3;
    Complex s1 = (4.0 * r2 - r1) / 3.0, s2 = (4.0 * r3 - r2) / 3.0;
    Complex extrap = (8.0 * s2 - s1) / 7.0;
    REQUIRE(std::abs(extrap - ref) < 1e-5 * std::abs(ref));
}

TEST_CASE("lattice oracle: resource limits are enforced") {
    UniformCmps s = random_uniform_state(6, 36);
    REQUIRE_THROWS_AS(lattice_discretization_oracle(s, 1e-2, 2, 1.0, -1.0), ResourceLimit);
    UniformCmps s2 = random_uniform_state(2, 37);
    REQUIRE_THROWS_AS(lattice_discretization_oracle(s2, 1e-2, 9, 1.0, -1.0), ResourceLimit);
}

TEST_CASE("lattice oracle: finite-chain density profile") {
    // constant scalar profile in a short box: bulk cells report |phi|^2 + O(dx)
    const int n = 33;
    Complex phi(0.6, 0.2);
    FiniteCmps s;
    s.v1 = Vector::Ones(1);
    s.v2 = Vector::Ones(1);
    s.bc = BoundaryCondition::neumann();
    for (int i = 0; i < n; ++i) {
        s.grid.push_back(0.02 * i);
        Matrix q(1, 1), r(1, 1);
        q << Complex(-0.5 * std::norm(phi), 0.0);
        r << phi;
        s.Qs.push_back(q);
        s.Rs.push_back(r);
    }
    std::vector<double> profile = lattice_density_profile(s, 2);
    REQUIRE(profile[n / 2] == Approx(std::norm(phi)).epsilon(0.02));
}
