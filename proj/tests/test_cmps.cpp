#include <catch2/catch.hpp>

#include "qgpe/cmps.hpp"
#include "qgpe/transfer.hpp"

using namespace qgpe;

namespace {
Matrix well_conditioned_gauge(int d, int seed) {
    RandomStream rng(seed);
    return Matrix::Identity(d, d) + 0.3 * rng.gaussian_matrix(d, d);
}
}  // namespace

TEST_CASE("random states are exactly left-canonical") {
    // construction guarantees Q + Q^dag + R^dag R = 0
    for (int d : {1, 2, 8}) {
        UniformCmps s = random_uniform_state(d, 5);
        REQUIRE(left_canonical_residual(s) < 1e-14);
    }
}

TEST_CASE("random states are deterministic per seed") {
    UniformCmps a = random_uniform_state(4, 99);
    UniformCmps b = random_uniform_state(4, 99);
    REQUIRE((a.Q - b.Q).norm() == 0.0);
    REQUIRE((a.R - b.R).norm() == 0.0);
    UniformCmps c = random_uniform_state(4, 100);
    REQUIRE((a.R - c.R).norm() > 0.0);
}

TEST_CASE("identity gauge leaves the state unchanged") {
    UniformCmps s = random_uniform_state(3, 1);
    UniformCmps t = gauge_transform(s, Matrix::Identity(3, 3).eval());
    REQUIRE((t.Q - s.Q).norm() < 1e-15);
    REQUIRE((t.R - s.R).norm() < 1e-15);
}

TEST_CASE("scalar gauge at D=1 is the identity operation") {
    UniformCmps s = random_uniform_state(1, 2);
    Matrix g(1, 1);
    g << Complex(0.3, 1.2);
    UniformCmps t = gauge_transform(s, g);
    REQUIRE(std::abs(t.Q(0, 0) - s.Q(0, 0)) < 1e-15);
    REQUIRE(std::abs(t.R(0, 0) - s.R(0, 0)) < 1e-15);
}

TEST_CASE("gauge transform preserves observables at D=4") {
    // observable-comparison oracle through the transfer fixed points
    UniformCmps s = random_uniform_state(4, 7);
    UniformDensityMatrices d0 = fixed_point_density(s);
    double n0 = particle_density(s, d0);
    double g2_0 = pair_correlation(s, d0);
    double e0 = energy_density(s, d0, 1.3, -0.7);

    UniformCmps t = gauge_transform(s, well_conditioned_gauge(4, 17));
    UniformDensityMatrices d1 = fixed_point_density(t);
    REQUIRE(particle_density(t, d1) == Approx(n0).epsilon(1e-9));
    REQUIRE(pair_correlation(t, d1) == Approx(g2_0).epsilon(1e-9));
    REQUIRE(energy_density(t, d1, 1.3, -0.7) == Approx(e0).epsilon(1e-9));
}

TEST_CASE("singular gauge matrices are rejected") {
    UniformCmps s = random_uniform_state(2, 3);
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.0;
    REQUIRE_THROWS_AS(gauge_transform(s, g), SingularGauge);
}

TEST_CASE("left_canonicalize: already-canonical input gives G near identity") {
    UniformCmps s = random_uniform_state(3, 4);
    CanonicalizeResult r = left_canonicalize(s);
    REQUIRE(left_canonical_residual(r.state) < 1e-10);
    Complex scale = r.gauge(0, 0);
    REQUIRE((r.gauge - scale * Matrix::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("left_canonicalize at D=1 fixes Re Q = -|R|^2/2") {
    // scalar constraint solved analytically
    UniformCmps s;
    s.Q = Matrix(1, 1);
    s.R = Matrix(1, 1);
    s.Q << Complex(0.4, -0.8);
    s.R << Complex(0.9, 0.5);
    CanonicalizeResult r = left_canonicalize(s);
    double phi2 = std::norm(s.R(0, 0));
    REQUIRE(r.state.Q(0, 0).real() == Approx(-0.5 * phi2).margin(1e-12));
    REQUIRE(std::abs(r.state.R(0, 0)) == Approx(std::abs(s.R(0, 0))).margin(1e-12));
}

TEST_CASE("left_canonicalize recovers the canonical form after a random gauge") {
    UniformCmps s = random_uniform_state(3, 8);
    UniformDensityMatrices d0 = fixed_point_density(s);
    double n0 = particle_density(s, d0);
    double e0 = energy_density(s, d0, 1.0, -1.0);

    UniformCmps messy = gauge_transform(s, well_conditioned_gauge(3, 18));
    CanonicalizeResult r = left_canonicalize(messy);
    REQUIRE(left_canonical_residual(r.state) < 1e-10);

    // gauge consistency: output = gauge_transform(normalized input, G)
    UniformCmps shifted = messy;
    shifted.Q -= r.norm_shift * Matrix::Identity(3, 3);
    UniformCmps mapped = gauge_transform(shifted, r.gauge);
    REQUIRE((mapped.Q - r.state.Q).norm() < 1e-9);
    REQUIRE((mapped.R - r.state.R).norm() < 1e-9);

    UniformDensityMatrices d1 = fixed_point_density(r.state);
    REQUIRE(particle_density(r.state, d1) == Approx(n0).epsilon(1e-9));
    REQUIRE(energy_density(r.state, d1, 1.0, -1.0) == Approx(e0).epsilon(1e-9));
}

TEST_CASE("covariant derivative: uniform cases") {
    UniformCmps s1 = random_uniform_state(1, 9);
    REQUIRE(covariant_derivative_x(s1).norm() == Approx(0.0).margin(1e-16));

    UniformCmps s2;
    s2.Q = Matrix::Zero(2, 2);
    s2.R = Matrix::Zero(2, 2);
    s2.Q(0, 1) = 1.0;
    s2.R(1, 0) = 1.0;
    Matrix d = covariant_derivative_x(s2);
    Matrix expect(2, 2);
    expect << 1.0, 0.0, 0.0, -1.0;
    REQUIRE((d - expect).norm() < 1e-15);
}

TEST_CASE("covariant derivative: finite grid second-order convergence") {
    // analytic derivative oracle on smooth profiles
    auto build = [](int n) {
        FiniteCmps s;
        const int d = 2;
        s.v1 = Vector::Ones(d);
        s.v2 = Vector::Ones(d);
        s.bc = BoundaryCondition::neumann();
        for (int i = 0; i < n; ++i) {
            double x = static_cast<double>(i) / (n - 1);
            s.grid.push_back(x);
            s.Qs.push_back(Matrix::Zero(d, d));
            s.Rs.push_back(std::sin(x) * Matrix::Identity(d, d));
        }
        return s;
    };
    auto max_err = [&](int n) {
        FiniteCmps s = build(n);
        std::vector<Matrix> dr = covariant_derivative_x(s);
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            Matrix exact = std::cos(s.grid[i]) * Matrix::Identity(2, 2);
            err = std::max(err, (dr[i] - exact).norm());
        }
        return err;
    };
    double e1 = max_err(51), e2 = max_err(101);
    REQUIRE(e1 / e2 > 3.0);  // ~4x for second order
    REQUIRE(e2 < 1e-3);

    FiniteCmps linear = build(21);
    for (int i = 0; i < 21; ++i)
        linear.Rs[i] = linear.grid[i] * Matrix::Identity(2, 2);
    std::vector<Matrix> dr = covariant_derivative_x(linear);
    for (int i = 0; i < 21; ++i)
        REQUIRE((dr[i] - Matrix::Identity(2, 2)).norm() < 1e-12);  // exact on linear data
}

TEST_CASE("finite validation enforces the Dirichlet promotion") {
    FiniteCmps s;
    const int d = 2, n = 5;
    s.v1 = Vector::Ones(d);
    s.v2 = Vector::Ones(d);
    s.bc = BoundaryCondition::dirichlet(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        s.grid.push_back(0.1 * i);
        s.Qs.push_back(Matrix::Zero(d, d));
        s.Rs.push_back(Matrix::Identity(d, d));
    }
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s.Rs.front().setZero();
    s.Rs.back().setZero();
    REQUIRE_NOTHROW(s.validate());
}
