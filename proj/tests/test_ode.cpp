#include <catch2/catch.hpp>

#include "qgpe/ode.hpp"

using namespace qgpe;

TEST_CASE("rk4: zero derivative leaves state unchanged") {
    Matrix y = Matrix::Random(3, 3);
    auto f = [](const Matrix&, double) { return Matrix::Zero(3, 3).eval(); };
    Matrix y1 = ode_step_rk4(f, y, 0.0, 0.1);
    REQUIRE((y1 - y).norm() == Approx(0.0).margin(1e-16));
}

TEST_CASE("rk4: scalar decay matches the exponential") {
    // closed-form oracle: y' = -y, y(dt) = e^{-dt}
    Matrix y(1, 1);
    y << 1.0;
    auto f = [](const Matrix& m, double) { return (-m).eval(); };
    Matrix y1 = ode_step_rk4(f, y, 0.0, 0.01);
    REQUIRE(std::abs(y1(0, 0).real() - std::exp(-0.01)) < 1e-10);
}

TEST_CASE("rk4: harmonic oscillator conserves energy to 1e-9 over t=1") {
    // conserved-quantity oracle: H = (q^2 + p^2)/2
    Vector y(2);
    y << 1.0, 0.0;
    auto f = [](const Vector& v, double) {
        Vector d(2);
        d << v(1), -v(0);
        return d;
    };
    double e0 = 0.5 * y.squaredNorm();
    double t = 0.0;
    const double dt = 1e-3;
    for (int i = 0; i < 1000; ++i) {
        y = ode_step_rk4(f, y, t, dt);
        t += dt;
    }
    REQUIRE(std::abs(0.5 * y.squaredNorm() - e0) < 1e-9);
}

TEST_CASE("rk4: order check on a smooth nonlinear flow") {
    // halving dt cuts the one-step error by 2^5 within 20%
    Vector y0(2);
    y0 << 0.7, -0.2;
    auto f = [](const Vector& v, double t) {
        Vector d(2);
        d << std::sin(v(1)) + 0.3 * std::cos(t), v(0) * v(0) - 0.5 * v(1);
        return d;
    };
    auto one_step_error = [&](double dt) {
        Vector coarse = ode_step_rk4(f, y0, 0.0, dt);
        Vector fine = y0;
        const int sub = 64;
        for (int i = 0; i < sub; ++i)
            fine = ode_step_rk4(f, fine, i * dt / sub, dt / sub);
        return (coarse - fine).norm();
    };
    double e1 = one_step_error(0.2);
    double e2 = one_step_error(0.1);
    REQUIRE(e1 / e2 == Approx(32.0).epsilon(0.20));
}

TEST_CASE("rk4: non-finite stages are rejected") {
    Matrix y(1, 1);
    y << 1.0;
    auto f = [](const Matrix& m, double) {
        Matrix bad = m;
        bad(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
        return bad;
    };
    REQUIRE_THROWS_AS(ode_step_rk4(f, y, 0.0, 0.1), NonFiniteDerivative);
}

TEST_CASE("rk4: nonpositive dt is invalid") {
    Matrix y(1, 1);
    y << 1.0;
    auto f = [](const Matrix& m, double) { return m; };
    REQUIRE_THROWS_AS(ode_step_rk4(f, y, 0.0, 0.0), std::invalid_argument);
}
