#ifndef QGPE_ORACLE_HPP
#define QGPE_ORACLE_HPP

#include <vector>

#include "qgpe/cmps.hpp"
#include "qgpe/linalg.hpp"
#include "qgpe/tdvp.hpp"

namespace qgpe {

// ---- Gauss-Legendre nodes -----------------------------------------------------

struct Quadrature {
    std::vector<double> x;
    std::vector<double> w;
};

/// Nodes and weights on [-1, 1] by Newton iteration on the Legendre
/// recurrence.
inline Quadrature gauss_legendre(int n) {
    Quadrature q;
    q.x.resize(n);
    q.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        q.w[n - 1 - i] = q.w[i];
    }
    return q;
}

// ---- Lieb-Liniger ground-state energy -------------------------------------------

namespace detail {

struct LiebSolution {
    double gamma;
    double e;  // dimensionless energy: E/L = e * rho^3
};

/// Solves the quasi-momentum integral equation at fixed cutoff parameter
/// lambda on Gauss-Legendre nodes.  The contraction rate of the plain
/// fixed-point iteration degrades as 1 - O(lambda), so the discretized
/// system (I - K) f = 1/(2 pi) is solved directly and the iteration serves
/// as a cheap residual check.
inline LiebSolution lieb_solve_at_lambda(double lambda, const Quadrature& q) {
    const int n = static_cast<int>(q.x.size());
    Eigen::MatrixXd system(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = q.x[i] - q.x[j];
            system(i, j) = (i == j ? 1.0 : 0.0) -
                           (lambda / M_PI) / (lambda * lambda + d * d) * q.w[j];
        }
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, 1.0 / (2.0 * M_PI));
    Eigen::VectorXd f = system.partialPivLu().solve(rhs);
    double resid = (system * f - rhs).lpNorm<Eigen::Infinity>();
    if (!f.allFinite() || resid > 1e-10 * std::max(1.0, f.lpNorm<Eigen::Infinity>()))
        throw NoConvergence("lieb_solve_at_lambda: linear solve failed");
    double g0 = 0.0, i2 = 0.0;
    for (int i = 0; i < n; ++i) {
        g0 += f(i) * q.w[i];
        i2 += f(i) * q.x[i] * q.x[i] * q.w[i];
    }
    return {lambda / g0, i2 / (g0 * g0 * g0)};
}

inline double bethe_energy_one(double gamma, int n_quad) {
    Quadrature q = gauss_legendre(n_quad);
    // gamma grows monotonically with lambda: bisect on log(lambda)
    double lo = std::log(1e-7), hi = std::log(1e7);
    LiebSolution sol{0.0, 0.0};
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        sol = lieb_solve_at_lambda(std::exp(mid), q);
        if (std::abs(sol.gamma / gamma - 1.0) < 1e-12) break;
        if (sol.gamma < gamma)
            lo = mid;
        else
            hi = mid;
    }
    return sol.e;
}

}  // namespace detail

/// Dimensionless ground-state energy e(gamma) of the Lieb-Liniger gas,
/// E/L = e(gamma) rho^3.  Refines the quadrature until two resolutions agree
/// to 1e-8.
inline double bethe_ground_energy(double gamma, int n_quad = 128) {
    if (!(gamma > 0)) throw std::invalid_argument("bethe_ground_energy: gamma must be > 0");
    if (n_quad < 64) throw std::invalid_argument("bethe_ground_energy: n_quad >= 64");
    double e1 = detail::bethe_energy_one(gamma, n_quad);
    double e2 = detail::bethe_energy_one(gamma, 2 * n_quad);
    if (std::abs(e1 - e2) > 1e-8 * std::max(1.0, std::abs(e2))) {
        double e3 = detail::bethe_energy_one(gamma, 4 * n_quad);
        if (std::abs(e2 - e3) > 1e-8 * std::max(1.0, std::abs(e3)))
            throw NoConvergence("bethe_ground_energy: quadrature not converged");
        return e3;
    }
    return e2;
}

/// omega(k) = sqrt(k^4 + 4 g rho k^2) in hbar = 1, 2m = 1 units.
inline double bogoliubov_dispersion(double k, double g, double rho) {
    return std::sqrt(k * k * k * k + 4.0 * g * rho * k * k);
}

// ---- truncated-Fock lattice cross-check --------------------------------------------

/// Observables computed from the discretized state; errors are O(dx) by
/// construction.
struct LatticeObservables {
    double density = 0.0;
    double pair = 0.0;
    double energy = 0.0;  // kinetic + v0 n + g g2
};

namespace detail {

/// Per-site tensors of the discretized state: A^n = (sqrt(dx) R)^n / sqrt(n!)
/// on top of A^0 = I + dx Q.
inline std::vector<Matrix> lattice_site_tensors(const Matrix& q, const Matrix& r, double dx,
                                                int cutoff) {
    const int d = q.rows();
    std::vector<Matrix> a(cutoff + 1);
    a[0] = Matrix::Identity(d, d) + dx * q;
    Matrix pw = Matrix::Identity(d, d);
    double fact = 1.0;
    for (int n = 1; n <= cutoff; ++n) {
        pw = pw * (std::sqrt(dx) * r);
        fact *= n;
        a[n] = pw / std::sqrt(fact);
    }
    return a;
}

/// Superoperator with a single-site operator O inserted:
/// sum_{m,n} <m|O|n> conj(A^m) (x) A^n, acting on vectorized right
/// environments.
inline Matrix site_superop(const std::vector<Matrix>& a,
                           const std::function<Complex(int, int)>& op_elem) {
    const int d = a[0].rows();
    Matrix out = Matrix::Zero(d * d, d * d);
    for (size_t m = 0; m < a.size(); ++m)
        for (size_t n = 0; n < a.size(); ++n) {
            Complex c = op_elem(static_cast<int>(m), static_cast<int>(n));
            if (c != Complex(0, 0)) out += c * kron(a[m].conjugate(), a[n]);
        }
    return out;
}

inline Complex fock_identity(int m, int n) { return m == n ? 1.0 : 0.0; }

struct LatticeEnvironment {
    Vector l;        // left eigenvector of the site transfer operator
    Vector r;        // right eigenvector
    double eta;      // dominant eigenvalue
    Complex overlap; // l^dag r
};

inline LatticeEnvironment lattice_environment(const Matrix& e_site) {
    EigenPair right = dominant_eigenpair_dense(e_site);
    EigenPair left = dominant_eigenpair_dense(e_site.adjoint().eval());
    LatticeEnvironment env;
    env.eta = right.value.real();
    env.r = right.vector;
    env.l = left.vector;
    env.overlap = env.l.dot(env.r);
    return env;
}

}  // namespace detail

/// Brute-force check of the uniform-state observables through an explicit
/// occupation-basis discretization with per-site Fock cutoff.
inline LatticeObservables lattice_discretization_oracle(const UniformCmps& s, double dx,
                                                        int fock_cutoff, double g, double v0) {
    if (s.dim() > 4) throw ResourceLimit("lattice oracle: D <= 4 only");
    if (fock_cutoff > 3 || fock_cutoff < 1)
        throw ResourceLimit("lattice oracle: fock cutoff in [1, 3]");

    std::vector<Matrix> a = detail::lattice_site_tensors(s.Q, s.R, dx, fock_cutoff);
    Matrix e1 = detail::site_superop(a, detail::fock_identity);
    detail::LatticeEnvironment env = detail::lattice_environment(e1);

    auto expect1 = [&](const Matrix& esup) {
        return (env.l.dot(esup * env.r) / (env.eta * env.overlap)).real();
    };
    auto expect2 = [&](const Matrix& e_a, const Matrix& e_b) {  // adjacent sites
        return (env.l.dot(e_a * (e_b * env.r)) / (env.eta * env.eta * env.overlap)).real();
    };

    Matrix e_n = detail::site_superop(a, [](int m, int n) -> Complex {
        return m == n ? Complex(n, 0) : Complex(0, 0);
    });
    Matrix e_nn1 = detail::site_superop(a, [](int m, int n) -> Complex {
        return m == n ? Complex(n * (n - 1), 0) : Complex(0, 0);
    });
    Matrix e_b = detail::site_superop(a, [](int m, int n) -> Complex {
        return (m == n - 1) ? Complex(std::sqrt(double(n)), 0) : Complex(0, 0);
    });
    Matrix e_bdag = detail::site_superop(a, [](int m, int n) -> Complex {
        return (m == n + 1) ? Complex(std::sqrt(double(n + 1)), 0) : Complex(0, 0);
    });

    LatticeObservables out;
    out.density = expect1(e_n) / dx;
    out.pair = expect1(e_nn1) / (dx * dx);
    // <(psi^dag_{i+1} - psi^dag_i)(psi_{i+1} - psi_i)> / dx^2 with psi = b/sqrt(dx)
    double hop = expect2(e_bdag, e_b) + expect2(e_b, e_bdag);
    double kin = (2.0 * expect1(e_n) - hop) / (dx * dx * dx);
    out.energy = kin + v0 * out.density + g * out.pair;
    return out;
}

/// Lattice value of the tangent-space overlap for gauge-fixed tangent pairs
/// on a uniform state; connected geometric series with the dominant channel
/// deflated.
inline Complex lattice_tangent_overlap(const UniformCmps& s, const UniformTangent& t1,
                                       const UniformTangent& t2, double dx, int fock_cutoff) {
    if (s.dim() > 4) throw ResourceLimit("lattice oracle: D <= 4 only");
    const int d = s.dim();
    std::vector<Matrix> a = detail::lattice_site_tensors(s.Q, s.R, dx, fock_cutoff);

    auto delta_tensors = [&](const UniformTangent& t) {
        std::vector<Matrix> da(fock_cutoff + 1);
        da[0] = dx * t.V;
        Matrix sq = std::sqrt(dx) * s.R;
        Matrix dW = std::sqrt(dx) * t.W;
        // d/d eps of (sqrt(dx)(R + eps W))^n / sqrt(n!)
        double fact = 1.0;
        for (int n = 1; n <= fock_cutoff; ++n) {
            fact *= n;
            Matrix acc = Matrix::Zero(d, d);
            for (int j = 0; j < n; ++j) {
                Matrix term = Matrix::Identity(d, d);
                for (int m = 0; m < n; ++m) term = term * (m == j ? dW : sq);
                acc += term;
            }
            da[n] = acc / std::sqrt(fact);
        }
        return da;
    };
    std::vector<Matrix> d1 = delta_tensors(t1), d2 = delta_tensors(t2);

    Matrix e1 = detail::site_superop(a, detail::fock_identity);
    detail::LatticeEnvironment env = detail::lattice_environment(e1);
    Matrix en = e1 / env.eta;

    auto mixed = [&](const std::vector<Matrix>& bra, const std::vector<Matrix>& ket) {
        const int dd = d * d;
        Matrix out = Matrix::Zero(dd, dd);
        for (int n = 0; n <= fock_cutoff; ++n) out += kron(bra[n].conjugate(), ket[n]);
        return out;
    };
    Matrix e_12 = mixed(d1, d2);        // both variations on the same site
    Matrix e_ket = mixed(a, d2) / env.eta;
    Matrix e_bra = mixed(d1, a) / env.eta;

    // deflated resolvent (1 - E~)^{-1}, E~ = E/eta - |r><l| / <l|r>
    const int dd = d * d;
    Matrix defl = en - (env.r * env.l.adjoint()) / env.overlap;
    Matrix resolvent = (Matrix::Identity(dd, dd) - defl).partialPivLu().inverse();

    Complex same = env.l.dot(e_12 * env.r) / (env.eta * env.overlap);
    Complex cross1 = env.l.dot(e_bra * (resolvent * (e_ket * env.r))) / env.overlap;
    Complex cross2 = env.l.dot(e_ket * (resolvent * (e_bra * env.r))) / env.overlap;
    return (same + cross1 + cross2) / dx;
}

// ---- finite-chain contraction ---------------------------------------------------------

/// Exact contraction of a finite grid state against the occupation-basis
/// discretization; returns the density profile.
inline std::vector<double> lattice_density_profile(const FiniteCmps& s, int fock_cutoff) {
    if (s.dim() > 4) throw ResourceLimit("lattice oracle: D <= 4 only");
    if (s.points() > 65) throw ResourceLimit("lattice oracle: at most 64 cells");
    if (fock_cutoff > 3 || fock_cutoff < 1) throw ResourceLimit("lattice oracle: cutoff in [1,3]");
    const int n = s.points() - 1;  // cells between grid points
    const double dx = s.dx();
    const int d = s.dim();

    std::vector<Matrix> esite(n), ensite(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Matrix> a =
            detail::lattice_site_tensors(0.5 * (s.Qs[i] + s.Qs[i + 1]),
                                         0.5 * (s.Rs[i] + s.Rs[i + 1]), dx, fock_cutoff);
        esite[i] = detail::site_superop(a, detail::fock_identity);
        ensite[i] = detail::site_superop(a, [](int m, int nn) -> Complex {
            return m == nn ? Complex(nn, 0) : Complex(0, 0);
        });
    }
    Vector right_end = vec((s.v2 * s.v2.adjoint()).eval());
    Vector left_end = vec((s.v1 * s.v1.adjoint()).eval());

    std::vector<Vector> right(n + 1);
    right[n] = right_end;
    for (int i = n - 1; i >= 0; --i) right[i] = esite[i] * right[i + 1];
    Vector left = left_end;
    std::vector<double> profile(n);
    for (int i = 0; i < n; ++i) {
        Complex nrm = left.dot(right[i]);
        Complex val = left.dot(ensite[i] * right[i + 1]);
        profile[i] = (val / nrm).real() / dx;
        left = esite[i].adjoint() * left;
    }
    (void)d;
    return profile;
}

}  // namespace qgpe

#endif
