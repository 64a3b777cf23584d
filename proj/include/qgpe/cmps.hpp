#ifndef QGPE_CMPS_HPP
#define QGPE_CMPS_HPP

#include <Eigen/Cholesky>
#include <vector>

#include "qgpe/detail/transfer_core.hpp"
#include "qgpe/linalg.hpp"
#include "qgpe/types.hpp"

namespace qgpe {

// ---- state types ------------------------------------------------------------

/// Translation-invariant state: D x D matrices Q (units 1/length) and
/// R (units 1/sqrt(length)) in a fixed gauge.
struct UniformCmps {
    Matrix Q;
    Matrix R;

    int dim() const { return static_cast<int>(Q.rows()); }
};

struct BoundaryCondition {
    enum class Kind { Dirichlet, Neumann };
    Kind kind = Kind::Neumann;
    Complex a{0.0, 0.0};
    Complex b{0.0, 0.0};

    static BoundaryCondition dirichlet(Complex a, Complex b) {
        BoundaryCondition bc;
        bc.kind = Kind::Dirichlet;
        bc.a = a;
        bc.b = b;
        return bc;
    }
    static BoundaryCondition neumann() { return BoundaryCondition{}; }
};

/// Grid-sampled state on [x1, x2] with boundary vectors.  The grid is
/// uniformly spaced with at least three points.
struct FiniteCmps {
    std::vector<double> grid;
    std::vector<Matrix> Qs;
    std::vector<Matrix> Rs;
    Vector v1;
    Vector v2;
    BoundaryCondition bc;

    int dim() const { return static_cast<int>(v1.size()); }
    int points() const { return static_cast<int>(grid.size()); }
    double dx() const { return grid[1] - grid[0]; }
    double length() const { return grid.back() - grid.front(); }

    void validate() const {
        if (points() < 3) throw std::invalid_argument("finite cMPS needs N >= 3");
        const double h = dx();
        for (int i = 1; i < points(); ++i)
            if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::abs(h))
                throw std::invalid_argument("finite cMPS grid must be uniform");
        if (!(v1.norm() > 0) || !(v2.norm() > 0))
            throw std::invalid_argument("boundary vectors must be nonzero");
        if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
            const int d = dim();
            if ((Rs.front() - bc.a * Matrix::Identity(d, d)).norm() > 1e-12 ||
                (Rs.back() - bc.b * Matrix::Identity(d, d)).norm() > 1e-12)
                throw std::invalid_argument("Dirichlet promotion requires R = a*I, b*I at the walls");
        }
    }
};

/// Invertible gauge matrix per grid point (single entry for uniform states).
struct GaugeTransform {
    std::vector<Matrix> site;

    GaugeTransform() = default;
    explicit GaugeTransform(Matrix g) { site.push_back(std::move(g)); }
    explicit GaugeTransform(std::vector<Matrix> gs) : site(std::move(gs)) {}
    bool uniform() const { return site.size() == 1; }
};

// ---- grid derivatives --------------------------------------------------------

/// Second-order finite differences: centered in the interior, one-sided at
/// the two endpoints.
inline std::vector<Matrix> grid_derivative(const std::vector<Matrix>& f, double dx) {
    const int n = static_cast<int>(f.size());
    std::vector<Matrix> out(n);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    return out;
}

/// Compact second derivative: 3-point interior stencil (no Nyquist null
/// mode), second-order one-sided at the walls.
inline std::vector<Matrix> grid_second_derivative(const std::vector<Matrix>& f, double dx) {
    const int n = static_cast<int>(f.size());
    std::vector<Matrix> out(n);
    const double h2 = dx * dx;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    if (n >= 4) {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    } else {
        out[0] = out[1];
        out[n - 1] = out[n - 2];
    }
    return out;
}

/// Cubic interpolation at cell midpoints (n-1 values for n samples); keeps
/// RK4 coefficient evaluation at fourth order on smooth profiles.
inline std::vector<Matrix> grid_midpoints(const std::vector<Matrix>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<Matrix> mid(n - 1);
    if (n == 2) {
        mid[0] = 0.5 * (f[0] + f[1]);
        return mid;
    }
    if (n == 3) {
        mid[0] = (3.0 * f[0] + 6.0 * f[1] - f[2]) / 8.0;
        mid[1] = (-f[0] + 6.0 * f[1] + 3.0 * f[2]) / 8.0;
        return mid;
    }
    mid[0] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    for (int i = 1; i < n - 2; ++i)
        mid[i] = (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
    mid[n - 2] = (f[n - 4] - 5.0 * f[n - 3] + 15.0 * f[n - 2] + 5.0 * f[n - 1]) / 16.0;
    return mid;
}

// ---- covariant derivative ----------------------------------------------------

/// D_x R = dR/dx + [Q, R]; the derivative term vanishes for uniform states.
inline Matrix covariant_derivative_x(const UniformCmps& s) {
    return commutator(s.Q, s.R);
}

inline std::vector<Matrix> covariant_derivative_x(const FiniteCmps& s) {
    std::vector<Matrix> d = grid_derivative(s.Rs, s.dx());
    for (int i = 0; i < s.points(); ++i) d[i] += commutator(s.Qs[i], s.Rs[i]);
    return d;
}

// ---- canonical form -----------------------------------------------------------

inline double left_canonical_residual(const UniformCmps& s) {
    return (s.Q + s.Q.adjoint() + s.R.adjoint() * s.R).norm();
}

// ---- gauge transformations -----------------------------------------------------

namespace detail {
inline Matrix checked_inverse(const Matrix& g) {
    Eigen::JacobiSVD<Matrix> svd(g);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0) || smax / smin > 1e12)
        throw SingularGauge("gauge matrix is numerically singular");
    return g.partialPivLu().inverse();
}
}  // namespace detail

/// R -> G^-1 R G, Q -> G^-1 (Q + d/dx) G.  Physical observables unchanged.
inline UniformCmps gauge_transform(const UniformCmps& s, const Matrix& g) {
    Matrix gi = detail::checked_inverse(g);
    return UniformCmps{gi * s.Q * g, gi * s.R * g};
}

inline UniformCmps gauge_transform(const UniformCmps& s, const GaugeTransform& g) {
    if (!g.uniform()) throw std::invalid_argument("uniform state needs a single gauge matrix");
    return gauge_transform(s, g.site[0]);
}

/// Finite-system version; dG/dx by the same grid differences used everywhere
/// else.  Boundary vectors transform as v1 -> G(x1)^dag v1, v2 -> G(x2)^-1 v2.
inline FiniteCmps gauge_transform(const FiniteCmps& s, const GaugeTransform& g) {
    if (static_cast<int>(g.site.size()) != s.points())
        throw std::invalid_argument("gauge transform size mismatch");
    FiniteCmps out = s;
    std::vector<Matrix> dg = grid_derivative(g.site, s.dx());
    for (int i = 0; i < s.points(); ++i) {
        Matrix gi = detail::checked_inverse(g.site[i]);
        out.Rs[i] = gi * s.Rs[i] * g.site[i];
        out.Qs[i] = gi * (s.Qs[i] * g.site[i] + dg[i]);
    }
    out.v1 = g.site.front().adjoint() * s.v1;
    out.v2 = detail::checked_inverse(g.site.back()) * s.v2;
    return out;
}

struct CanonicalizeResult {
    UniformCmps state;
    Matrix gauge;        // maps the normalized input to the output
    double norm_shift;   // lambda/2 subtracted from the diagonal of Q
};

/// Brings a uniform state to the left-canonical form Q + Q^dag + R^dag R = 0.
/// The dominant left fixed point rho_L is factored as L L^dag and G = L^{-dag};
/// the transfer eigenvalue is absorbed as Q -> Q - (lambda/2) I first, which
/// only changes norm and phase.
inline CanonicalizeResult left_canonicalize(const UniformCmps& s,
                                            const Matrix* warm_rho = nullptr) {
    const int d = s.dim();
    detail::FixedPointInfo fp =
        detail::dominant_fixed_point(detail::TransferSide::Left, s.Q, s.R, warm_rho);
    Matrix rho = fp.rho * static_cast<double>(d);  // tr = D, identity-normalized

    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    if (!(emin > 0) || emax / emin > 1e12)
        throw DegenerateFixedPoint("left fixed point is rank deficient");

    Matrix qn = s.Q - 0.5 * fp.lambda * Matrix::Identity(d, d);
    Eigen::LLT<Matrix> llt(rho);
    if (llt.info() != Eigen::Success)
        throw DegenerateFixedPoint("Cholesky of the left fixed point failed");
    Matrix lfac = llt.matrixL();           // rho = L L^dag
    Matrix linv = lfac.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
    Matrix g = linv.adjoint();             // G = L^{-dag}, so G^dag rho G = I

    CanonicalizeResult out;
    out.state = UniformCmps{lfac.adjoint() * qn * g, lfac.adjoint() * s.R * g};
    out.gauge = g;
    out.norm_shift = 0.5 * fp.lambda;
    // sweep up rounding: enforce the constraint on the Hermitian part of Q
    Matrix viol = out.state.Q + out.state.Q.adjoint() + out.state.R.adjoint() * out.state.R;
    out.state.Q -= 0.5 * viol;
    return out;
}

/// Left-canonical random state, deterministic per seed: R has i.i.d. complex
/// Gaussian entries scaled by 1/sqrt(D); Q = -R^dag R/2 + antihermitian noise.
inline UniformCmps random_uniform_state(int d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("bond dimension must be >= 1");
    RandomStream rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Matrix r = rng.gaussian_matrix(d, d, scale);
    Matrix m = rng.gaussian_matrix(d, d, scale);
    Matrix h = 0.5 * (m - m.adjoint());
    return UniformCmps{-0.5 * (r.adjoint() * r) + h, r};
}

/// Embeds a state into a larger bond dimension with small random entries in
/// the new block, then restores the canonical form.  Good warm starts for
/// ground-state searches at growing D.
inline UniformCmps pad_state(const UniformCmps& s, int d_new, double noise,
                             std::uint64_t seed) {
    const int d = s.dim();
    if (d_new <= d) return s;
    RandomStream rng(seed);
    Matrix r = noise * rng.gaussian_matrix(d_new, d_new, 1.0 / std::sqrt(double(d_new)));
    r.topLeftCorner(d, d) = s.R;
    Matrix m = noise * rng.gaussian_matrix(d_new, d_new, 1.0 / std::sqrt(double(d_new)));
    Matrix h = 0.5 * (m - m.adjoint());
    h.topLeftCorner(d, d) += s.Q + 0.5 * (s.R.adjoint() * s.R);
    return UniformCmps{-0.5 * (r.adjoint() * r) + h, r};
}

}  // namespace qgpe

#endif
