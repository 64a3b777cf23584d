#ifndef QGPE_TRANSFER_HPP
#define QGPE_TRANSFER_HPP

#include <vector>

#include "qgpe/cmps.hpp"
#include "qgpe/detail/transfer_core.hpp"
#include "qgpe/ode.hpp"

namespace qgpe {

// ---- reduced density matrices -------------------------------------------------

/// Uniform fixed-point pair, normalized so tr(rho_L rho_R) = 1 with
/// tr(rho_L) = D (left-canonical states then have rho_L = I exactly).
struct UniformDensityMatrices {
    Matrix rhoL;
    Matrix rhoR;
    double norm = 1.0;     // tr(rho_L rho_R) after normalization
    double lambda = 0.0;   // transfer eigenvalue of the input state
    double gap = -1.0;     // spectral gap when computed densely
};

/// Grid-resolved density matrices for finite states, with the pointwise
/// norm tr(rho_L(x) rho_R(x)) and minimum eigenvalues for rank monitoring.
struct FiniteDensityMatrices {
    std::vector<Matrix> rhoL;
    std::vector<Matrix> rhoR;
    std::vector<double> norm;
    std::vector<double> min_eig_left;
    std::vector<double> min_eig_right;
};

/// Dominant left/right fixed points of a uniform state.  Requires a simple
/// dominant eigenvalue; throws NonInjective when it is degenerate within 1e-10.
inline UniformDensityMatrices fixed_point_density(const UniformCmps& s,
                                                  const Matrix* warm_right = nullptr,
                                                  const Matrix* warm_left = nullptr) {
    const int d = s.dim();
    detail::FixedPointInfo l =
        detail::dominant_fixed_point(detail::TransferSide::Left, s.Q, s.R, warm_left);
    detail::FixedPointInfo r =
        detail::dominant_fixed_point(detail::TransferSide::Right, s.Q, s.R, warm_right);
    if (l.gap >= 0.0 && l.gap < 1e-10)
        throw NonInjective("transfer generator has a degenerate dominant eigenvalue");

    UniformDensityMatrices out;
    out.rhoL = l.rho * static_cast<double>(d);
    out.rhoR = r.rho;
    const double overlap = frob_inner(out.rhoL, out.rhoR).real();
    if (!(overlap > 0))
        throw NonInjective("left/right fixed points have non-positive overlap");
    out.rhoR /= overlap;
    out.norm = 1.0;
    out.lambda = 0.5 * (l.lambda + r.lambda);
    out.gap = l.gap;
    return out;
}

// ---- finite-system propagation --------------------------------------------------

/// Integrates the defining first-order equations for rho_L (forward from
/// v1 v1^dag) and rho_R (backward from v2 v2^dag) with RK4 on the grid.
/// Coefficients at half-steps come from cubic interpolation, so smooth
/// profiles keep the classical fourth order.  Hermiticity is restored by
/// symmetrization after every step.
inline FiniteDensityMatrices propagate_density(const FiniteCmps& s) {
    const int n = s.points();
    const double h = s.dx();
    std::vector<Matrix> qm = grid_midpoints(s.Qs);
    std::vector<Matrix> rm = grid_midpoints(s.Rs);

    FiniteDensityMatrices out;
    out.rhoL.resize(n);
    out.rhoR.resize(n);
    out.norm.resize(n);
    out.min_eig_left.resize(n);
    out.min_eig_right.resize(n);

    auto guard = [](const Matrix& m, const char* what) {
        // overflow signals an unstable Q; bail out before denormal arithmetic
        if (!all_finite(m) || m.norm() > 1e120)
            throw NonFiniteDerivative(std::string("propagate_density: ") + what);
    };

    out.rhoL[0] = s.v1 * s.v1.adjoint();
    for (int i = 0; i + 1 < n; ++i) {
        const Matrix& rho = out.rhoL[i];
        Matrix k1 = apply_transfer_left(s.Qs[i], s.Rs[i], rho);
        Matrix k2 = apply_transfer_left(qm[i], rm[i], rho + 0.5 * h * k1);
        Matrix k3 = apply_transfer_left(qm[i], rm[i], rho + 0.5 * h * k2);
        Matrix k4 = apply_transfer_left(s.Qs[i + 1], s.Rs[i + 1], rho + h * k3);
        out.rhoL[i + 1] = hermitize(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        guard(out.rhoL[i + 1], "left sweep overflow");
    }

    out.rhoR[n - 1] = s.v2 * s.v2.adjoint();
    for (int i = n - 1; i > 0; --i) {
        const Matrix& rho = out.rhoR[i];
        // d rho_R/dx = -(Q rho + rho Q^dag + R rho R^dag); integrate towards -x
        Matrix k1 = apply_transfer_right(s.Qs[i], s.Rs[i], rho);
        Matrix k2 = apply_transfer_right(qm[i - 1], rm[i - 1], rho + 0.5 * h * k1);
        Matrix k3 = apply_transfer_right(qm[i - 1], rm[i - 1], rho + 0.5 * h * k2);
        Matrix k4 = apply_transfer_right(s.Qs[i - 1], s.Rs[i - 1], rho + h * k3);
        out.rhoR[i - 1] = hermitize(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        guard(out.rhoR[i - 1], "right sweep overflow");
    }

    for (int i = 0; i < n; ++i) {
        out.norm[i] = frob_inner(out.rhoL[i], out.rhoR[i]).real();
        Eigen::SelfAdjointEigenSolver<Matrix> el(out.rhoL[i]), er(out.rhoR[i]);
        out.min_eig_left[i] = el.eigenvalues().minCoeff();
        out.min_eig_right[i] = er.eigenvalues().minCoeff();
    }
    return out;
}

// ---- observables -----------------------------------------------------------------

/// <psi^dag psi> = tr(rho_L R rho_R R^dag) / tr(rho_L rho_R)
inline double particle_density(const UniformCmps& s, const UniformDensityMatrices& d) {
    double nrm = frob_inner(d.rhoL, d.rhoR).real();
    return (d.rhoL * s.R * d.rhoR * s.R.adjoint()).trace().real() / nrm;
}

/// <psi^dag psi^dag psi psi> = tr(rho_L R^2 rho_R R^dag^2) / tr(rho_L rho_R)
inline double pair_correlation(const UniformCmps& s, const UniformDensityMatrices& d) {
    double nrm = frob_inner(d.rhoL, d.rhoR).real();
    Matrix r2 = s.R * s.R;
    return (d.rhoL * r2 * d.rhoR * r2.adjoint()).trace().real() / nrm;
}

/// Energy density tr(rho_L DxR rho_R DxR^dag)/norm + v n + g g2.
inline double energy_density(const UniformCmps& s, const UniformDensityMatrices& d,
                             double g, double v) {
    double nrm = frob_inner(d.rhoL, d.rhoR).real();
    Matrix dxr = covariant_derivative_x(s);
    double kin = (d.rhoL * dxr * d.rhoR * dxr.adjoint()).trace().real() / nrm;
    return kin + v * particle_density(s, d) + g * pair_correlation(s, d);
}

inline double particle_density(const FiniteCmps& s, const FiniteDensityMatrices& d, int i) {
    return (d.rhoL[i] * s.Rs[i] * d.rhoR[i] * s.Rs[i].adjoint()).trace().real() / d.norm[i];
}

inline double pair_correlation(const FiniteCmps& s, const FiniteDensityMatrices& d, int i) {
    Matrix r2 = s.Rs[i] * s.Rs[i];
    return (d.rhoL[i] * r2 * d.rhoR[i] * r2.adjoint()).trace().real() / d.norm[i];
}

/// Pointwise energy density; dxr is the precomputed covariant derivative array.
inline double energy_density(const FiniteCmps& s, const FiniteDensityMatrices& d,
                             const std::vector<Matrix>& dxr, int i, double g, double v_at_i) {
    double kin = (d.rhoL[i] * dxr[i] * d.rhoR[i] * dxr[i].adjoint()).trace().real() / d.norm[i];
    return kin + v_at_i * particle_density(s, d, i) + g * pair_correlation(s, d, i);
}

}  // namespace qgpe

#endif
