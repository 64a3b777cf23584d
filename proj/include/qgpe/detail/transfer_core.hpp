#ifndef QGPE_DETAIL_TRANSFER_CORE_HPP
#define QGPE_DETAIL_TRANSFER_CORE_HPP

#include "qgpe/linalg.hpp"
#include "qgpe/types.hpp"

namespace qgpe {

/// Left transfer action rho -> Q^dag rho + rho Q + R^dag rho R.
inline Matrix apply_transfer_left(const Matrix& q, const Matrix& r, const Matrix& rho) {
    return q.adjoint() * rho + rho * q + r.adjoint() * rho * r;
}

/// Right transfer action rho -> Q rho + rho Q^dag + R rho R^dag.
inline Matrix apply_transfer_right(const Matrix& q, const Matrix& r, const Matrix& rho) {
    return q * rho + rho * q.adjoint() + r * rho * r.adjoint();
}

/// Dense D^2 x D^2 generator of the left action (column-major vec).
inline Matrix left_generator_matrix(const Matrix& q, const Matrix& r) {
    const int d = q.rows();
    Matrix id = Matrix::Identity(d, d);
    return kron(id, q.adjoint()) + kron(q.transpose(), id) +
           kron(r.transpose(), r.adjoint());
}

inline Matrix right_generator_matrix(const Matrix& q, const Matrix& r) {
    const int d = q.rows();
    Matrix id = Matrix::Identity(d, d);
    return kron(id, q) + kron(q.conjugate(), id) + kron(r.conjugate(), r);
}

inline LinearMap left_transfer_map(const Matrix& q, const Matrix& r) {
    LinearMap m;
    m.rows = static_cast<int>(q.rows());
    m.cols = static_cast<int>(q.cols());
    m.apply = [q, r](const Matrix& x) { return apply_transfer_left(q, r, x); };
    m.apply_adjoint = [q, r](const Matrix& x) { return apply_transfer_right(q, r, x); };
    return m;
}

inline LinearMap right_transfer_map(const Matrix& q, const Matrix& r) {
    LinearMap m;
    m.rows = static_cast<int>(q.rows());
    m.cols = static_cast<int>(q.cols());
    m.apply = [q, r](const Matrix& x) { return apply_transfer_right(q, r, x); };
    m.apply_adjoint = [q, r](const Matrix& x) { return apply_transfer_left(q, r, x); };
    return m;
}

namespace detail {

enum class TransferSide { Left, Right };

struct FixedPointInfo {
    Matrix rho;      // Hermitian, trace-normalized to tr(rho) = 1
    double lambda;   // dominant eigenvalue (real part; imaginary part ~ 0)
    double gap;      // real-part separation to the runner-up (dense path only)
};

inline Matrix transfer_apply(TransferSide side, const Matrix& q, const Matrix& r,
                             const Matrix& rho) {
    return side == TransferSide::Left ? apply_transfer_left(q, r, rho)
                                      : apply_transfer_right(q, r, rho);
}

/// Fixes the Hermitian representative with positive trace; rescales tr = 1.
inline Matrix normalize_fixed_point(const Matrix& rho_raw) {
    Matrix rho = rho_raw;
    Complex tr = rho.trace();
    if (std::abs(tr) > 1e-300) rho *= std::conj(tr) / std::abs(tr);  // rotate to real trace
    rho = hermitize(rho);
    double t = rho.trace().real();
    if (t < 0) {
        rho = -rho;
        t = -t;
    }
    if (t <= 0) throw DegenerateFixedPoint("fixed point has vanishing trace");
    return rho / t;
}

inline FixedPointInfo dominant_fixed_point_dense(TransferSide side, const Matrix& q,
                                                 const Matrix& r) {
    const int d = static_cast<int>(q.rows());
    Matrix gen = side == TransferSide::Left ? left_generator_matrix(q, r)
                                            : right_generator_matrix(q, r);
    EigenPair p = dominant_eigenpair_dense(gen);
    FixedPointInfo out;
    out.rho = normalize_fixed_point(unvec(p.vector, d, d));
    out.lambda = p.value.real();
    out.gap = p.gap;
    return out;
}

/// Picard refinement of the transfer fixed point, warm-started from rho0.
/// Splits the action as (Q-part) + (R-part) and iterates
///   rho <- -Syl^{-1}(R-part(rho)),
/// which converges linearly at the transfer-gap rate when Q is strictly
/// stable (canonical-form states).  Runs to its numerical floor and keeps
/// the best iterate; returns true when that floor is below tol.
inline bool picard_refine(TransferSide side, const Matrix& q, const Matrix& r,
                          Matrix& rho, double tol, int max_iter = 160) {
    const double scale = std::max(1.0, q.norm() + r.norm() * r.norm());
    Matrix best = rho;
    double best_rn = std::numeric_limits<double>::infinity();
    try {
        SylvesterSolver syl = (side == TransferSide::Left)
                                  ? SylvesterSolver(q.adjoint(), q)
                                  : SylvesterSolver(q, q.adjoint());
        int no_progress = 0;
        for (int it = 0; it < max_iter; ++it) {
            Matrix res = transfer_apply(side, q, r, rho);
            double rn = res.norm();
            if (rn < best_rn) {
                best_rn = rn;
                best = rho;
                no_progress = 0;
            } else if (++no_progress > 2 && it > 4) {
                break;  // at the roundoff floor for this state
            }
            if (rn < 1e-15 * scale) break;
            Matrix rhs;
            if (side == TransferSide::Left)
                rhs = -(r.adjoint() * rho * r);
            else
                rhs = -(r * rho * r.adjoint());
            rho = syl.solve(rhs);
            rho = hermitize(rho);
            double t = rho.trace().real();
            if (!(std::abs(t) > 1e-300)) break;
            rho /= t;
        }
    } catch (const SingularSpectrum&) {
        return false;
    }
    rho = best;
    return best_rn < tol * scale;
}

/// Shifted inverse power polish for large D or hard cases: amplifies the
/// dominant (near-zero) eigendirection through (T - s)^{-1} solves.
inline bool inverse_power_refine(TransferSide side, const Matrix& q, const Matrix& r,
                                 Matrix& rho, double tol, int max_outer = 40) {
    const int d = static_cast<int>(q.rows());
    const double scale = std::max(1.0, q.norm() + r.norm() * r.norm());
    const Complex shift(1e-3 * scale, 0.0);
    auto op = [&](const Vector& v) {
        Matrix x = unvec(v, d, d);
        return vec((transfer_apply(side, q, r, x) - shift * x).eval());
    };
    for (int it = 0; it < max_outer; ++it) {
        Matrix res = transfer_apply(side, q, r, rho);
        if (res.norm() < tol * scale) return true;
        GmresResult g = gmres(op, vec(rho), 1e-10, 40 * d * d);
        if (!g.converged && g.relres > 1e-4) return false;
        rho = hermitize(unvec(g.x, d, d));
        double t = rho.trace().real();
        if (!(std::abs(t) > 1e-300)) return false;
        rho /= t;
    }
    Matrix res = transfer_apply(side, q, r, rho);
    return res.norm() < tol * scale;
}

/// Dominant fixed point by the cheapest reliable route.  The dense path is
/// exact and reports the spectral gap; iterative refinement handles larger
/// bond dimensions and warm starts.
inline FixedPointInfo dominant_fixed_point(TransferSide side, const Matrix& q,
                                           const Matrix& r, const Matrix* warm = nullptr,
                                           double tol = 1e-12) {
    const int d = static_cast<int>(q.rows());
    if (warm != nullptr && warm->rows() == d) {
        Matrix rho = *warm;
        bool ok = picard_refine(side, q, r, rho, tol);
        if (!ok) ok = inverse_power_refine(side, q, r, rho, tol);
        if (ok) {
            FixedPointInfo out;
            out.rho = normalize_fixed_point(rho);
            Matrix t = transfer_apply(side, q, r, out.rho);
            out.lambda = frob_inner(out.rho, t).real() / frob_inner(out.rho, out.rho).real();
            out.gap = -1.0;  // unknown on the warm path
            return out;
        }
    }
    if (d <= 16) return dominant_fixed_point_dense(side, q, r);
    // cold start at large D
    Matrix rho = Matrix::Identity(d, d) / static_cast<double>(d);
    if (!picard_refine(side, q, r, rho, tol, 2000) &&
        !inverse_power_refine(side, q, r, rho, tol, 200))
        throw IllConditioned("dominant_fixed_point: iteration failed at D=" +
                             std::to_string(d));
    FixedPointInfo out;
    out.rho = normalize_fixed_point(rho);
    Matrix t = transfer_apply(side, q, r, out.rho);
    out.lambda = frob_inner(out.rho, t).real() / frob_inner(out.rho, out.rho).real();
    out.gap = -1.0;
    return out;
}

}  // namespace detail
}  // namespace qgpe

#endif
