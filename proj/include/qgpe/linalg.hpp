#ifndef QGPE_LINALG_HPP
#define QGPE_LINALG_HPP

#include <Eigen/Eigenvalues>
#include <functional>
#include <utility>
#include <vector>

#include "qgpe/types.hpp"

namespace qgpe {

// ---- vectorization (column-major) ------------------------------------------

inline Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, int rows, int cols) {
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

/// kron(P,Q): block (i,j) is P(i,j)*Q.  vec(A X B) = kron(B^T, A) vec(X).
inline Matrix kron(const Matrix& p, const Matrix& q) {
    Matrix out(p.rows() * q.rows(), p.cols() * q.cols());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j)
            out.block(i * q.rows(), j * q.cols(), q.rows(), q.cols()) = p(i, j) * q;
    return out;
}

// ---- linear maps over D x D matrices ----------------------------------------

/// Abstract linear action on matrices together with its adjoint under the
/// Frobenius inner product.
struct LinearMap {
    int rows = 0;
    int cols = 0;
    std::function<Matrix(const Matrix&)> apply;
    std::function<Matrix(const Matrix&)> apply_adjoint;

    int dim() const { return rows * cols; }
};

// ---- Sylvester equation A X + X B = C ---------------------------------------

/// Direct dense solver with cached Schur factors, for repeated solves with
/// the same (A, B).  Bartels-Stewart: triangularize both sides, then solve
/// column by column with shifted back-substitution.
class SylvesterSolver {
  public:
    SylvesterSolver(const Matrix& a, const Matrix& b) : n_(a.rows()), m_(b.rows()) {
        if (a.rows() != a.cols() || b.rows() != b.cols())
            throw std::invalid_argument("sylvester: square matrices required");
        if (!all_finite(a) || !all_finite(b))
            throw std::invalid_argument("sylvester: non-finite input");
        Eigen::ComplexSchur<Matrix> sa(a, true), sb(b, true);
        S_ = sa.matrixT();
        U_ = sa.matrixU();
        T_ = sb.matrixT();
        V_ = sb.matrixU();
        scale_ = a.norm() + b.norm();
    }

    Matrix solve(const Matrix& c) const {
        if (!all_finite(c)) throw std::invalid_argument("sylvester: non-finite rhs");
        Matrix ct = U_.adjoint() * c * V_;
        Matrix y = Matrix::Zero(n_, m_);
        const double tol = 1e-14 * (scale_ > 0 ? scale_ : 1.0);
        for (int k = 0; k < m_; ++k) {
            Vector rhs = ct.col(k);
            if (k > 0) rhs -= y.leftCols(k) * T_.block(0, k, k, 1);
            // back-substitution on (S + T(k,k) I) y_k = rhs
            Complex shift = T_(k, k);
            for (int i = n_ - 1; i >= 0; --i) {
                Complex acc = rhs(i);
                for (int j = i + 1; j < n_; ++j) acc -= S_(i, j) * y(j, k);
                Complex d = S_(i, i) + shift;
                if (std::abs(d) < tol)
                    throw SingularSpectrum("sylvester: spectra of A and -B overlap");
                y(i, k) = acc / d;
            }
        }
        return U_ * y * V_.adjoint();
    }

  private:
    int n_, m_;
    Matrix S_, U_, T_, V_;
    double scale_ = 1.0;
};

/// One-shot solve of A X + X B = C.
inline Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
    return SylvesterSolver(a, b).solve(c);
}

// ---- GMRES ------------------------------------------------------------------

struct GmresResult {
    Vector x;
    double relres = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
inline GmresResult gmres(const std::function<Vector(const Vector&)>& apply,
                         const Vector& rhs, double tol, int max_apply,
                         int restart = 0, const Vector* x0 = nullptr) {
    const int n = static_cast<int>(rhs.size());
    if (restart <= 0) restart = std::min(n, 200);
    const double bnorm = rhs.norm();
    GmresResult res;
    res.x = x0 ? *x0 : Vector::Zero(n);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    int applied = 0;
    while (applied < max_apply) {
        Vector r = rhs - apply(res.x);
        ++applied;
        double beta = r.norm();
        res.relres = beta / bnorm;
        if (res.relres <= tol) {
            res.converged = true;
            res.iterations = applied;
            return res;
        }
        const int m = std::min(restart, max_apply - applied);
        if (m <= 0) break;
        std::vector<Vector> basis;
        basis.reserve(m + 1);
        basis.push_back(r / beta);
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
        std::vector<Complex> cs(m), sn(m);
        Vector g = Vector::Zero(m + 1);
        g(0) = beta;
        int k = 0;
        for (; k < m; ++k) {
            Vector w = apply(basis[k]);
            ++applied;
            if (!all_finite(w)) throw IllConditioned("gmres: non-finite operator output");
            for (int i = 0; i <= k; ++i) {
                H(i, k) = basis[i].dot(w);
                w -= H(i, k) * basis[i];
            }
            // re-orthogonalize once against drift
            for (int i = 0; i <= k; ++i) {
                Complex corr = basis[i].dot(w);
                H(i, k) += corr;
                w -= corr * basis[i];
            }
            const double hnext = w.norm();
            H(k + 1, k) = hnext;
            // previous Givens rotations
            for (int i = 0; i < k; ++i) {
                Complex t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            double denom = std::sqrt(std::norm(H(k, k)) + std::norm(H(k + 1, k)));
            if (denom > 0) {
                cs[k] = H(k, k) / denom;
                sn[k] = H(k + 1, k) / denom;
                H(k, k) = std::conj(cs[k]) * H(k, k) + std::conj(sn[k]) * H(k + 1, k);
                H(k + 1, k) = 0;
                g(k + 1) = -sn[k] * g(k);
                g(k) = std::conj(cs[k]) * g(k);
            }
            res.relres = std::abs(g(k + 1)) / bnorm;
            const bool breakdown = hnext < 1e-14 * std::max(1.0, bnorm);
            if (!breakdown && res.relres > tol && k + 1 < m)
                basis.push_back(w / hnext);
            else {
                ++k;
                break;
            }
        }
        // solve the small triangular system and update x
        Vector y = Vector::Zero(k);
        for (int i = k - 1; i >= 0; --i) {
            Complex acc = g(i);
            for (int j = i + 1; j < k; ++j) acc -= H(i, j) * y(j);
            y(i) = (std::abs(H(i, i)) > 0) ? acc / H(i, i) : Complex(0, 0);
        }
        for (int i = 0; i < k && i < static_cast<int>(basis.size()); ++i)
            res.x += y(i) * basis[i];
        res.iterations = applied;
        if (res.relres <= tol) {
            res.converged = true;
            return res;
        }
    }
    res.iterations = applied;
    return res;
}

// ---- singular solve with known one-dimensional kernel ------------------------

/// Solves map(X) = rhs when map has a known simple kernel spanned by
/// null_right and cokernel spanned by null_left.  The rhs is first projected
/// onto the complement of null_left; the returned X has zero overlap with
/// null_right.
inline Matrix solve_singular_linear(const LinearMap& map, const Matrix& rhs,
                                    const Matrix& null_left, const Matrix& null_right,
                                    double tol = 1e-12) {
    const int r = map.rows, c = map.cols;
    const Matrix nl = null_left / null_left.norm();
    const Matrix nr = null_right / null_right.norm();

    Matrix rhs_p = rhs - nl * frob_inner(nl, rhs);
    const double rnorm = rhs_p.norm();
    if (rnorm == 0.0) return Matrix::Zero(r, c);

    auto deflated = [&](const Vector& v) {
        Matrix x = unvec(v, r, c);
        x -= nr * frob_inner(nr, x);
        Matrix y = map.apply(x);
        y -= nl * frob_inner(nl, y);
        return vec(y);
    };

    const int cap = 50 * r * c;
    GmresResult g = gmres(deflated, vec(rhs_p), tol, cap);
    if (!g.converged && g.relres > 1e-8)
        throw IllConditioned("solve_singular_linear: stagnated, relres=" +
                             std::to_string(g.relres));
    Matrix x = unvec(g.x, r, c);
    x -= nr * frob_inner(nr, x);
    return x;
}

// ---- dense dominant eigenpair -----------------------------------------------

struct EigenPair {
    Complex value;
    Vector vector;
    double gap = 0.0;  // separation of the two largest real parts
};

/// Eigenvalue of largest real part of a dense matrix, with the real-part gap
/// to the runner-up.
inline EigenPair dominant_eigenpair_dense(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw IllConditioned("dominant_eigenpair: eigensolver failed");
    int best = 0;
    for (int i = 1; i < m.rows(); ++i)
        if (es.eigenvalues()(i).real() > es.eigenvalues()(best).real()) best = i;
    double second = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m.rows(); ++i)
        if (i != best) second = std::max(second, es.eigenvalues()(i).real());
    EigenPair p;
    p.value = es.eigenvalues()(best);
    p.vector = es.eigenvectors().col(best);
    p.gap = p.value.real() - second;
    return p;
}

}  // namespace qgpe

#endif
