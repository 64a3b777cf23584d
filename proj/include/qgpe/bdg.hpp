#ifndef QGPE_BDG_HPP
#define QGPE_BDG_HPP

#include <algorithm>
#include <atomic>
#include <memory>
#include <thread>

#include "qgpe/tdvp.hpp"

namespace qgpe {

// ---- ground-state bundle ------------------------------------------------------

/// Stationary uniform solution with its derived quantities.  All response
/// calculations linearize around this data.
struct GroundStateBundle {
    UniformCmps state;   // left-canonical, stationary
    Matrix rhoR0;        // right fixed point, tr = 1
    Matrix F0;           // stationary Hermitian gauge potential
    Matrix P0;           // -i R0^dag [Q0,R0] + i F0
    double g = 0.0;
    double mu = 0.0;
    double density = 0.0;
    double stationarity = 0.0;
};

inline GroundStateBundle prepare_bundle(const UniformCmps& state,
                                        const LiebLinigerParams& p,
                                        double stationarity_tol = 1e-8) {
    GroundStateBundle b;
    b.state = state;
    UniformDensityMatrices dens = fixed_point_density(state);
    b.rhoR0 = dens.rhoR;
    b.F0 = solve_F(state, dens, p);
    Matrix k0 = commutator(state.Q, state.R);
    b.P0 = -I_UNIT * (state.R.adjoint() * k0) + I_UNIT * b.F0;
    b.g = p.g;
    b.mu = p.mu;
    b.density = particle_density(state, dens);
    UniformFlow flow = qgpe_rhs_uniform(state, dens, p, TimeMode::Imaginary);
    b.stationarity = flow.grad_norm;
    if (b.stationarity > stationarity_tol)
        throw NotStationary("prepare_bundle: flow residual " + std::to_string(b.stationarity));
    return b;
}

// ---- problem/solution records ---------------------------------------------------

struct ResponseProblem {
    double k = 0.0;
    double omega = 0.0;
    LiebLinigerParams params;
};

struct BdGSolution {
    Matrix Rplus;
    Matrix Rminus;    // F_- = F_+^dag and rho_- = rho_+^dag are implied
    Matrix Fplus;
    Matrix rhoplus;
    double amplitude = 0.0;
    double residual = 0.0;
};

// ---- shifted transfer solves -----------------------------------------------------

namespace detail {

/// Solves (T_side + shift)(X) = C by splitting off the Sylvester part and
/// iterating on the R-sandwich; falls back to GMRES on stagnation.  At zero
/// shift the operator is singular (transfer fixed points) and the deflated
/// solver takes over.
class ShiftedTransferSolver {
  public:
    ShiftedTransferSolver(TransferSide side, const Matrix& q, const Matrix& r,
                          Complex shift, const Matrix& rho0)
        : side_(side), q_(q), r_(r), shift_(shift), rho0_(rho0), d_(q.rows()) {
        const Matrix id = Matrix::Identity(d_, d_);
        if (std::abs(shift) > 0) {
            if (side_ == TransferSide::Left)
                syl_ = std::make_unique<SylvesterSolver>((q.adjoint() + shift * id).eval(),
                                                         q);
            else
                syl_ = std::make_unique<SylvesterSolver>((q + shift * id).eval(),
                                                         q.adjoint());
        }
    }

    Matrix solve(const Matrix& c) const {
        if (std::abs(shift_) == 0.0) {  // deflated route through the known kernel
            const Matrix id = Matrix::Identity(d_, d_);
            LinearMap map = side_ == TransferSide::Left ? left_transfer_map(q_, r_)
                                                        : right_transfer_map(q_, r_);
            try {
                return side_ == TransferSide::Left
                           ? solve_singular_linear(map, c, rho0_, id)
                           : solve_singular_linear(map, c, id, rho0_);
            } catch (const IllConditioned& e) {
                throw ShiftSingular(std::string("k = 0 deflated solve failed: ") + e.what());
            }
        }
        Matrix x = Matrix::Zero(d_, d_);
        const double cn = std::max(c.norm(), 1e-300);
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            Matrix res = apply(x) - c;
            double rn = res.norm() / cn;
            if (rn < 1e-11) return x;
            if (rn > 0.9 * prev && it > 6) break;  // stagnating, hand to GMRES
            prev = rn;
            Matrix sandwich;
            if (side_ == TransferSide::Left)
                sandwich = r_.adjoint() * x * r_;
            else
                sandwich = r_ * x * r_.adjoint();
            x = syl_->solve(c - sandwich);
        }
        auto op = [this](const Vector& v) { return vec(apply(unvec(v, d_, d_))); };
        GmresResult g = gmres(op, vec(c), 1e-11, 60 * d_ * d_, 0, nullptr);
        if (!g.converged && g.relres > 1e-8)
            throw IllConditioned("shifted transfer solve failed, relres=" +
                                 std::to_string(g.relres));
        return unvec(g.x, d_, d_);
    }

    Matrix apply(const Matrix& x) const {
        Matrix t = side_ == TransferSide::Left ? apply_transfer_left(q_, r_, x)
                                               : apply_transfer_right(q_, r_, x);
        return t + shift_ * x;
    }

  private:
    TransferSide side_;
    Matrix q_, r_;
    Complex shift_;
    Matrix rho0_;
    int d_;
    std::unique_ptr<SylvesterSolver> syl_;
};

}  // namespace detail

// ---- linearized flow ---------------------------------------------------------------

/// Matrix-free action of the momentum-k block of the energy Hessian on a
/// plane-wave perturbation pair (R_+, R_-^dag); cost O(D^3) per apply.
/// The auxiliary first-order responses rho_+ and F_+ are eliminated through
/// shifted transfer solves, and Q_+ = -R0^dag R_+ enforces the canonical
/// gauge of the perturbation.
class LinearizedQgpe {
  public:
    LinearizedQgpe(const GroundStateBundle& b, double k)
        : b_(b),
          k_(k),
          d_(b.state.dim()),
          rho_solver_(detail::TransferSide::Right, b.state.Q, b.state.R,
                      Complex(0.0, k), b.rhoR0),
          f_solver_(detail::TransferSide::Left, b.state.Q, b.state.R,
                    Complex(0.0, -k), b.rhoR0) {
        k0_ = commutator(b.state.Q, b.state.R);
    }

    int dim() const { return d_; }
    double momentum() const { return k_; }

    struct Pair {
        Matrix p;  // "+" slot
        Matrix m;  // "-dag" slot
    };

    /// rho_+ for a given perturbation (zero drive).
    Matrix solve_rho_plus(const Matrix& rp, const Matrix& rm) const {
        const Matrix& q0 = b_.state.Q;
        const Matrix& r0 = b_.state.R;
        (void)q0;
        Matrix qp = -r0.adjoint() * rp;
        Matrix qmd = -rm * r0;
        Matrix g = -(qp * b_.rhoR0 + b_.rhoR0 * qmd + rp * b_.rhoR0 * r0.adjoint() +
                     r0 * b_.rhoR0 * rm);
        return rho_solver_.solve(g);
    }

    /// F_+ for a given perturbation; drive adds (1/2) R0^dag R0 to the source.
    Matrix solve_f_plus(const Matrix& rp, const Matrix& rm, bool driven) const {
        Matrix src = f_source(rp, rm);
        if (driven) src += 0.5 * (b_.state.R.adjoint() * b_.state.R);
        return f_solver_.solve((-src).eval());
    }

    /// Weighted Hessian action: returns (RHS_+, RHS_-^dag) with the metric
    /// factor rho_R0 still attached on the right/left respectively.
    Pair apply_weighted(const Matrix& rp, const Matrix& rm) const {
        Matrix rhop = solve_rho_plus(rp, rm);
        Matrix fp = solve_f_plus(rp, rm, false);
        Pair out;
        out.p = flow_plus(rp, rm, rhop, fp, k_);
        out.m = flow_plus(rm.adjoint(), rp.adjoint(), rhop.adjoint(), fp.adjoint(), -k_)
                    .adjoint();
        return out;
    }

    /// Metric action: (X_p rho0, rho0 X_m).
    Pair metric_weighted(const Matrix& rp, const Matrix& rm) const {
        return {rp * b_.rhoR0, b_.rhoR0 * rm};
    }

    /// Symplectic sign: (X_p, -X_m) composed with the metric.
    Pair symplectic_weighted(const Matrix& rp, const Matrix& rm) const {
        return {rp * b_.rhoR0, -(b_.rhoR0 * rm)};
    }

    /// Drive source (unit cos-amplitude): the inhomogeneous vector of the
    /// driven linear system, in the weighted convention.
    Pair drive_source() const {
        const Matrix& r0 = b_.state.R;
        Matrix fp_src = f_solver_.solve((-0.5 * (r0.adjoint() * r0)).eval());
        Matrix fm_src = fp_src.adjoint();  // the conjugate-mode equation is the dagger
        Pair out;
        out.p = 0.5 * (r0 * b_.rhoR0) + commutator(fp_src, r0) * b_.rhoR0;
        out.m = (0.5 * (r0 * b_.rhoR0) + commutator(fm_src, r0) * b_.rhoR0).adjoint();
        return out;
    }

    const GroundStateBundle& bundle() const { return b_; }

  private:
    /// Source terms of the F_+ equation that are linear in the perturbation.
    Matrix f_source(const Matrix& rp, const Matrix& rm) const {
        const Matrix& q0 = b_.state.Q;
        const Matrix& r0 = b_.state.R;
        const Matrix& f0 = b_.F0;
        const double g = b_.g;
        const double v0 = -b_.mu;
        Matrix qp = -r0.adjoint() * rp;
        Matrix qmd = -rm * r0;
        Matrix rkp = commutator(qp, r0) + commutator(q0, rp) + I_UNIT * k_ * rp;
        Matrix rkmd = commutator(r0.adjoint(), qmd) + commutator(rm, q0.adjoint()) +
                      I_UNIT * k_ * rm;
        Matrix rr = r0.adjoint() * r0;
        return f0 * qp + qmd * f0 + rm * f0 * r0 + r0.adjoint() * f0 * rp +
               k0_.adjoint() * rkp + rkmd * k0_ +
               g * (rm * rr * r0 + r0.adjoint() * rm * r0 * r0 +
                    r0.adjoint() * r0.adjoint() * rp * r0 + r0.adjoint() * rr * rp) +
               v0 * (rm * r0 + r0.adjoint() * rp);
    }

    /// "+"-mode right-hand side of the linearized flow, with the rho_R0
    /// metric factor attached.  Re-used for the "-" mode through the
    /// substitution (rp,rm,rho,f,k) -> (rm^dag, rp^dag, rho^dag, f^dag, -k)
    /// followed by a dagger.
    Matrix flow_plus(const Matrix& rp, const Matrix& rm, const Matrix& rhop,
                     const Matrix& fp, double k) const {
        const Matrix& q0 = b_.state.Q;
        const Matrix& r0 = b_.state.R;
        const Matrix& rho0 = b_.rhoR0;
        const Matrix& f0 = b_.F0;
        const double g = b_.g;
        const double v0 = -b_.mu;
        const Complex ik(0.0, k);

        Matrix qp = -r0.adjoint() * rp;
        Matrix rkp = commutator(qp, r0) + commutator(q0, rp) + ik * rp;
        Matrix r0d = r0.adjoint();
        Matrix rr = r0d * r0;

        Matrix out = (k * k) * rp * rho0;
        out -= 2.0 * ik * commutator(q0, rp) * rho0;
        out -= ik * commutator(qp, r0) * rho0;
        out -= commutator(qp, k0_) * rho0;
        out -= commutator(q0, commutator(qp, r0)) * rho0;
        out -= commutator(q0, commutator(q0, rp)) * rho0;
        out -= commutator(q0, k0_) * rhop;
        out += g * ((rm * r0 * r0 + r0d * rp * r0 + rr * rp) * rho0 + r0d * r0 * r0 * rhop +
                    rp * r0 * rho0 * r0d + r0 * rp * rho0 * r0d + r0 * r0 * rhop * r0d +
                    r0 * r0 * rho0 * rm);
        out += v0 * (rp * rho0 + r0 * rhop);
        out += commutator(rkp, r0) * rho0 * r0d;
        out += commutator(k0_, rp) * rho0 * r0d;
        out += commutator(k0_, r0) * rhop * r0d;
        out += commutator(k0_, r0) * rho0 * rm;
        out += commutator(rp, r0d) * k0_ * rho0;
        out += commutator(r0, rm) * k0_ * rho0;
        out += commutator(r0, r0d) * rkp * rho0;
        out += commutator(r0, r0d) * k0_ * rhop;
        out += commutator(fp, r0) * rho0;
        out += commutator(f0, rp) * rho0;
        out += commutator(f0, r0) * rhop;
        return out;
    }

    GroundStateBundle b_;
    double k_;
    int d_;
    Matrix k0_;
    detail::ShiftedTransferSolver rho_solver_;
    detail::ShiftedTransferSolver f_solver_;
};

/// Spec-facing helper: the Hessian block action as a LinearMap over stacked
/// (R_+, R_-^dag) pairs in the weighted convention.
inline LinearMap linearized_action(const GroundStateBundle& b, double k) {
    auto op = std::make_shared<LinearizedQgpe>(b, k);
    const int d = b.state.dim();
    LinearMap m;
    m.rows = 2 * d;
    m.cols = d;
    m.apply = [op, d](const Matrix& stacked) {
        LinearizedQgpe::Pair out =
            op->apply_weighted(stacked.topRows(d), stacked.bottomRows(d));
        Matrix res(2 * d, d);
        res.topRows(d) = out.p;
        res.bottomRows(d) = out.m;
        return res;
    };
    m.apply_adjoint = m.apply;  // Hermitian in the metric pairing at stationarity
    return m;
}

// ---- stacked-vector helpers ----------------------------------------------------------

namespace detail {
inline Vector stack_pair(const Matrix& p, const Matrix& m) {
    Vector v(2 * p.size());
    v.head(p.size()) = vec(p);
    v.tail(m.size()) = vec(m);
    return v;
}
inline void unstack_pair(const Vector& v, int d, Matrix& p, Matrix& m) {
    p = unvec(v.head(d * d), d, d);
    m = unvec(v.tail(d * d), d, d);
}
}  // namespace detail

// ---- driven response --------------------------------------------------------------------

/// First-order density modulation amplitude per unit drive.
inline double density_response_amplitude(const BdGSolution& sol, const GroundStateBundle& b) {
    const Matrix& r0 = b.state.R;
    Complex dn = (b.rhoR0 * (sol.Rminus.adjoint() * r0 + r0.adjoint() * sol.Rplus)).trace() +
                 (sol.rhoplus * r0.adjoint() * r0).trace();
    return std::abs(dn);
}

/// Solves the driven 2 D^2 linear system (omega Sigma - Hessian) x = source.
/// Dense LU for D <= 4, GMRES above; near-singular solves signal a resonance.
inline BdGSolution solve_response(const ResponseProblem& prob, const GroundStateBundle& b) {
    LinearizedQgpe op(b, prob.k);
    const int d = b.state.dim();
    const double omega = prob.omega;

    auto system_apply = [&](const Matrix& rp, const Matrix& rm) {
        LinearizedQgpe::Pair hx = op.apply_weighted(rp, rm);
        LinearizedQgpe::Pair sx = op.symplectic_weighted(rp, rm);
        return LinearizedQgpe::Pair{omega * sx.p - hx.p, omega * sx.m - hx.m};
    };

    LinearizedQgpe::Pair src = op.drive_source();
    Vector rhs = detail::stack_pair(src.p, src.m);
    const int n = 2 * d * d;

    Vector x;
    double relres = 0.0;
    if (d <= 4) {
        Matrix sys(n, n);
        Matrix rp(d, d), rm(d, d);
        for (int j = 0; j < n; ++j) {
            Vector e = Vector::Zero(n);
            e(j) = 1.0;
            detail::unstack_pair(e, d, rp, rm);
            LinearizedQgpe::Pair out = system_apply(rp, rm);
            sys.col(j) = detail::stack_pair(out.p, out.m);
        }
        Eigen::PartialPivLU<Matrix> lu(sys);
        x = lu.solve(rhs);
        relres = (sys * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
        if (!all_finite(x) || relres > 1e-6)
            throw Resonance("dense response solve is singular at this (k, omega)");
    } else {
        auto apply_vec = [&](const Vector& v) {
            Matrix p(d, d), m(d, d);
            detail::unstack_pair(v, d, p, m);
            LinearizedQgpe::Pair out = system_apply(p, m);
            return detail::stack_pair(out.p, out.m);
        };
        GmresResult g = gmres(apply_vec, rhs, 1e-9, 60 * n);
        relres = g.relres;
        if (!g.converged && g.relres > 1e-8) {
            if (g.x.norm() > 1e6 * rhs.norm())
                throw Resonance("response solve near-singular: omega within an excitation linewidth");
            throw IllConditioned("response solve stagnated, relres=" + std::to_string(g.relres));
        }
        x = g.x;
    }

    BdGSolution sol;
    Matrix rp(d, d), rm(d, d);
    detail::unstack_pair(x, d, rp, rm);
    sol.Rplus = rp;
    sol.Rminus = rm.adjoint();
    sol.rhoplus = op.solve_rho_plus(rp, rm);
    sol.Fplus = op.solve_f_plus(rp, rm, true);
    sol.residual = relres;
    sol.amplitude = density_response_amplitude(sol, b);
    return sol;
}

// ---- excitation spectrum ------------------------------------------------------------------

namespace detail {

/// Restarted Arnoldi for the largest-magnitude eigenvalues of a general
/// complex operator.
inline std::vector<Complex> arnoldi_eigenvalues(
    const std::function<Vector(const Vector&)>& apply, int n, int n_want, int krylov_m,
    double tol = 1e-9, int max_restart = 12) {
    krylov_m = std::min(krylov_m, n);
    RandomStream rng(12345);
    Vector v0(n);
    for (int i = 0; i < n; ++i) v0(i) = rng.cgaussian();
    v0.normalize();

    std::vector<Complex> best;
    for (int restart = 0; restart < max_restart; ++restart) {
        std::vector<Vector> basis{v0};
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(krylov_m + 1, krylov_m);
        int m = 0;
        for (; m < krylov_m; ++m) {
            Vector w = apply(basis[m]);
            for (int i = 0; i <= m; ++i) {
                h(i, m) = basis[i].dot(w);
                w -= h(i, m) * basis[i];
            }
            // re-orthogonalize once for stability
            for (int i = 0; i <= m; ++i) {
                Complex c = basis[i].dot(w);
                h(i, m) += c;
                w -= c * basis[i];
            }
            h(m + 1, m) = w.norm();
            if (h(m + 1, m).real() < 1e-13) {
                ++m;
                break;
            }
            basis.push_back(w / h(m + 1, m));
        }
        Eigen::MatrixXcd hm = h.topLeftCorner(m, m);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(hm);
        // Ritz residuals: |h(m, m-1)| * |last component of eigenvector|
        std::vector<std::pair<double, Complex>> ritz;
        const double hlast = (m < krylov_m) ? 0.0 : std::abs(h(m, m - 1));
        for (int i = 0; i < m; ++i) {
            double resid = hlast * std::abs(es.eigenvectors()(m - 1, i));
            ritz.push_back({resid, es.eigenvalues()(i)});
        }
        std::sort(ritz.begin(), ritz.end(), [](const auto& a, const auto& b) {
            return std::abs(a.second) > std::abs(b.second);
        });
        best.clear();
        bool converged = true;
        for (int i = 0; i < std::min<int>(n_want, ritz.size()); ++i) {
            best.push_back(ritz[i].second);
            if (ritz[i].first > tol * std::max(1.0, std::abs(ritz[i].second)))
                converged = false;
        }
        if (converged || m < krylov_m) return best;
        // restart from the dominant Ritz direction
        Vector next = Vector::Zero(n);
        int bi = 0;
        double bmag = -1;
        for (int i = 0; i < m; ++i)
            if (std::abs(es.eigenvalues()(i)) > bmag) {
                bmag = std::abs(es.eigenvalues()(i));
                bi = i;
            }
        for (int i = 0; i < m; ++i) next += es.eigenvectors()(i, bi) * basis[i];
        v0 = next.normalized();
    }
    return best;
}

}  // namespace detail

/// All converged eigenvalues omega of the symplectic pencil at momentum k
/// (both signs), by dense assembly for D <= 4 and shift-inverted Arnoldi
/// above.
inline std::vector<Complex> excitation_spectrum_full(const GroundStateBundle& b, double k,
                                                     int n_modes) {
    LinearizedQgpe op(b, k);
    const int d = b.state.dim();
    const int n = 2 * d * d;

    if (d <= 4) {
        Matrix hmat(n, n), smat(n, n);
        Matrix rp(d, d), rm(d, d);
        for (int j = 0; j < n; ++j) {
            Vector e = Vector::Zero(n);
            e(j) = 1.0;
            detail::unstack_pair(e, d, rp, rm);
            LinearizedQgpe::Pair h = op.apply_weighted(rp, rm);
            LinearizedQgpe::Pair s = op.symplectic_weighted(rp, rm);
            hmat.col(j) = detail::stack_pair(h.p, h.m);
            smat.col(j) = detail::stack_pair(s.p, s.m);
        }
        Eigen::PartialPivLU<Matrix> lu(smat);
        Eigen::ComplexEigenSolver<Matrix> es(lu.solve(hmat));
        std::vector<Complex> out(es.eigenvalues().data(),
                                 es.eigenvalues().data() + es.eigenvalues().size());
        std::sort(out.begin(), out.end(),
                  [](Complex a, Complex b2) { return std::abs(a) < std::abs(b2); });
        return out;
    }

    // shift-invert at omega = 0: Arnoldi on x -> H^{-1} Sigma x
    auto inv_apply = [&](const Vector& v) {
        Matrix p(d, d), m(d, d);
        detail::unstack_pair(v, d, p, m);
        LinearizedQgpe::Pair sx = op.symplectic_weighted(p, m);
        Vector rhs = detail::stack_pair(sx.p, sx.m);
        auto happ = [&](const Vector& w) {
            Matrix wp(d, d), wm(d, d);
            detail::unstack_pair(w, d, wp, wm);
            LinearizedQgpe::Pair h = op.apply_weighted(wp, wm);
            return detail::stack_pair(h.p, h.m);
        };
        GmresResult g = gmres(happ, rhs, 1e-10, 80 * n);
        if (!g.converged && g.relres > 1e-7)
            throw ShiftSingular("spectrum: Hessian solve failed at k=" + std::to_string(k));
        return g.x;
    };
    std::vector<Complex> mus = detail::arnoldi_eigenvalues(
        inv_apply, n, 2 * n_modes + 2, std::min(n, std::max(48, 6 * n_modes)));
    std::vector<Complex> out;
    for (Complex mu : mus)
        if (std::abs(mu) > 1e-12) out.push_back(1.0 / mu);
    std::sort(out.begin(), out.end(),
              [](Complex a, Complex b2) { return std::abs(a) < std::abs(b2); });
    return out;
}

/// Positive branch of the excitation frequencies, sorted ascending.
inline std::vector<double> excitation_spectrum(const GroundStateBundle& b, double k,
                                               int n_modes) {
    std::vector<Complex> all = excitation_spectrum_full(b, k, n_modes);
    std::vector<double> pos;
    for (Complex w : all) {
        if (w.real() > std::abs(w.imag()) * 1e3 || (w.real() > 0 && std::abs(w.imag()) < 1e-8))
            pos.push_back(w.real());
    }
    std::sort(pos.begin(), pos.end());
    if (static_cast<int>(pos.size()) > n_modes) pos.resize(n_modes);
    return pos;
}

// ---- momentum sweeps -----------------------------------------------------------------------

struct SweepEntry {
    double k = 0.0;
    double amplitude = 0.0;
    double residual = 0.0;
    bool ok = false;
    std::string error;
};

/// Independent response solves per momentum; embarrassingly parallel and
/// deterministic regardless of the thread count.
inline std::vector<SweepEntry> sweep_k(const GroundStateBundle& b,
                                       const std::vector<double>& ks, double omega,
                                       int threads = 1) {
    std::vector<SweepEntry> table(ks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= ks.size()) return;
            SweepEntry& e = table[i];
            e.k = ks[i];
            try {
                ResponseProblem prob;
                prob.k = ks[i];
                prob.omega = omega;
                BdGSolution sol = solve_response(prob, b);
                e.amplitude = sol.amplitude;
                e.residual = sol.residual;
                e.ok = true;
            } catch (const std::exception& ex) {
                e.ok = false;
                e.error = ex.what();
            }
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || ks.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return table;
}

}  // namespace qgpe

#endif
