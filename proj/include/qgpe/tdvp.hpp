#ifndef QGPE_TDVP_HPP
#define QGPE_TDVP_HPP

#include <functional>
#include <optional>
#include <vector>

#include "qgpe/ode.hpp"
#include "qgpe/transfer.hpp"

namespace qgpe {

enum class TimeMode { Real, Imaginary };

/// Lieb-Liniger couplings.  The homogeneous potential is v0 = -mu; an
/// optional profile is added on top for finite systems.
struct LiebLinigerParams {
    double g = 1.0;
    double mu = 1.0;
    std::function<double(double)> vext;  // optional x-dependent part

    double v0() const { return -mu; }
    double v_at(double x) const { return -mu + (vext ? vext(x) : 0.0); }
};

// ---- tangent vectors -----------------------------------------------------------

struct UniformTangent {
    Matrix V;  // variation of Q
    Matrix W;  // variation of R
};

struct FiniteTangent {
    std::vector<Matrix> V;
    std::vector<Matrix> W;
    Vector w1;  // variation of the left boundary vector
    Vector w2;  // variation of the right boundary vector
};

// ---- building blocks -------------------------------------------------------------

/// B = g R^2 - [R, DxR]; the commutator part carries the beyond-mean-field
/// content of the flow.
inline Matrix interaction_kernel(const Matrix& r, const Matrix& dxr, double g) {
    return g * r * r - commutator(r, dxr);
}

inline Matrix interaction_kernel(const UniformCmps& s, double g) {
    return interaction_kernel(s.R, covariant_derivative_x(s), g);
}

/// Hermitian gauge potential for a left-canonical uniform state: solves
///   Q^dag F + F Q + R^dag F R = -[ (DxR)^dag DxR + v0 R^dag R + g R^dag^2 R^2 ]
/// The raw right-hand side is obstructed by the cokernel of the transfer
/// map; subtracting eta*I with eta = tr(rho_R rhs)/tr(rho_R) makes it
/// solvable and shifts the flow only along the norm/phase ray.  The kernel
/// freedom F -> F + c I is fixed by tr(F rho_R) = 0.
inline Matrix solve_F(const UniformCmps& s, const UniformDensityMatrices& dens,
                      const LiebLinigerParams& p) {
    const int d = s.dim();
    const Matrix id = Matrix::Identity(d, d);
    Matrix dxr = covariant_derivative_x(s);
    Matrix rhs = -(dxr.adjoint() * dxr + p.v0() * s.R.adjoint() * s.R +
                   p.g * s.R.adjoint() * s.R.adjoint() * s.R * s.R);
    Complex eta = (dens.rhoR * rhs).trace() / dens.rhoR.trace();
    rhs -= eta * id;
    Matrix f = solve_singular_linear(left_transfer_map(s.Q, s.R), rhs, dens.rhoR, id);
    Complex c = (f * dens.rhoR).trace() / dens.rhoR.trace();
    f -= c * id;
    return hermitize(f);
}

/// P = -i R^dag DxR + i F, the time component of the gauge potential that
/// keeps the state in left-canonical form along the flow.
inline Matrix choose_P(const Matrix& r, const Matrix& dxr, const Matrix& f) {
    return -I_UNIT * (r.adjoint() * dxr) + I_UNIT * f;
}

namespace detail {
/// X = A * rho^{-1} for Hermitian positive rho via a factorized solve.
inline Matrix right_inverse_apply(const Matrix& a, const Matrix& rho) {
    return rho.ldlt().solve(a.adjoint()).adjoint();
}
}  // namespace detail

// ---- uniform flow -----------------------------------------------------------------

struct UniformFlow {
    Matrix Qdot;
    Matrix Rdot;
    Matrix F;
    Matrix P;
    double grad_norm = 0.0;  // metric norm of the R-update (imaginary mode)
};

/// Right-hand side of the uniform flow in the left-canonical gauge.
/// The covariant update direction is
///   M = W + [P_tau, R],  W = -[Q,[Q,R]] + v0 R + R^dag B + B (rho_R R^dag rho_R^-1)
/// with P_tau = F - R^dag [Q,R]; real time advances R by -i M, imaginary
/// time by -M.  Q is slaved to Qdot = -R^dag Rdot, which preserves the
/// canonical constraint identically and drops only norm/phase content.
inline UniformFlow qgpe_rhs_uniform(const UniformCmps& s, const UniformDensityMatrices& dens,
                                    const LiebLinigerParams& p, TimeMode mode) {
    const int d = s.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(dens.rhoR);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    if (!(emax > 0) || emin < -1e-8 * emax)
        throw SingularDensity("uniform flow: right density matrix is degenerate");

    const Matrix& q = s.Q;
    const Matrix& r = s.R;
    Matrix k = commutator(q, r);
    Matrix b = interaction_kernel(r, k, p.g);
    // exhausted bond directions make rho_R exactly rank deficient; the same
    // floor as the finite-system walls keeps the dressing bounded
    const double eps = 1e-10 * dens.rhoR.trace().real() / d;
    Matrix reg = dens.rhoR + eps * Matrix::Identity(d, d);
    Matrix r_right = detail::right_inverse_apply(dens.rhoR * r.adjoint(), reg);
    Matrix w = -commutator(q, k) + p.v0() * r + r.adjoint() * b + b * r_right;

    UniformFlow out;
    out.F = solve_F(s, dens, p);
    Matrix p_tau = out.F - r.adjoint() * k;
    out.P = I_UNIT * p_tau;
    Matrix m = w + commutator(p_tau, r);
    out.Rdot = (mode == TimeMode::Real) ? (-I_UNIT * m).eval() : (-m).eval();
    out.Qdot = -(r.adjoint() * out.Rdot);
    out.grad_norm =
        std::sqrt(std::abs((out.Rdot * dens.rhoR * out.Rdot.adjoint()).trace().real()));
    return out;
}

// ---- tangent metric -----------------------------------------------------------------

namespace detail {
inline void check_gauge_fixed(const Matrix& r, const Matrix& v, const Matrix& w) {
    if ((v + r.adjoint() * w).norm() > 1e-8)
        throw GaugeFixingViolated("tangent vector violates V = -R^dag W");
}
}  // namespace detail

/// Physical overlap of two gauge-fixed tangent vectors, antilinear in the
/// first argument.  With V = -R^dag W the double-integral cross terms of the
/// general overlap vanish and the metric is local.
inline Complex tangent_metric(const UniformCmps& s, const UniformDensityMatrices& dens,
                              const UniformTangent& t1, const UniformTangent& t2) {
    detail::check_gauge_fixed(s.R, t1.V, t1.W);
    detail::check_gauge_fixed(s.R, t2.V, t2.W);
    double nrm = frob_inner(dens.rhoL, dens.rhoR).real();
    return (dens.rhoL * t2.W * dens.rhoR * t1.W.adjoint()).trace() / nrm;
}

/// Finite-system version: trapezoid rule over the grid plus the boundary-
/// vector terms, normalized by tr(rho_L rho_R).
inline Complex tangent_metric(const FiniteCmps& s, const FiniteDensityMatrices& dens,
                              const FiniteTangent& t1, const FiniteTangent& t2) {
    const int n = s.points();
    for (int i = 0; i < n; ++i) {
        detail::check_gauge_fixed(s.Rs[i], t1.V[i], t1.W[i]);
        detail::check_gauge_fixed(s.Rs[i], t2.V[i], t2.W[i]);
    }
    double nu = 0.0;
    for (int i = 0; i < n; ++i) nu += dens.norm[i];
    nu /= n;
    Complex acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += wgt * s.dx() * (dens.rhoL[i] * t2.W[i] * dens.rhoR[i] * t1.W[i].adjoint()).trace();
    }
    acc += (t1.w1.adjoint() * dens.rhoR.front() * t2.w1).value();
    acc += (t1.w2.adjoint() * dens.rhoL.back() * t2.w2).value();
    return acc / nu;
}

// ---- finite flow -----------------------------------------------------------------------

struct FiniteFlow {
    std::vector<Matrix> Qdot;
    std::vector<Matrix> Rdot;
    Vector v1dot;
    Vector v2dot;
};

/// Covariant flow on the grid.  F comes from integrating its first-order
/// equation left to right from F(x1) = 0; density inverses are regularized
/// by eps = 1e-10 tr(rho)/D, which near the walls is where the exact rank
/// deficiency of rho_L, rho_R lives.  Dirichlet walls keep R(x1), R(x2)
/// frozen; boundary vectors follow their own first-order equations.
inline FiniteFlow qgpe_rhs_finite(const FiniteCmps& s, const FiniteDensityMatrices& dens,
                                  const LiebLinigerParams& p, TimeMode mode) {
    const int n = s.points();
    const int d = s.dim();
    const double h = s.dx();
    const Matrix id = Matrix::Identity(d, d);

    // D_x^2 R expanded with a compact Laplacian; composing two centered
    // first derivatives would leave the Nyquist mode unpenalized
    std::vector<Matrix> dxr = covariant_derivative_x(s);
    std::vector<Matrix> d1r = grid_derivative(s.Rs, h);
    std::vector<Matrix> d2r = grid_second_derivative(s.Rs, h);
    std::vector<Matrix> d1q = grid_derivative(s.Qs, h);
    std::vector<Matrix> ddxr(n);
    for (int i = 0; i < n; ++i)
        ddxr[i] = d2r[i] + 2.0 * commutator(s.Qs[i], d1r[i]) + commutator(d1q[i], s.Rs[i]) +
                  commutator(s.Qs[i], commutator(s.Qs[i], s.Rs[i]));

    // regularized inverse factors and rank monitoring
    int floor_hits = 0;
    std::vector<Eigen::LDLT<Matrix>> invL(n), invR(n);
    for (int i = 0; i < n; ++i) {
        double epsl = 1e-10 * std::max(dens.rhoL[i].trace().real(), 1e-300) / d;
        double epsr = 1e-10 * std::max(dens.rhoR[i].trace().real(), 1e-300) / d;
        invL[i].compute(dens.rhoL[i] + epsl * id);
        invR[i].compute(dens.rhoR[i] + epsr * id);
        if (i > 0 && i < n - 1 &&
            (dens.min_eig_left[i] < epsl || dens.min_eig_right[i] < epsr))
            ++floor_hits;
    }
    if (10 * floor_hits > n - 2)
        throw SingularDensity("finite flow: density regularization floor hit on >10% of interior");

    // F equation integrated with RK4; coefficients interpolated at midpoints
    std::vector<Matrix> rhs_f(n);
    for (int i = 0; i < n; ++i)
        rhs_f[i] = dxr[i].adjoint() * dxr[i] +
                   p.v_at(s.grid[i]) * s.Rs[i].adjoint() * s.Rs[i] +
                   p.g * s.Rs[i].adjoint() * s.Rs[i].adjoint() * s.Rs[i] * s.Rs[i];
    std::vector<Matrix> qm = grid_midpoints(s.Qs), rm = grid_midpoints(s.Rs),
                        sm = grid_midpoints(rhs_f);
    std::vector<Matrix> f(n);
    f[0] = Matrix::Zero(d, d);
    auto f_rhs = [](const Matrix& q, const Matrix& r, const Matrix& src, const Matrix& x) {
        return (q.adjoint() * x + x * q + r.adjoint() * x * r + src).eval();
    };
    for (int i = 0; i + 1 < n; ++i) {
        Matrix k1 = f_rhs(s.Qs[i], s.Rs[i], rhs_f[i], f[i]);
        Matrix k2 = f_rhs(qm[i], rm[i], sm[i], f[i] + 0.5 * h * k1);
        Matrix k3 = f_rhs(qm[i], rm[i], sm[i], f[i] + 0.5 * h * k2);
        Matrix k4 = f_rhs(s.Qs[i + 1], s.Rs[i + 1], rhs_f[i + 1], f[i] + h * k3);
        f[i + 1] = hermitize(f[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (!all_finite(f[i + 1]) || f[i + 1].norm() > 1e120)
            throw NonFiniteDerivative("finite flow: F integration overflow");
    }

    std::vector<Matrix> p_tau(n);
    for (int i = 0; i < n; ++i) p_tau[i] = f[i] - s.Rs[i].adjoint() * dxr[i];
    std::vector<Matrix> dxp = grid_derivative(p_tau, h);

    FiniteFlow out;
    out.Qdot.resize(n);
    out.Rdot.resize(n);
    const bool real_time = (mode == TimeMode::Real);
    const Complex time_factor = real_time ? -I_UNIT : Complex(-1.0, 0.0);

    for (int i = 0; i < n; ++i) {
        Matrix b = interaction_kernel(s.Rs[i], dxr[i], p.g);
        Matrix lterm = invL[i].solve(s.Rs[i].adjoint() * dens.rhoL[i]);
        Matrix rterm = invR[i].solve((dens.rhoR[i] * s.Rs[i].adjoint()).adjoint()).adjoint();
        Matrix w = -ddxr[i] + p.v_at(s.grid[i]) * s.Rs[i] + lterm * b + b * rterm;
        Matrix v_raw = -lterm * b * rterm;

        out.Rdot[i] = time_factor * (w + commutator(p_tau[i], s.Rs[i]));
        // Q evolves by the covariant equation; P = i P_tau in real time
        if (real_time)
            out.Qdot[i] = I_UNIT * (dxp[i] + commutator(s.Qs[i], p_tau[i])) - I_UNIT * v_raw;
        else
            out.Qdot[i] = dxp[i] + commutator(s.Qs[i], p_tau[i]) - v_raw;
    }

    if (s.bc.kind == BoundaryCondition::Kind::Dirichlet) {
        out.Rdot.front().setZero();
        out.Rdot.back().setZero();
        Matrix dxr1d = dxr.front().adjoint(), dxr2 = dxr.back();
        if (real_time) {
            // i dv1/dt - i P(x1)^dag-contracted ... written out:
            // dv1/dt = P(x1)^dag v1 - i a DxR(x1)^dag v1
            Matrix pmat1 = I_UNIT * p_tau.front();
            Matrix pmat2 = I_UNIT * p_tau.back();
            out.v1dot = pmat1.adjoint() * s.v1 - I_UNIT * s.bc.a * dxr1d * s.v1;
            out.v2dot = -pmat2 * s.v2 - I_UNIT * std::conj(s.bc.b) * dxr2 * s.v2;
        } else {
            out.v1dot = p_tau.front().adjoint() * s.v1 + s.bc.a * dxr1d * s.v1;
            out.v2dot = -p_tau.back() * s.v2 - std::conj(s.bc.b) * dxr2 * s.v2;
        }
    } else {  // Neumann: homogeneous right-hand side
        if (real_time) {
            out.v1dot = (I_UNIT * p_tau.front()).adjoint() * s.v1;
            out.v2dot = -(I_UNIT * p_tau.back()) * s.v2;
        } else {
            out.v1dot = p_tau.front().adjoint() * s.v1;
            out.v2dot = -p_tau.back() * s.v2;
        }
    }
    return out;
}

// ---- RK4 state algebra -------------------------------------------------------------------

struct UniformStateVec {
    Matrix Q, R;
};
inline UniformStateVec operator+(const UniformStateVec& a, const UniformStateVec& b) {
    return {a.Q + b.Q, a.R + b.R};
}
inline UniformStateVec operator*(double c, const UniformStateVec& a) {
    return {c * a.Q, c * a.R};
}
inline bool all_finite(const UniformStateVec& a) {
    return all_finite(a.Q) && all_finite(a.R);
}

struct FiniteStateVec {
    std::vector<Matrix> Qs, Rs;
    Vector v1, v2;
};
inline FiniteStateVec operator+(const FiniteStateVec& a, const FiniteStateVec& b) {
    FiniteStateVec out = a;
    for (size_t i = 0; i < a.Qs.size(); ++i) {
        out.Qs[i] += b.Qs[i];
        out.Rs[i] += b.Rs[i];
    }
    out.v1 += b.v1;
    out.v2 += b.v2;
    return out;
}
inline FiniteStateVec operator*(double c, const FiniteStateVec& a) {
    FiniteStateVec out = a;
    for (size_t i = 0; i < a.Qs.size(); ++i) {
        out.Qs[i] *= c;
        out.Rs[i] *= c;
    }
    out.v1 *= c;
    out.v2 *= c;
    return out;
}
inline bool all_finite(const FiniteStateVec& a) {
    for (const auto& m : a.Qs)
        if (!all_finite(m)) return false;
    for (const auto& m : a.Rs)
        if (!all_finite(m)) return false;
    return all_finite(a.v1) && all_finite(a.v2);
}

// ---- ground-state search ------------------------------------------------------------------

struct EnergyRecord {
    int step = 0;
    double tau = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double dt = 0.0;
};

struct GroundStateResult {
    UniformCmps state;
    std::vector<EnergyRecord> trace;
    double energy = 0.0;
    double density = 0.0;
    double grad_norm = 0.0;
    int steps = 0;
    bool converged = false;
};

struct GroundStateOptions {
    double tol = 1e-8;
    int max_steps = 200000;
    std::uint64_t seed = 0;
    double dt0 = 1e-3;
    double dt_max = 0.5;
    std::optional<UniformCmps> initial;
};

/// Imaginary-time gradient flow with adaptive Euler steps: halve on energy
/// increase, grow 1.2x on success, re-canonicalize every accepted step.
/// Accepted steps never raise the energy beyond a 1e-12 relative tolerance.
inline GroundStateResult imaginary_time_ground_state(const LiebLinigerParams& p, int D,
                                                     const GroundStateOptions& opt) {
    UniformCmps state = opt.initial ? *opt.initial : random_uniform_state(D, opt.seed);
    if (opt.initial) state = left_canonicalize(state).state;

    GroundStateResult out;
    Matrix warm_rho;
    auto density_of = [&](const UniformCmps& s) {
        UniformDensityMatrices dm;
        dm.rhoL = Matrix::Identity(s.dim(), s.dim());
        detail::FixedPointInfo fp = detail::dominant_fixed_point(
            detail::TransferSide::Right, s.Q, s.R,
            warm_rho.size() == s.Q.size() ? &warm_rho : nullptr, 1e-13);
        dm.rhoR = fp.rho;
        dm.norm = 1.0;
        dm.lambda = fp.lambda;
        warm_rho = fp.rho;
        return dm;
    };

    UniformDensityMatrices dens = density_of(state);
    double energy = energy_density(state, dens, p.g, p.v0());
    double dt = opt.dt0;
    double tau = 0.0;

    out.trace.push_back({0, 0.0, energy, 0.0, dt});
    if (!(opt.tol < std::numeric_limits<double>::infinity())) {
        out.state = state;
        out.energy = energy;
        out.density = particle_density(state, dens);
        out.converged = true;
        return out;
    }

    // geometric-tail extrapolation: the late flow converges linearly along a
    // few soft directions, so an occasional Aitken jump (gated by the same
    // energy-decrease rule as any other step) collapses the tail
    const int extrap_stride = 64;
    UniformCmps snapshot = state;
    double snapshot_grad = 0.0;
    int snapshot_step = 0;

    auto try_accept = [&](const UniformCmps& trial, double grad_for_trace) {
        if (!all_finite(trial.Q) || !all_finite(trial.R)) return false;
        try {
            UniformCmps canon = left_canonicalize(trial, &dens.rhoL).state;
            UniformDensityMatrices dens_trial = density_of(canon);
            double e_trial = energy_density(canon, dens_trial, p.g, p.v0());
            if (e_trial > energy + 1e-12 * std::abs(energy)) return false;
            state = canon;
            dens = dens_trial;
            energy = e_trial;
            out.trace.push_back({0, tau, energy, grad_for_trace, dt});
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };

    int accepted = 0;
    while (accepted < opt.max_steps) {
        UniformFlow flow = qgpe_rhs_uniform(state, dens, p, TimeMode::Imaginary);
        out.grad_norm = flow.grad_norm;
        if (flow.grad_norm < opt.tol) {
            out.converged = true;
            break;
        }

        if (accepted - snapshot_step >= extrap_stride) {
            double r = snapshot_grad > 0 ? flow.grad_norm / snapshot_grad : 1.0;
            if (r > 0.3 && r < 0.995) {
                double alpha = r / (1.0 - r);
                UniformCmps jump{state.Q + alpha * (state.Q - snapshot.Q),
                                 state.R + alpha * (state.R - snapshot.R)};
                if (try_accept(jump, flow.grad_norm)) {
                    ++accepted;
                    out.trace.back().step = accepted;
                    flow = qgpe_rhs_uniform(state, dens, p, TimeMode::Imaginary);
                    out.grad_norm = flow.grad_norm;
                    if (flow.grad_norm < opt.tol) {
                        out.converged = true;
                        break;
                    }
                }
            }
            snapshot = state;
            snapshot_grad = flow.grad_norm;
            snapshot_step = accepted;
        }
        if (snapshot_grad == 0.0) {
            snapshot = state;
            snapshot_grad = flow.grad_norm;
            snapshot_step = accepted;
        }

        bool stepped = false;
        while (dt > 1e-14) {
            UniformCmps trial{state.Q + dt * flow.Qdot, state.R + dt * flow.Rdot};
            if (try_accept(trial, flow.grad_norm)) {
                tau += dt;
                ++accepted;
                out.trace.back().step = accepted;
                out.trace.back().tau = tau;
                dt = std::min(dt * 1.2, opt.dt_max);
                stepped = true;
                break;
            }
            dt *= 0.5;
        }
        if (!stepped) break;  // step size underflow: gradient floor reached
    }

    out.state = state;
    out.energy = energy;
    out.density = particle_density(state, dens);
    out.steps = accepted;
    if (!out.converged) {
        UniformFlow flow = qgpe_rhs_uniform(state, dens, p, TimeMode::Imaginary);
        out.grad_norm = flow.grad_norm;
        out.converged = flow.grad_norm < opt.tol;
    }
    return out;
}

// ---- real-time evolution ------------------------------------------------------------------

struct UniformTrajectoryPoint {
    double t = 0.0;
    double energy = 0.0;
    double density = 0.0;
    double canonical_residual = 0.0;
};

struct UniformEvolutionResult {
    UniformCmps state;
    std::vector<UniformTrajectoryPoint> trajectory;
};

/// RK4 real-time integration of a uniform state.  Energy is a constant of
/// motion for time-independent parameters; a relative jump above 1e-3 in a
/// single step raises StepTooLarge.
inline UniformEvolutionResult real_time_evolve(const UniformCmps& initial,
                                               const LiebLinigerParams& p, double t_end,
                                               double dt, TimeMode mode = TimeMode::Real,
                                               bool recanonicalize = false) {
    UniformCmps state = initial;
    Matrix warm_rho;
    auto density_of = [&](const UniformCmps& s) {
        UniformDensityMatrices dm;
        dm.rhoL = Matrix::Identity(s.dim(), s.dim());
        detail::FixedPointInfo fp = detail::dominant_fixed_point(
            detail::TransferSide::Right, s.Q, s.R,
            warm_rho.size() == s.Q.size() ? &warm_rho : nullptr, 1e-13);
        dm.rhoR = fp.rho;
        dm.norm = 1.0;
        warm_rho = fp.rho;
        return dm;
    };
    auto rhs = [&](const UniformStateVec& y, double) {
        UniformCmps st{y.Q, y.R};
        UniformDensityMatrices dm = density_of(st);
        UniformFlow flow = qgpe_rhs_uniform(st, dm, p, mode);
        return UniformStateVec{flow.Qdot, flow.Rdot};
    };

    UniformEvolutionResult out;
    UniformDensityMatrices dm = density_of(state);
    double energy = energy_density(state, dm, p.g, p.v0());
    out.trajectory.push_back({0.0, energy, particle_density(state, dm),
                              left_canonical_residual(state)});
    const int nsteps = static_cast<int>(std::llround(t_end / dt));
    double t = 0.0;
    for (int i = 0; i < nsteps; ++i) {
        UniformStateVec y{state.Q, state.R};
        y = ode_step_rk4(rhs, y, t, dt);
        t += dt;
        state = UniformCmps{y.Q, y.R};
        if (recanonicalize) state = left_canonicalize(state, &warm_rho).state;
        dm = density_of(state);
        double e_new = energy_density(state, dm, p.g, p.v0());
        if (std::abs(e_new - energy) > 1e-3 * std::max(1e-6, std::abs(energy)))
            throw StepTooLarge("real_time_evolve: energy jumped in one step");
        energy = e_new;
        out.trajectory.push_back({t, energy, particle_density(state, dm),
                                  left_canonical_residual(state)});
    }
    out.state = state;
    return out;
}

// ---- finite-system evolution -----------------------------------------------------------

struct FiniteTrajectoryPoint {
    double t = 0.0;
    double energy = 0.0;       // integrated over the box
    double particles = 0.0;    // integrated density
    double norm_spread = 0.0;  // relative x-variation of tr(rho_L rho_R)
};

struct FiniteEvolutionResult {
    FiniteCmps state;
    std::vector<FiniteTrajectoryPoint> trajectory;
};

namespace detail {
struct FiniteMeasurement {
    double energy;
    double particles;
    double norm_mean;
    double norm_spread;
};

inline FiniteMeasurement measure_finite(const FiniteCmps& s, const FiniteDensityMatrices& dens,
                                        const LiebLinigerParams& p) {
    const int n = s.points();
    std::vector<Matrix> dxr = covariant_derivative_x(s);
    FiniteMeasurement m{0.0, 0.0, 0.0, 0.0};
    double nmin = std::numeric_limits<double>::infinity(), nmax = 0.0;
    for (int i = 0; i < n; ++i) {
        double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        m.energy += wgt * s.dx() * energy_density(s, dens, dxr, i, p.g, p.v_at(s.grid[i]));
        m.particles += wgt * s.dx() * particle_density(s, dens, i);
        m.norm_mean += dens.norm[i] / n;
        nmin = std::min(nmin, dens.norm[i]);
        nmax = std::max(nmax, dens.norm[i]);
    }
    m.norm_spread = (nmax - nmin) / std::max(1e-300, std::abs(m.norm_mean));
    return m;
}

/// Rescales the state to unit norm; a pure norm/phase operation.
inline void renormalize_finite(FiniteCmps& s, double norm_mean) {
    if (norm_mean > 0) s.v2 /= std::sqrt(norm_mean);
}
}  // namespace detail

inline FiniteEvolutionResult real_time_evolve(const FiniteCmps& initial,
                                              const LiebLinigerParams& p, double t_end,
                                              double dt) {
    FiniteCmps state = initial;
    state.validate();
    auto rhs = [&](const FiniteStateVec& y, double) {
        FiniteCmps st = state;
        st.Qs = y.Qs;
        st.Rs = y.Rs;
        st.v1 = y.v1;
        st.v2 = y.v2;
        FiniteDensityMatrices dm = propagate_density(st);
        FiniteFlow flow = qgpe_rhs_finite(st, dm, p, TimeMode::Real);
        return FiniteStateVec{flow.Qdot, flow.Rdot, flow.v1dot, flow.v2dot};
    };

    FiniteEvolutionResult out;
    FiniteDensityMatrices dm = propagate_density(state);
    detail::FiniteMeasurement m = detail::measure_finite(state, dm, p);
    out.trajectory.push_back({0.0, m.energy, m.particles, m.norm_spread});
    double energy = m.energy;
    const int nsteps = static_cast<int>(std::llround(t_end / dt));
    double t = 0.0;
    for (int i = 0; i < nsteps; ++i) {
        FiniteStateVec y{state.Qs, state.Rs, state.v1, state.v2};
        y = ode_step_rk4(rhs, y, t, dt);
        t += dt;
        state.Qs = y.Qs;
        state.Rs = y.Rs;
        state.v1 = y.v1;
        state.v2 = y.v2;
        dm = propagate_density(state);
        m = detail::measure_finite(state, dm, p);
        if (std::abs(m.energy - energy) > 1e-3 * std::max(1e-6, std::abs(energy)))
            throw StepTooLarge("finite evolution: energy jumped in one step");
        energy = m.energy;
        out.trajectory.push_back({t, m.energy, m.particles, m.norm_spread});
    }
    out.state = state;
    return out;
}

/// Adaptive-Euler imaginary-time relaxation of a finite state, renormalizing
/// every accepted step.  Stops at tau_end, or earlier when the accepted step
/// size stalls far below dt0 (the energy is then at the discretization
/// floor and further flow cannot lower it).
inline FiniteEvolutionResult imaginary_time_evolve(const FiniteCmps& initial,
                                                   const LiebLinigerParams& p, double tau_end,
                                                   double dt0) {
    FiniteCmps state = initial;
    state.validate();
    FiniteEvolutionResult out;
    FiniteDensityMatrices dm = propagate_density(state);
    detail::FiniteMeasurement m = detail::measure_finite(state, dm, p);
    detail::renormalize_finite(state, m.norm_mean);
    dm = propagate_density(state);
    m = detail::measure_finite(state, dm, p);
    out.trajectory.push_back({0.0, m.energy, m.particles, m.norm_spread});

    double tau = 0.0, dt = dt0, energy = m.energy;
    const double dt_floor = dt0 * 1e-5;
    while (tau < tau_end && dt > dt_floor) {
        FiniteFlow flow = qgpe_rhs_finite(state, dm, p, TimeMode::Imaginary);
        FiniteCmps trial = state;
        for (int i = 0; i < state.points(); ++i) {
            trial.Qs[i] += dt * flow.Qdot[i];
            trial.Rs[i] += dt * flow.Rdot[i];
        }
        trial.v1 += dt * flow.v1dot;
        trial.v2 += dt * flow.v2dot;
        FiniteDensityMatrices dm_trial;
        detail::FiniteMeasurement m_trial;
        bool ok = true;
        try {
            dm_trial = propagate_density(trial);
            m_trial = detail::measure_finite(trial, dm_trial, p);
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok && m_trial.energy <= energy + 1e-12 * std::abs(energy)) {
            detail::renormalize_finite(trial, m_trial.norm_mean);
            state = trial;
            dm = propagate_density(state);
            m = detail::measure_finite(state, dm, p);
            energy = m.energy;
            tau += dt;
            dt = std::min(dt * 1.2, 10.0 * dt0);
            out.trajectory.push_back({tau, m.energy, m.particles, m.norm_spread});
        } else {
            dt *= 0.5;
        }
    }
    out.state = state;
    return out;
}

// ---- coupling calibration -------------------------------------------------------------

/// Measured dimensionless coupling gamma = g / density.
inline double gamma_of(const GroundStateResult& r, double g) { return g / r.density; }

struct CalibrationResult {
    double mu = 0.0;
    GroundStateResult ground;
};

/// Bisection on the chemical potential to hit a target gamma; the density
/// grows with mu, so gamma falls monotonically.  Warm-starts each solve from
/// the previous converged state; probes run at a loosened tolerance (the
/// density settles long before the gradient) with one final polish at the
/// requested tolerance.
inline CalibrationResult find_mu_for_gamma(double g, double gamma_target, int D,
                                           GroundStateOptions opt, double mu_guess = 0.0,
                                           double rel_tol = 0.01, int max_bisect = 40) {
    const double n_t = g / gamma_target;
    // weak-coupling mu ~ 2 g n, Tonks-Girardeau mu ~ pi^2 n^2; blend by gamma
    const double tg_weight = gamma_target * gamma_target / (gamma_target * gamma_target + 40.0);
    double mu = mu_guess > 0
                    ? mu_guess
                    : 2.0 * g * n_t * (1.0 - 0.5 * tg_weight) +
                          M_PI * M_PI * n_t * n_t * tg_weight;
    // probes only need the density, which settles long before the gradient
    GroundStateOptions probe = opt;
    probe.tol = std::max(opt.tol, 1e-6);
    probe.max_steps = std::min(opt.max_steps, 4000);
    auto solve_at = [&](double mu_try, const std::optional<UniformCmps>& init) {
        LiebLinigerParams p;
        p.g = g;
        p.mu = mu_try;
        GroundStateOptions o = probe;
        o.initial = init;
        return imaginary_time_ground_state(p, D, o);
    };

    GroundStateResult r = solve_at(mu, std::nullopt);
    double gamma = gamma_of(r, g);
    GroundStateResult r_best = r;
    double mu_best = mu;

    // gamma(mu) is decreasing: walk mu until the target is bracketed
    double mu_lo, mu_hi;  // gamma(mu_lo) > target > gamma(mu_hi)
    if (gamma > gamma_target) {
        mu_lo = mu;
        do {
            mu *= 2.0;
            r = solve_at(mu, r.state);
            gamma = gamma_of(r, g);
            r_best = r;
            mu_best = mu;
        } while (gamma > gamma_target && mu < 1e12);
        mu_hi = mu;
    } else {
        mu_hi = mu;
        do {
            mu *= 0.5;
            r = solve_at(mu, r.state);
            gamma = gamma_of(r, g);
            r_best = r;
            mu_best = mu;
        } while (gamma < gamma_target && mu > 1e-12);
        mu_lo = mu;
    }
    for (int i = 0; i < max_bisect && std::abs(gamma / gamma_target - 1.0) > rel_tol; ++i) {
        mu = 0.5 * (mu_lo + mu_hi);
        r = solve_at(mu, r_best.state);
        gamma = gamma_of(r, g);
        r_best = r;
        mu_best = mu;
        if (gamma > gamma_target)
            mu_lo = mu;
        else
            mu_hi = mu;
    }
    if (opt.tol < probe.tol) {  // polish at the requested tolerance
        LiebLinigerParams p;
        p.g = g;
        p.mu = mu_best;
        GroundStateOptions o = opt;
        o.initial = r_best.state;
        r_best = imaginary_time_ground_state(p, D, o);
    }
    return CalibrationResult{mu_best, r_best};
}

}  // namespace qgpe

#endif
