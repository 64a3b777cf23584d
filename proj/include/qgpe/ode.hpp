#ifndef QGPE_ODE_HPP
#define QGPE_ODE_HPP

#include "qgpe/types.hpp"

namespace qgpe {

/// Classical explicit RK4 step.  State must support s + s and scalar * s;
/// an all_finite(state) overload must be visible for the finiteness guard.
/// f is called as f(y, t) and returns the time derivative.
template <class State, class F>
State ode_step_rk4(const F& f, const State& y, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ode_step_rk4: dt must be positive");
    State k1 = f(y, t);
    if (!all_finite(k1)) throw NonFiniteDerivative("rk4: stage 1 not finite");
    State k2 = f(y + (0.5 * dt) * k1, t + 0.5 * dt);
    if (!all_finite(k2)) throw NonFiniteDerivative("rk4: stage 2 not finite");
    State k3 = f(y + (0.5 * dt) * k2, t + 0.5 * dt);
    if (!all_finite(k3)) throw NonFiniteDerivative("rk4: stage 3 not finite");
    State k4 = f(y + dt * k3, t + dt);
    if (!all_finite(k4)) throw NonFiniteDerivative("rk4: stage 4 not finite");
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace qgpe

#endif
