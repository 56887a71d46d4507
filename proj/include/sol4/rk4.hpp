#pragma once

#include <string>
#include <utility>

#include "sol4/errors.hpp"

namespace sol4 {

/// One classical fourth-order Runge-Kutta step for an autonomous system y' = f(y).
template <class State, class Rhs>
State rk4_step(const State& y, double h, Rhs&& f) {
  const State k1 = f(y);
  const State k2 = f(State(y + (0.5 * h) * k1));
  const State k3 = f(State(y + (0.5 * h) * k2));
  const State k4 = f(State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/**
 * Fixed-step RK4 over an interval of the given length. `observe(i, y)` is called
 * for the initial state (i = 0) and after every step. Throws IntegrationFailure
 * on a non-finite state.
 */
template <class State, class Rhs, class Observer>
State rk4_integrate(State y, double length, int steps, Rhs&& f, Observer&& observe) {
  if (steps < 1) throw ContractViolation("rk4_integrate: steps must be >= 1");
  const double h = length / steps;
  observe(0, y);
  for (int i = 1; i <= steps; ++i) {
    y = rk4_step(y, h, f);
    if (!y.allFinite()) {
      throw IntegrationFailure("rk4_integrate: non-finite state at step " + std::to_string(i));
    }
    observe(i, y);
  }
  return y;
}

template <class State, class Rhs>
State rk4_integrate(State y, double length, int steps, Rhs&& f) {
  return rk4_integrate(std::move(y), length, steps, std::forward<Rhs>(f), [](int, const State&) {});
}

}  // namespace sol4
