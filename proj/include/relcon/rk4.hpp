#pragma once

#include "relcon/linalg.hpp"

namespace relcon {

// One classical fourth-order Runge-Kutta step of x' = f(x) for an autonomous
// vector field. f is evaluated four times, so any feedback inside f is
// recomputed at every stage.
template <typename Field>
void rk4_step(Vector& x, double h, Field&& f) {
    const Vector k1 = f(x);
    const Vector k2 = f(Vector(x + 0.5 * h * k1));
    const Vector k3 = f(Vector(x + 0.5 * h * k2));
    const Vector k4 = f(Vector(x + h * k3));
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Number of uniform steps of size h covering [0, horizon].
inline long step_count(double horizon, double h) {
    return static_cast<long>(std::llround(horizon / h));
}

}  // namespace relcon
