// integrate.hpp — embedded Cash-Karp 4(5) stepper with PI-free step control;
// drives both density-matrix propagation and the trajectory unraveling

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "vibronic/core.hpp"

namespace vibronic {

struct StepControl {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    double dt_min = 1e-12;   // below this the driver reports step-size underflow
    double safety = 0.9;
    double max_grow = 5.0;
    double max_shrink = 0.2;
};

// Single Cash-Karp step of y' = f(y) over dt.  Returns the 5th-order estimate
// and the scaled embedded-error norm (<= 1 means acceptable).
template <class Rhs>
double cash_karp_step(const Rhs& f, const StateVector& y, double dt, const StepControl& ctrl,
                      StateVector& y_out) {
    const StateVector k1 = f(y);
    const StateVector k2 = f(StateVector(y + dt * (0.2 * k1)));
    const StateVector k3 = f(StateVector(y + dt * (3.0 / 40 * k1 + 9.0 / 40 * k2)));
    const StateVector k4 = f(StateVector(y + dt * (0.3 * k1 - 0.9 * k2 + 1.2 * k3)));
    const StateVector k5 =
        f(StateVector(y + dt * (-11.0 / 54 * k1 + 2.5 * k2 - 70.0 / 27 * k3 + 35.0 / 27 * k4)));
    const StateVector k6 = f(StateVector(
        y + dt * (1631.0 / 55296 * k1 + 175.0 / 512 * k2 + 575.0 / 13824 * k3 +
                  44275.0 / 110592 * k4 + 253.0 / 4096 * k5)));

    y_out = y + dt * (37.0 / 378 * k1 + 250.0 / 621 * k3 + 125.0 / 594 * k4 + 512.0 / 1771 * k6);
    const StateVector y4 = y + dt * (2825.0 / 27648 * k1 + 18575.0 / 48384 * k3 +
                                     13525.0 / 55296 * k4 + 277.0 / 14336 * k5 + 0.25 * k6);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale =
            ctrl.abs_tol + ctrl.rel_tol * std::max(std::abs(y(i)), std::abs(y_out(i)));
        err = std::max(err, std::abs(y_out(i) - y4(i)) / scale);
    }
    return err;
}

inline double next_step_size(double dt, double err, const StepControl& ctrl) {
    const double factor = (err > 0.0) ? ctrl.safety * std::pow(err, -0.2) : ctrl.max_grow;
    return dt * std::clamp(factor, ctrl.max_shrink, ctrl.max_grow);
}

// Advance y from t to t_target; dt carries the working step across calls.
template <class Rhs>
void advance(const Rhs& f, StateVector& y, double& t, double t_target, double& dt,
             const StepControl& ctrl) {
    StateVector y_try(y.size());
    while (t < t_target) {
        dt = std::min(dt, t_target - t);
        const double err = cash_karp_step(f, y, dt, ctrl, y_try);
        if (err <= 1.0) {
            y.swap(y_try);
            t += dt;
            dt = next_step_size(dt, err, ctrl);
        } else {
            dt = next_step_size(dt, err, ctrl);
            if (dt < ctrl.dt_min) {
                throw NumericalError("integrate: step-size underflow");
            }
        }
    }
}

}  // namespace vibronic
