#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "gpelab/errors.hpp"

namespace gpelab {

/// Second-order scalar ODE state (u, u').
using OdeState = std::array<double, 2>;

/// Right-hand side of u'' = f(r, u, u'), supplied as y' = F(r, y).
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

struct StepControl {
    double rel_tol = 1e-12;
    double abs_floor = 1e-300;   // protects the error weight when u passes through 0
    double cross_weight = 0.02;  // couples (u, u') scales so zeros of one do not stall steps
    double initial_step = 1e-4;
    double max_step = 0.05;
    double min_step = 1e-18;
};

/// One Dormand-Prince 5(4) step with embedded error estimate.
/// Returns the 5th-order solution and fills `err` with the 4-5 difference.
inline OdeState dopri5_step(const OdeRhs& f, double r, const OdeState& y, double h,
                            OdeState& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const OdeState k1 = f(r, y);
    OdeState t;
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * a21 * k1[i];
    const OdeState k2 = f(r + c2 * h, t);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const OdeState k3 = f(r + c3 * h, t);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const OdeState k4 = f(r + c4 * h, t);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const OdeState k5 = f(r + c5 * h, t);
    for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const OdeState k6 = f(r + h, t);

    OdeState y5;
    for (int i = 0; i < 2; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const OdeState k7 = f(r + h, y5);
    for (int i = 0; i < 2; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
    return y5;
}

/// Integrates y from r0 to r1 (either direction), adaptively, and invokes
/// `on_node(r, y)` exactly at every requested node passed in `nodes`
/// (which must be monotone in the direction of integration and inside [r0, r1]).
/// `watch(r, y)` is polled after every accepted step; returning true stops the
/// integration early.  Throws StiffnessError on step underflow.
inline void integrate_adaptive(const OdeRhs& f, double r0, double r1, OdeState y,
                               const std::vector<double>& nodes,
                               const std::function<void(double, const OdeState&)>& on_node,
                               const std::function<bool(double, const OdeState&)>& watch,
                               const StepControl& ctrl = {}) {
    const double dir = (r1 > r0) ? 1.0 : -1.0;
    const double end_tol = 1e-14 * std::max({std::abs(r0), std::abs(r1), 1e-30});
    double r = r0;
    double h_nat = std::min(ctrl.initial_step, ctrl.max_step);  // unclamped step magnitude
    std::size_t next_node = 0;

    // Emit any node coinciding with the start point.
    while (next_node < nodes.size() && dir * (nodes[next_node] - r) <= end_tol) {
        if (on_node) on_node(nodes[next_node], y);
        ++next_node;
    }

    OdeState err{};
    while (dir * (r1 - r) > end_tol) {
        double target = r1;
        if (next_node < nodes.size() && dir * (nodes[next_node] - target) < 0.0)
            target = nodes[next_node];
        const double dist = dir * (target - r);
        if (dist <= end_tol) {  // node effectively reached by roundoff
            if (next_node < nodes.size() &&
                std::abs(nodes[next_node] - target) <= end_tol) {
                if (on_node) on_node(nodes[next_node], y);
                ++next_node;
            }
            if (target == r1) break;
            continue;
        }
        const double h = dir * std::min(h_nat, dist);

        OdeState ynew = dopri5_step(f, r, y, h, err);
        const double m0 = std::max(std::abs(y[0]), std::abs(ynew[0]));
        const double m1 = std::max(std::abs(y[1]), std::abs(ynew[1]));
        const double w0 = ctrl.abs_floor + ctrl.rel_tol * (m0 + ctrl.cross_weight * m1);
        const double w1 = ctrl.abs_floor + ctrl.rel_tol * (m1 + ctrl.cross_weight * m0);
        double scale = std::max(std::abs(err[0]) / w0, std::abs(err[1]) / w1);
        if (!std::isfinite(scale) || !std::isfinite(ynew[0]) || !std::isfinite(ynew[1]))
            scale = 1e10;  // overflowed trial step: force a hard rejection
        if (scale <= 1.0) {
            r += h;
            y = ynew;
            const bool at_node =
                next_node < nodes.size() && dir * (nodes[next_node] - r) <= end_tol;
            if (at_node) {
                if (on_node) on_node(nodes[next_node], y);
                ++next_node;
            }
            if (watch && watch(r, y)) return;
        }
        const double grow = (scale > 0.0) ? 0.9 * std::pow(scale, -0.2) : 5.0;
        h_nat = std::abs(h) * std::clamp(grow, 0.2, 5.0);
        if (h_nat > ctrl.max_step) h_nat = ctrl.max_step;
        if (h_nat < ctrl.min_step)
            throw StiffnessError("integrate_adaptive: step underflow", r);
    }
}

}  // namespace gpelab
