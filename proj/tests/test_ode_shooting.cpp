#include "doctest.h"

#include <cmath>

#include "gpelab/ode.hpp"
#include "gpelab/quadrature.hpp"
#include "gpelab/shooting.hpp"

using namespace gpelab;

TEST_CASE("linear mode with omega = d reproduces the Gaussian ground mode") {
    // e^{-r^2/2} is the exact first eigenfunction of the trap.
    for (int d : {3, 5}) {
        ProblemParams pp{d, critical_exponent(d), static_cast<double>(d)};
        IvpOptions opt;
        opt.include_nonlinearity = false;
        const auto grid = RadialGrid::log_spaced(d, 1e-6, 6.0, 512);
        const auto res = integrate_ivp(pp, 1.0, grid, opt);
        REQUIRE(res.event == IvpEvent::reached_r_max);
        double worst = 0.0;
        for (std::size_t i = 0; i < res.r.size(); ++i)
            worst = std::max(worst,
                             std::abs(res.u[i] - std::exp(-0.5 * res.r[i] * res.r[i])));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("event type separates small and large amplitudes (critical, d = 5)") {
    ProblemParams pp{5, critical_exponent(5), 2.0};
    const auto grid = RadialGrid::log_spaced(5, 1e-6, std::sqrt(2.0) + 10.0, 64);
    // Small b: the trap dominates and the profile diverges upward (blow_up
    // event past 10 b); large b: the focusing term forces a sign change.
    const auto small_b = integrate_ivp(pp, 0.05, grid);
    const auto large_b = integrate_ivp(pp, 1e4, grid);
    CHECK(small_b.event == IvpEvent::blow_up);
    CHECK(large_b.event == IvpEvent::sign_change);

    // Monotone separation over a geometric scan: once events switch to
    // sign_change they stay there.
    bool seen_fall = false;
    for (double b = 0.05; b <= 1e6; b *= 4.0) {
        const auto ev = integrate_ivp(pp, b, grid).event;
        if (ev == IvpEvent::sign_change) seen_fall = true;
        if (seen_fall) CHECK(ev == IvpEvent::sign_change);
    }
    CHECK(seen_fall);
}

TEST_CASE("computed profiles satisfy the equation to 1e-7") {
    const auto sol = find_ground_state(5, 2.0);
    CHECK(sol.decay_certified);
    CHECK(sol.ode_residual <= 1e-7);
    CHECK(sol.b > 0.0);
    // Positive and strictly decreasing.
    for (std::size_t i = 1; i < sol.profile.size(); ++i) {
        CHECK(sol.profile.values[i] > 0.0);
        CHECK(sol.profile.values[i] <= sol.profile.values[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("step underflow is reported as stiffness with a location") {
    // Forced blow-up of the right-hand side at r = 1 with a floor on the step.
    const OdeRhs rhs = [](double r, const OdeState& y) -> OdeState {
        const double s = 1.0 - r;
        return {y[1], y[0] / (s * s * s * s)};
    };
    StepControl ctrl;
    ctrl.min_step = 1e-10;
    CHECK_THROWS_AS(
        integrate_adaptive(rhs, 0.1, 1.0, {1.0, 0.0}, {}, nullptr, nullptr, ctrl),
        StiffnessError);
}

TEST_CASE("nonexistence ranges never bracket") {
    CHECK_THROWS_AS(find_ground_state(5, 5.5), NoSolutionError);   // omega >= d
    CHECK_THROWS_AS(find_ground_state(3, 0.5), NoSolutionError);   // omega <= 1, d = 3
    CHECK_THROWS_AS(find_ground_state(5, -1.0), NoSolutionError);  // omega <= 0

    try {
        find_ground_state(5, 5.5);
    } catch (const NoSolutionError& e) {
        CHECK(e.reason == NoSolutionReason::omega_at_or_above_first_eigenvalue);
    }
    try {
        find_ground_state(3, 0.5);
    } catch (const NoSolutionError& e) {
        CHECK(e.reason == NoSolutionReason::omega_below_threshold_d3);
    }
    try {
        find_ground_state(5, -1.0);
    } catch (const NoSolutionError& e) {
        CHECK(e.reason == NoSolutionReason::omega_nonpositive);
    }
}

TEST_CASE("amplitude decreases toward the linear bifurcation point omega -> d") {
    const int d = 5;
    const double b1 = find_ground_state(d, 4.0).b;
    const double b2 = find_ground_state(d, 4.5).b;
    const double b3 = find_ground_state(d, 4.8).b;
    CHECK(b2 < b1);
    CHECK(b3 < b2);
}

TEST_CASE("Pohozaev-consistent energy bookkeeping on a certified profile") {
    const auto sol = find_ground_state(4, 1.0);
    const auto& g = sol.profile.grid;
    std::vector<double> xsq(g.size()), l2(g.size()), crit(g.size());
    const double q = critical_exponent(4);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = sol.profile.values[i], v = sol.deriv[i], r = g[i];
        xsq[i] = v * v + r * r * u * u;
        l2[i] = u * u;
        crit[i] = std::pow(u, q);
    }
    const double lhs = radial_integral(g, xsq) - sol.params.omega * radial_integral(g, l2);
    const double rhs = radial_integral(g, crit);
    CHECK(std::abs(lhs - rhs) <= 1e-5 * std::abs(rhs));
}
