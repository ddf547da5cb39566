#include "doctest.h"

#include <cmath>
#include <map>

#include "gpelab/bubble.hpp"
#include "gpelab/green.hpp"
#include "gpelab/quadrature.hpp"

using namespace gpelab;

namespace {

GreenData& cached_green(int d) {
    static std::map<int, GreenData> cache;
    auto it = cache.find(d);
    if (it == cache.end()) {
        const auto grid = RadialGrid::log_spaced(d, 1e-4, 9.0, 4096);
        it = cache.emplace(d, solve_green(d, grid)).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("omega_star per dimension") {
    CHECK(omega_star(3) == 1.0);
    CHECK(omega_star(4) == 0.0);
    CHECK(omega_star(6) == 0.0);
    CHECK_THROWS_AS(omega_star(2), DomainError);
}

TEST_CASE("solve_green d=3: vanishing regular part at the origin, slope 1/2") {
    const auto& gd = cached_green(3);
    REQUIRE(gd.H_at_zero.has_value());
    CHECK(std::abs(*gd.H_at_zero) <= 1e-5);
    CHECK(gd.near_origin_c1 == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("solve_green d=4,5: positive regular part, maximal at the origin") {
    for (int d : {4, 5}) {
        const auto& gd = cached_green(d);
        REQUIRE(gd.H_at_zero.has_value());
        CHECK(*gd.H_at_zero > 0.0);
        const double hmax = *std::max_element(gd.H.values.begin(), gd.H.values.end());
        CHECK(hmax <= *gd.H_at_zero * (1.0 + 1e-6));
    }
}

TEST_CASE("solve_green d=6: logarithmic structure with coefficient -1/4") {
    const auto& gd = cached_green(6);
    REQUIRE(gd.log_coeff_d6.has_value());
    CHECK(*gd.log_coeff_d6 == doctest::Approx(-0.25).epsilon(0.04));
    CHECK(std::abs(*gd.log_coeff_d6 + 0.25) <= 0.01);
    // H + (1/4) log r stays bounded toward the origin.
    for (std::size_t i = 0; i < gd.H.size(); ++i) {
        const double r = gd.H.grid[i];
        if (r > 0.5) break;
        CHECK(std::abs(gd.H.values[i] + 0.25 * std::log(r)) < 10.0);
    }
}

TEST_CASE("G is positive with Gaussian-type decay") {
    for (int d = 3; d <= 6; ++d) {
        const auto& gd = cached_green(d);
        for (double v : gd.G.values) CHECK(v > 0.0);
        CHECK(gd.decay_sigma > 0.0);
        CHECK(gd.decay_sigma == doctest::Approx(0.5).epsilon(0.25));
        // Singular normalization r^{d-2} G -> 1 at the innermost node.
        CHECK(gd.G.values[0] * std::pow(gd.G.grid[0], d - 2.0) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("green_L2_norm_sq is finite, positive, and truncation-robust") {
    const auto& gd = cached_green(3);
    const double base = green_L2_norm_sq(gd);
    CHECK(base > 0.0);
    CHECK(std::isfinite(base));

    const auto wide = solve_green(3, RadialGrid::log_spaced(3, 1e-4, 18.0, 8192));
    CHECK(std::abs(green_L2_norm_sq(wide) - base) <= 1e-8 * base);
    const auto deep = solve_green(3, RadialGrid::log_spaced(3, 5e-5, 9.0, 4096));
    CHECK(std::abs(green_L2_norm_sq(deep) - base) <= 1e-6 * base);

    CHECK_THROWS_AS(green_L2_norm_sq(cached_green(4)), DomainError);
}

TEST_CASE("solve_green rejects unsupported input") {
    CHECK_THROWS_AS(solve_green(7, RadialGrid::log_spaced(7, 1e-4, 9.0, 256)), DomainError);
    CHECK_THROWS_AS(solve_green(4, RadialGrid::log_spaced(4, 1e-3, 9.0, 256)), DomainError);
    CHECK_THROWS_AS(solve_green(4, RadialGrid::log_spaced(3, 1e-4, 9.0, 256)), DomainError);
}

TEST_CASE("H satisfies its defining equation (interior FD residual)") {
    for (int d : {3, 4, 5, 6}) {
        const auto grid = RadialGrid::log_spaced(d, 1e-4, 9.0, 8192);
        const auto gd = solve_green(d, grid);
        const double om = gd.omega;
        const double dt = std::log(grid[1] / grid[0]);
        const auto& h = gd.H.values;
        double worst = 0.0;
        for (std::size_t i = 2; i + 2 < grid.size(); ++i) {
            const double r = grid[i];
            // Window where neither the r^{2-d} cancellation roundoff at small r
            // nor the dt^4 r^8 stencil truncation at large r floors the check.
            if (r < 0.12) continue;
            if (std::pow(dt, 4) * std::pow(r, 8) / 30.0 > 1e-8) break;
            const double d1 =
                (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dt);
            const double d2 = (-h[i + 2] + 16.0 * h[i + 1] - 30.0 * h[i] +
                               16.0 * h[i - 1] - h[i - 2]) /
                              (12.0 * dt * dt);
            const double lap = (d2 + (d - 2.0) * d1) / (r * r);
            const double rhs = (r * r - om) * std::pow(r, 2.0 - d);
            const double resid = -lap + (r * r - om) * h[i] - rhs;
            const double scale = std::abs(lap) + std::abs((r * r - om) * h[i]) +
                                 std::abs(rhs) + 1e-300;
            worst = std::max(worst, std::abs(resid) / scale);
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("projected bubble: squeezed between zero and the free bubble (d=4)") {
    const int d = 4;
    const double eps = 0.1;
    const auto grid = RadialGrid::log_spaced(d, 1e-4, 10.0, 8192);
    const auto pu = projected_bubble(d, eps, grid);
    const double peak = *std::max_element(pu.values.begin(), pu.values.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(pu.values[i]) > 1e-11 * peak) CHECK(pu.values[i] > 0.0);
        CHECK(pu.values[i] < bubble_eval(d, eps, grid[i]));
    }
}

TEST_CASE("projected bubble far field is controlled by Green part plus source tail") {
    // Outside the core, PU ~ eps^{(d-2)/2} amp G(r) plus the particular tail
    // eps^{(d+2)/2} r^{-(4+d)} driven by the source; the bare algebraic tail
    // only dominates past the Gaussian crossover, far below double-precision
    // FD resolution, so the measurable bound is the two-part envelope.
    const int d = 4;
    const auto& gd = cached_green(d);
    for (double eps : {0.1, 0.05}) {
        const auto pu = projected_bubble(d, eps, gd.G.grid);
        for (std::size_t i = 0; i < pu.size(); ++i) {
            const double r = pu.grid[i];
            if (r < 1.0 || r > 3.0) continue;
            const double envelope =
                std::pow(eps, 0.5 * (d - 2.0)) * bubble_amplitude(d) * gd.G.values[i] +
                std::pow(eps, 0.5 * (d + 2.0)) * std::pow(r, -(4.0 + d));
            CHECK(pu.values[i] > 0.0);
            CHECK(pu.values[i] <= 3.0 * envelope);
        }
    }
}

TEST_CASE("near-origin defect of the projected bubble reproduces H") {
    // U_eps - PU_eps ~ eps^{(d-2)/2} [d(d-2)]^{(d-2)/4} H(r) for r = O(1).
    const int d = 4;
    const double eps = 0.05;
    const auto grid = RadialGrid::log_spaced(d, 1e-4, 9.0, 8192);
    const auto pu = projected_bubble(d, eps, grid);
    const auto& gd = cached_green(d);
    const double amp = std::pow(eps, 0.5 * (d - 2.0)) * bubble_amplitude(d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        if (r < 0.5 || r > 2.0) continue;
        const double defect = bubble_eval(d, eps, r) - pu.values[i];
        // H on its own grid: same construction, interpolate by nearest node.
        const auto& hg = gd.H.grid;
        const auto it = std::lower_bound(hg.nodes.begin(), hg.nodes.end(), r);
        const double href = gd.H.values[static_cast<std::size_t>(it - hg.nodes.begin())];
        CHECK(std::abs(defect - amp * href) <= 0.10 * std::abs(amp * href));
    }
}

TEST_CASE("projected bubble converges to the free bubble in the gradient norm") {
    const int d = 5;
    const auto grid = RadialGrid::log_spaced(d, 1e-4, 10.0, 4096);
    double prev = 1e300;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto pu = projected_bubble(d, eps, grid);
        std::vector<double> g(grid.size(), 0.0);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double hm = grid[i] - grid[i - 1], hp = grid[i + 1] - grid[i];
            const double dpu = (-hp / (hm * (hm + hp))) * pu.values[i - 1] +
                               ((hp - hm) / (hm * hp)) * pu.values[i] +
                               (hm / (hp * (hm + hp))) * pu.values[i + 1];
            const double diff = bubble_deriv(d, eps, grid[i]) - dpu;
            g[i] = diff * diff;
        }
        const double grad_sq = radial_integral(grid, g);
        CHECK(grad_sq < prev);
        prev = grad_sq;
    }
}

TEST_CASE("projected_bubble rejects unsupported input") {
    const auto grid = RadialGrid::log_spaced(4, 1e-4, 10.0, 256);
    CHECK_THROWS_AS(projected_bubble(4, 0.7, grid), DomainError);
    CHECK_THROWS_AS(projected_bubble(7, 0.1, RadialGrid::log_spaced(7, 1e-4, 10.0, 256)),
                    DomainError);
}
