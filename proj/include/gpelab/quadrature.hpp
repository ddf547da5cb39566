#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gpelab/grid.hpp"
#include "gpelab/special.hpp"

namespace gpelab {

namespace detail {

inline bool is_log_uniform(const RadialGrid& grid, double& dt) {
    dt = std::log(grid[1] / grid[0]);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (std::abs(std::log(grid[i + 1] / grid[i]) - dt) > 1e-10 * dt) return false;
    return true;
}

}  // namespace detail

/// Composite trapezoid of samples g(r_i) over the grid (no sphere factor).
/// On a log-uniform grid the rule is applied in t = log r, the grid's natural
/// coordinate, where the trapezoid sum of the transformed integrand converges
/// spectrally for integrands smooth and decaying in t; otherwise plain r-space
/// trapezoid.
inline double trapezoid(const RadialGrid& grid, const std::vector<double>& g) {
    if (g.size() != grid.size()) throw DomainError("trapezoid: size mismatch");
    double dt = 0.0;
    if (grid.size() >= 3 && detail::is_log_uniform(grid, dt)) {
        double sum = 0.5 * (g.front() * grid[0] + g.back() * grid[grid.size() - 1]);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) sum += g[i] * grid[i];
        return dt * sum;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        sum += 0.5 * (grid[i + 1] - grid[i]) * (g[i] + g[i + 1]);
    return sum;
}

/// |S^{d-1}| int g(r) r^{d-1} dr over the grid, trapezoid rule.
inline double radial_integral(const RadialGrid& grid, const std::vector<double>& g) {
    if (g.size() != grid.size()) throw DomainError("radial_integral: size mismatch");
    std::vector<double> h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        h[i] = g[i] * std::pow(grid[i], grid.d - 1);
    return sphere_measure(grid.d) * trapezoid(grid, h);
}

/// L^q mass of a profile: |S^{d-1}| int |f|^q r^{d-1} dr.
inline double quad_radial(const RadialProfile& f, double q) {
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = std::pow(std::abs(f.values[i]), q);
    return radial_integral(f.grid, g);
}

}  // namespace gpelab
