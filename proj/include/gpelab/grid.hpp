#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gpelab/errors.hpp"

namespace gpelab {

/// Strictly increasing radial grid on [r_min, r_max] with the ambient
/// dimension attached.  Nodes are log-uniform by default, which resolves
/// both the r -> 0 region of singular profiles and the Gaussian tail.
struct RadialGrid {
    int d = 3;
    std::vector<double> nodes;

    RadialGrid() = default;
    RadialGrid(int dim, std::vector<double> pts) : d(dim), nodes(std::move(pts)) {
        validate();
    }

    /// Log-uniform nodes: r_i = r_min * (r_max/r_min)^{i/(n-1)}.
    static RadialGrid log_spaced(int dim, double r_min, double r_max, std::size_t n) {
        if (dim < 3) throw DomainError("RadialGrid: dimension must be >= 3");
        if (!(r_min > 0.0) || !(r_max > r_min))
            throw DomainError("RadialGrid: need 0 < r_min < r_max");
        if (n < 2) throw DomainError("RadialGrid: need at least 2 nodes");
        std::vector<double> pts(n);
        const double ratio = std::log(r_max / r_min);
        for (std::size_t i = 0; i < n; ++i)
            pts[i] = r_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
        pts.front() = r_min;
        pts.back() = r_max;
        return RadialGrid(dim, std::move(pts));
    }

    /// Uniform nodes, occasionally useful for smooth bounded profiles.
    static RadialGrid uniform(int dim, double r_min, double r_max, std::size_t n) {
        if (dim < 3) throw DomainError("RadialGrid: dimension must be >= 3");
        if (!(r_min > 0.0) || !(r_max > r_min))
            throw DomainError("RadialGrid: need 0 < r_min < r_max");
        if (n < 2) throw DomainError("RadialGrid: need at least 2 nodes");
        std::vector<double> pts(n);
        const double h = (r_max - r_min) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) pts[i] = r_min + h * static_cast<double>(i);
        pts.back() = r_max;
        return RadialGrid(dim, std::move(pts));
    }

    std::size_t size() const { return nodes.size(); }
    double r_min() const { return nodes.front(); }
    double r_max() const { return nodes.back(); }
    double operator[](std::size_t i) const { return nodes[i]; }

private:
    void validate() const {
        if (d < 3) throw DomainError("RadialGrid: dimension must be >= 3");
        if (nodes.size() < 2) throw DomainError("RadialGrid: need at least 2 nodes");
        if (!(nodes.front() > 0.0)) throw DomainError("RadialGrid: nodes must be positive");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw DomainError("RadialGrid: nodes must be strictly increasing");
    }
};

/// A radial function sampled on a grid.  Values must be finite at all nodes.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values;
    std::string label;

    RadialProfile() = default;
    RadialProfile(RadialGrid g, std::vector<double> v, std::string name = {})
        : grid(std::move(g)), values(std::move(v)), label(std::move(name)) {
        if (values.size() != grid.size())
            throw DomainError("RadialProfile: values/grid size mismatch");
        for (double x : values)
            if (!std::isfinite(x)) throw DomainError("RadialProfile: non-finite sample");
    }

    std::size_t size() const { return values.size(); }
};

}  // namespace gpelab
