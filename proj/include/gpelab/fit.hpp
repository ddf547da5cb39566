#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gpelab/errors.hpp"

namespace gpelab {

/// Least-squares fit of y ~ sum_j c_j phi_j(x) by normal equations.
/// Intended for tiny bases (k <= 4) on well-separated abscissae.
inline std::vector<double> fit_least_squares(
    const std::vector<double>& xs, const std::vector<double>& ys,
    const std::vector<std::function<double(double)>>& basis) {
    const std::size_t m = xs.size();
    const std::size_t k = basis.size();
    if (ys.size() != m || m < k) throw DomainError("fit_least_squares: underdetermined");

    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t s = 0; s < m; ++s) {
        std::vector<double> phi(k);
        for (std::size_t j = 0; j < k; ++j) phi[j] = basis[j](xs[s]);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) a[i][j] += phi[i] * phi[j];
            a[i][k] += phi[i] * ys[s];
        }
    }
    // Gaussian elimination with partial pivoting on the (k)x(k+1) tableau.
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0.0) throw SingularMatrixError("fit_least_squares: singular basis");
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> coef(k);
    for (std::size_t i = 0; i < k; ++i) coef[i] = a[i][k] / a[i][i];
    return coef;
}

/// Convenience straight-line fit y ~ c0 + c1 x; returns {c0, c1}.
inline std::pair<double, double> fit_line(const std::vector<double>& xs,
                                          const std::vector<double>& ys) {
    auto c = fit_least_squares(xs, ys,
                               {[](double) { return 1.0; }, [](double x) { return x; }});
    return {c[0], c[1]};
}

}  // namespace gpelab
