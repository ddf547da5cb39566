#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gpelab/errors.hpp"
#include "gpelab/grid.hpp"

namespace gpelab {

/// Symmetric tridiagonal discretization of a radial Schroedinger operator
/// (Dirichlet ends, Liouville form).  `weight` is an optional positive
/// diagonal mass: eigenvalue queries then refer to the pencil A x = lambda W x,
/// which is what a log-radius discretization produces.  An empty weight means
/// the identity.
struct TridiagonalOperator {
    std::vector<double> diag;
    std::vector<double> offdiag;  // length diag.size() - 1
    std::vector<double> weight;   // empty, or same length as diag (all > 0)
    RadialGrid grid;              // nodes carrying the operator, if any

    TridiagonalOperator() = default;
    TridiagonalOperator(std::vector<double> d, std::vector<double> e)
        : diag(std::move(d)), offdiag(std::move(e)) {
        check_shapes();
    }
    TridiagonalOperator(std::vector<double> d, std::vector<double> e, std::vector<double> w,
                        RadialGrid g)
        : diag(std::move(d)), offdiag(std::move(e)), weight(std::move(w)), grid(std::move(g)) {
        check_shapes();
    }

    std::size_t size() const { return diag.size(); }
    double mass(std::size_t i) const { return weight.empty() ? 1.0 : weight[i]; }

private:
    void check_shapes() const {
        if (diag.empty()) throw DomainError("TridiagonalOperator: empty diagonal");
        if (offdiag.size() + 1 != diag.size())
            throw DomainError("TridiagonalOperator: offdiag must have length n-1");
        if (!weight.empty()) {
            if (weight.size() != diag.size())
                throw DomainError("TridiagonalOperator: weight/diag size mismatch");
            for (double w : weight)
                if (!(w > 0.0)) throw DomainError("TridiagonalOperator: weight must be positive");
        }
    }
};

/// Solves a general tridiagonal system by banded LU with partial pivoting.
/// `lower[i]` couples row i+1 to column i, `upper[i]` row i to column i+1.
inline std::vector<double> solve_tridiagonal_general(std::vector<double> lower,
                                                     std::vector<double> diag,
                                                     std::vector<double> upper,
                                                     std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
        throw DomainError("solve_tridiagonal: inconsistent sizes");

    // Partial pivoting introduces one extra superdiagonal.
    std::vector<double> super2(n > 2 ? n - 2 : 0, 0.0);
    double scale = 0.0;
    for (double v : diag) scale = std::max(scale, std::abs(v));
    for (double v : lower) scale = std::max(scale, std::abs(v));
    for (double v : upper) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw SingularMatrixError("solve_tridiagonal: zero matrix");

    for (std::size_t k = 0; k + 1 < n; ++k) {
        double piv = diag[k];
        bool swapped = false;
        if (std::abs(lower[k]) > std::abs(piv)) {
            std::swap(diag[k], lower[k]);
            std::swap(upper[k], diag[k + 1]);
            if (k + 2 < n) std::swap(super2[k], upper[k + 1]);
            std::swap(rhs[k], rhs[k + 1]);
            piv = diag[k];
            swapped = true;
        }
        (void)swapped;
        if (std::abs(piv) < 1e-300 * scale)
            throw SingularMatrixError("solve_tridiagonal: pivot breakdown");
        const double m = lower[k] / piv;
        diag[k + 1] -= m * upper[k];
        if (k + 2 < n) upper[k + 1] -= m * super2[k];
        rhs[k + 1] -= m * rhs[k];
    }
    if (std::abs(diag[n - 1]) < 1e-300 * scale)
        throw SingularMatrixError("solve_tridiagonal: singular trailing pivot");

    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    if (n >= 2) {
        const std::size_t k = n - 2;
        x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
    }
    for (std::size_t ip = n; ip-- > 2;) {
        const std::size_t k = ip - 2;
        double r = rhs[k] - upper[k] * x[k + 1];
        if (k + 2 < n) r -= super2[k] * x[k + 2];
        x[k] = r / diag[k];
    }
    return x;
}

/// Solves (T - shift W) x = rhs for a symmetric operator, W the mass diagonal.
/// Post: residual ||T x - rhs||_inf <= 1e-10 ||rhs||_inf.
inline std::vector<double> solve_tridiagonal(const TridiagonalOperator& T,
                                             const std::vector<double>& rhs,
                                             double shift = 0.0) {
    const std::size_t n = T.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = T.diag[i] - shift * T.mass(i);
    std::vector<double> x =
        solve_tridiagonal_general(T.offdiag, d, T.offdiag, rhs);

    double rnorm = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ax = d[i] * x[i];
        if (i > 0) ax += T.offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) ax += T.offdiag[i] * x[i + 1];
        rnorm = std::max(rnorm, std::abs(ax - rhs[i]));
        bnorm = std::max(bnorm, std::abs(rhs[i]));
    }
    if (bnorm > 0.0 && rnorm > 1e-10 * bnorm)
        throw SingularMatrixError("solve_tridiagonal: residual above 1e-10 * ||rhs||");
    return x;
}

struct EigCount {
    std::size_t count = 0;
    bool pivot_perturbed = false;  // a breakdown pivot was nudged by relative 1e-14
};

/// Exact count of pencil eigenvalues of (T, W) strictly below lambda, by the
/// sign count of the LDL^T factorization of T - lambda W (Sylvester inertia).
inline EigCount count_eigs_below_checked(const TridiagonalOperator& T, double lambda) {
    EigCount out;
    const std::size_t n = T.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, std::abs(T.diag[i] - lambda * T.mass(i)));
    for (double e : T.offdiag) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) scale = 1.0;

    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = T.diag[i] - lambda * T.mass(i);
        if (i > 0) v -= T.offdiag[i - 1] * T.offdiag[i - 1] / q;
        if (std::abs(v) < 1e-14 * scale) {
            // Nudge a breakdown pivot upward: an eigenvalue sitting exactly at
            // lambda must not enter the strictly-below count.
            v = 1e-14 * scale;
            out.pivot_perturbed = true;
        }
        if (v < 0.0) ++out.count;
        q = v;
    }
    return out;
}

inline std::size_t count_eigs_below(const TridiagonalOperator& T, double lambda) {
    return count_eigs_below_checked(T, lambda).count;
}

/// Interval certain to contain every pencil eigenvalue (Gershgorin on W^{-1/2} T W^{-1/2}).
inline std::pair<double, double> eig_bounds(const TridiagonalOperator& T) {
    const std::size_t n = T.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = T.mass(i);
        double radius = 0.0;
        if (i > 0) radius += std::abs(T.offdiag[i - 1]) / std::sqrt(wi * T.mass(i - 1));
        if (i + 1 < n) radius += std::abs(T.offdiag[i]) / std::sqrt(wi * T.mass(i + 1));
        lo = std::min(lo, T.diag[i] / wi - radius);
        hi = std::max(hi, T.diag[i] / wi + radius);
    }
    return {lo, hi};
}

/// k-th smallest pencil eigenvalue (k = 1, 2, ...) by bisection on the Sturm
/// count, resolved to `tol_abs`.
inline double eigenvalue_by_count(const TridiagonalOperator& T, std::size_t k,
                                  double tol_abs = 1e-8) {
    if (k == 0 || k > T.size()) throw DomainError("eigenvalue_by_count: bad index");
    auto [lo, hi] = eig_bounds(T);
    lo -= 1.0;
    hi += 1.0;
    while (hi - lo > tol_abs) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (count_eigs_below(T, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gpelab
