#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "gpelab/errors.hpp"
#include "gpelab/grid.hpp"
#include "gpelab/shooting.hpp"
#include "gpelab/special.hpp"
#include "gpelab/tridiag.hpp"

namespace gpelab {

/// Exact spectral data of the trapped inverse-square operator
/// -Lap + r^2 - 3(d-3)/r^2 on radial functions.
struct KummerSpec {
    int d = 0;
    std::optional<double> l_plus;   // real for d >= 13
    std::optional<double> l_minus;
    std::vector<double> sigma;      // sigma_n = d + 4n + 2 l_+, n = 0, 1, ... (d >= 13)
    std::optional<double> alpha_osc;  // sqrt(-d^2+16d-40)/2, oscillatory band 5 <= d <= 12
    double beta_osc = 0.0;            // (d-4)/2
};

inline KummerSpec kummer_spec(int d, std::size_t n_levels = 6) {
    if (d < 5) throw DomainError("kummer_spec: requires d >= 5");
    KummerSpec spec;
    spec.d = d;
    spec.beta_osc = 0.5 * (static_cast<double>(d) - 4.0);
    const double disc = static_cast<double>(d) * d - 16.0 * d + 40.0;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        spec.l_plus = 0.5 * (2.0 - d + root);
        spec.l_minus = 0.5 * (2.0 - d - root);
        for (std::size_t n = 0; n < n_levels; ++n)
            spec.sigma.push_back(d + 4.0 * static_cast<double>(n) + 2.0 * *spec.l_plus);
    } else {
        spec.alpha_osc = 0.5 * std::sqrt(-disc);
    }
    return spec;
}

/// Max relative residual of the closed-form eigenfunction
/// W(r) = r^{l_+} e^{-r^2/2} M(-n; l_+ + d/2; r^2) in the radial eigenvalue
/// equation, using analytic derivatives of the terminating series.
inline double eigenfunction_residual(int d, int n, const std::vector<double>& r_samples) {
    if (d < 13) throw DomainError("eigenfunction_residual: requires d >= 13");
    if (n < 0) throw DomainError("eigenfunction_residual: requires n >= 0");
    const KummerSpec spec = kummer_spec(d, static_cast<std::size_t>(n) + 1);
    const double l = *spec.l_plus;
    const double b = l + 0.5 * d;
    const double sigma = spec.sigma[static_cast<std::size_t>(n)];

    // Coefficients of the terminating series M(-n; b; x) = sum c_k x^k.
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1.0;
    for (int k = 0; k < n; ++k)
        c[k + 1] = c[k] * (static_cast<double>(-n + k)) /
                   ((b + k) * (static_cast<double>(k) + 1.0));
    const auto poly = [&c](double x, int der) {
        double s = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
            double f = c[k];
            double kk = static_cast<double>(k);
            if (der >= 1) f *= kk;
            if (der >= 2) f *= (kk - 1.0);
            if (f == 0.0) continue;
            s += f * std::pow(x, kk - der);
        }
        return s;
    };

    double worst = 0.0;
    for (double r : r_samples) {
        if (!(r > 0.0)) throw DomainError("eigenfunction_residual: samples must be positive");
        const double x = r * r;
        const double A = std::pow(r, l) * std::exp(-0.5 * x);
        const double lr = l / r - r;
        const double Ap = A * lr;
        const double App = A * (lr * lr - l / x - 1.0);
        const double P = poly(x, 0), P1 = poly(x, 1), P2 = poly(x, 2);
        const double W = A * P;
        const double Wp = Ap * P + A * 2.0 * r * P1;
        const double Wpp = App * P + 4.0 * r * Ap * P1 + A * (4.0 * x * P2 + 2.0 * P1);
        const double drift = (d - 1.0) / r * Wp;
        const double pot = x * W - 3.0 * (d - 3.0) / x * W;
        const double resid = -Wpp - drift + pot - sigma * W;
        const double scale = std::abs(Wpp) + std::abs(drift) + x * std::abs(W) +
                             3.0 * (d - 3.0) / x * std::abs(W) + std::abs(sigma * W) + 1e-300;
        worst = std::max(worst, std::abs(resid) / scale);
    }
    return worst;
}

namespace detail {

/// Symmetric pencil discretization of -Lap + W(r) on radial functions over a
/// log-uniform grid: with chi(t) = r^{1/2} psi(log r), psi = r^{(d-1)/2} u,
/// the eigenproblem becomes -chi'' + Q chi = lambda e^{2t} chi where
/// Q(t) = (d-2)^2/4 + r^2 W(r).  Dirichlet at both ends (Friedrichs choice).
inline TridiagonalOperator radial_pencil(int d, const RadialGrid& grid,
                                         const std::function<double(double)>& W) {
    const std::size_t n = grid.size();
    if (n < 8) throw DomainError("radial_pencil: grid too small");
    const double dt = std::log(grid[1] / grid[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs(std::log(grid[i + 1] / grid[i]) - dt) > 1e-10 * dt)
            throw DomainError("radial_pencil: grid must be log-uniform");

    const double corner = 0.25 * (static_cast<double>(d) - 2.0) * (d - 2.0);
    std::vector<double> diag(n - 2), off(n - 3), weight(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = grid[i];
        diag[i - 1] = 2.0 / (dt * dt) + corner + r * r * W(r);
        weight[i - 1] = r * r;
    }
    for (std::size_t i = 0; i + 3 < n; ++i) off[i] = -1.0 / (dt * dt);
    return TridiagonalOperator(std::move(diag), std::move(off), std::move(weight), grid);
}

}  // namespace detail

/// Reference operator -Lap + r^2 - 3(d-3)/r^2 whose spectrum is known in
/// closed form (kummer_spec); used as the exact oracle for the discretization.
inline TridiagonalOperator limiting_operator(int d, const RadialGrid& grid) {
    const double c = 3.0 * (static_cast<double>(d) - 3.0);
    return detail::radial_pencil(d, grid, [c](double r) { return r * r - c / (r * r); });
}

/// Discretization of the linearized operator around the singular profile:
/// -Lap + r^2 - omega_inf - 3 u_inf^2 (the omega shift is included by default).
/// Below the profile's start radius the certified two-term inner expansion
/// supplies u_inf, so refinement grids may descend past r0.
inline TridiagonalOperator build_linearized(const SingularSolution& sing,
                                            const RadialGrid& grid,
                                            bool include_omega_shift = true) {
    if (grid.d != sing.d) throw DomainError("build_linearized: dimension mismatch");
    const double shift = include_omega_shift ? sing.omega_inf : 0.0;
    return detail::radial_pencil(sing.d, grid, [&sing, shift](double r) {
        const double u = sing.value(r);
        return r * r - shift - 3.0 * u * u;
    });
}

struct RefinementPolicy {
    double r_min_start = 2e-3;
    double r_min_factor = 16.0;  // four r_min halvings per trace step
    int levels = 4;
    double dt = 0.008;           // log-radius mesh width
    double r_max = 0.0;          // 0: use sqrt(d) + 8
    double r_max_bump = 2.0;
};

struct TraceEntry {
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t n = 0;
    std::size_t count = 0;
};

enum class GapVerdict { nondegenerate, inconclusive };

struct SpectralReport {
    int d = 0;
    double omega_inf = 0.0;
    std::optional<std::size_t> morse_index;  // unset when unbounded
    bool unbounded = false;
    std::vector<double> tau;      // lowest eigenvalues of -Lap + r^2 - 3 u_inf^2 (no shift)
    double tau_err = 0.0;         // discretization error estimate for tau
    double omega_err = 0.0;       // uncertainty carried by omega_inf itself
    std::vector<TraceEntry> refinement_trace;
};

namespace detail {

inline RadialGrid level_grid(int d, double r_min, double r_max, double dt) {
    const std::size_t n =
        static_cast<std::size_t>(std::ceil(std::log(r_max / r_min) / dt)) + 1;
    return RadialGrid::log_spaced(d, r_min, r_max, std::max<std::size_t>(n, 64));
}

}  // namespace detail

/// Negative-eigenvalue count of the linearized operator with a refinement
/// trace: the count must either stabilize (finite index) or grow at every
/// r_min refinement (unbounded).  Counting below omega_inf on the unshifted
/// operator is the same as counting below zero on the shifted one.
inline SpectralReport morse_index(const SingularSolution& sing,
                                  const RefinementPolicy& policy = {}) {
    if (!sing.decay_certified) throw DomainError("morse_index: profile not certified");
    SpectralReport rep;
    rep.d = sing.d;
    rep.omega_inf = sing.omega_inf;
    rep.omega_err = sing.omega_r0_delta + 1e-9;
    const double r_max =
        policy.r_max > 0.0 ? policy.r_max : std::sqrt(static_cast<double>(sing.d)) + 8.0;

    std::vector<std::size_t> level_counts;
    double r_min = policy.r_min_start;
    for (int lev = 0; lev < policy.levels; ++lev) {
        const RadialGrid g = detail::level_grid(sing.d, r_min, r_max, policy.dt);
        const TridiagonalOperator T = build_linearized(sing, g, false);
        const std::size_t c = count_eigs_below(T, sing.omega_inf);
        rep.refinement_trace.push_back({r_min, r_max, g.size(), c});
        level_counts.push_back(c);
        if (lev + 1 < policy.levels) r_min /= policy.r_min_factor;
    }
    // Perturbation entries: r_max bump and mesh halving at the finest r_min.
    {
        const RadialGrid g =
            detail::level_grid(sing.d, r_min, r_max + policy.r_max_bump, policy.dt);
        const std::size_t c =
            count_eigs_below(build_linearized(sing, g, false), sing.omega_inf);
        rep.refinement_trace.push_back({r_min, r_max + policy.r_max_bump, g.size(), c});
        level_counts.push_back(c);
    }
    {
        const RadialGrid g = detail::level_grid(sing.d, r_min, r_max, 0.5 * policy.dt);
        const std::size_t c =
            count_eigs_below(build_linearized(sing, g, false), sing.omega_inf);
        rep.refinement_trace.push_back({r_min, r_max, g.size(), c});
        level_counts.push_back(c);
    }

    bool strictly_growing = true;
    for (int lev = 1; lev < policy.levels; ++lev)
        if (!(level_counts[lev] > level_counts[lev - 1])) strictly_growing = false;
    const std::size_t L = static_cast<std::size_t>(policy.levels);
    const bool stabilized = level_counts[L - 1] == level_counts[L - 2] &&
                            level_counts[L] == level_counts[L - 1] &&
                            level_counts[L + 1] == level_counts[L - 1];

    if (stabilized) {
        rep.morse_index = level_counts[L - 1];
        if (*rep.morse_index < 1)
            throw CertificationError("morse_index: count below 1 contradicts instability");
        // Lowest eigenvalues of the unshifted operator, with an error estimate
        // from mesh halving and from the last r_min refinement.
        const RadialGrid g1 = detail::level_grid(sing.d, r_min, r_max, policy.dt);
        const RadialGrid g2 = detail::level_grid(sing.d, r_min, r_max, 0.5 * policy.dt);
        const RadialGrid g0 =
            detail::level_grid(sing.d, r_min * policy.r_min_factor, r_max, policy.dt);
        const TridiagonalOperator t1 = build_linearized(sing, g1, false);
        const TridiagonalOperator t2 = build_linearized(sing, g2, false);
        const TridiagonalOperator t0 = build_linearized(sing, g0, false);
        for (std::size_t k = 1; k <= 2; ++k) {
            const double e1 = eigenvalue_by_count(t1, k);
            const double e2 = eigenvalue_by_count(t2, k);
            const double e0 = eigenvalue_by_count(t0, k);
            rep.tau.push_back(e2);
            rep.tau_err = std::max(rep.tau_err,
                                   std::abs(e2 - e1) / 3.0 + std::abs(e1 - e0) + 1e-8);
        }
        return rep;
    }
    if (strictly_growing) {
        rep.unbounded = true;
        return rep;
    }
    throw CertificationError(
        "morse_index: count neither stabilized nor strictly growing across the trace");
}

struct GapResult {
    double tau1 = 0.0;
    double tau2 = 0.0;
    GapVerdict verdict = GapVerdict::inconclusive;
    double margin = 0.0;
    double error_estimate = 0.0;
};

/// Nondegeneracy check tau_1 < omega_inf < tau_2 with a certified margin of
/// at least ten times the eigenvalue error estimate.
inline GapResult nondegeneracy_gap(const SpectralReport& rep) {
    if (rep.d < 13) throw DomainError("nondegeneracy_gap: requires d >= 13");
    if (rep.tau.size() < 2) throw DomainError("nondegeneracy_gap: tau not populated");
    GapResult out;
    out.tau1 = rep.tau[0];
    out.tau2 = rep.tau[1];
    out.error_estimate = rep.tau_err + rep.omega_err;
    out.margin = std::min(rep.omega_inf - out.tau1, out.tau2 - rep.omega_inf);
    if (out.tau1 < rep.omega_inf && rep.omega_inf < out.tau2 &&
        out.margin >= 10.0 * out.error_estimate)
        out.verdict = GapVerdict::nondegenerate;
    return out;
}

}  // namespace gpelab
