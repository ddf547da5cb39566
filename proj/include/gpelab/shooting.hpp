#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpelab/errors.hpp"
#include "gpelab/grid.hpp"
#include "gpelab/ode.hpp"

namespace gpelab {

inline double critical_exponent(int d) { return 2.0 * d / (static_cast<double>(d) - 2.0); }

/// Parameters of the stationary equation u'' + (d-1)u'/r + (omega - r^2)u + |u|^{p-2}u = 0.
struct ProblemParams {
    int d = 3;
    double p = 6.0;
    double omega = 2.0;

    bool critical() const { return std::abs(p - critical_exponent(d)) < 1e-12; }
    bool supercritical_quartic() const { return p == 4.0 && d >= 5; }
};

enum class IvpEvent { sign_change, blow_up, reached_r_max };

struct IvpOptions {
    double rel_tol = 1e-12;
    double blowup_factor = 10.0;
    bool include_nonlinearity = true;
    double min_step_rel = 1e-15;  // step underflow threshold relative to the start radius
};

struct IvpResult {
    std::vector<double> r;  // covered output nodes
    std::vector<double> u;
    std::vector<double> du;
    IvpEvent event = IvpEvent::reached_r_max;
    double event_r = 0.0;
    double u_end = 0.0;
};

namespace detail {

struct SeriesStart {
    double c2 = 0.0, c4 = 0.0, r_start = 0.0;
    double value(double b, double r) const { return b + c2 * r * r + c4 * r * r * r * r; }
    double slope(double, double r) const { return 2.0 * c2 * r + 4.0 * c4 * r * r * r; }
};

/// Regular-center series u = b + c2 r^2 + c4 r^4 + O(r^6) and a start radius
/// small enough that the truncation is below 1e-8 relative.
inline SeriesStart center_series(const ProblemParams& pp, double b, bool nonlinear,
                                 double r_cap) {
    SeriesStart s;
    const double dd = static_cast<double>(pp.d);
    const double nl = nonlinear ? std::pow(b, pp.p - 1.0) : 0.0;
    const double dnl = nonlinear ? (pp.p - 1.0) * std::pow(b, pp.p - 2.0) : 0.0;
    s.c2 = -(pp.omega * b + nl) / (2.0 * dd);
    s.c4 = (b - (pp.omega + dnl) * s.c2) / (4.0 * (dd + 2.0));
    double r_s = r_cap;
    if (std::abs(s.c2) > 0.0) r_s = std::min(r_s, std::sqrt(1e-8 * b / std::abs(s.c2)));
    if (std::abs(s.c4) > 0.0) r_s = std::min(r_s, std::pow(1e-8 * b / std::abs(s.c4), 0.25));
    s.r_start = r_s;
    return s;
}

inline OdeRhs radial_rhs(const ProblemParams& pp, bool nonlinear) {
    const double dd = static_cast<double>(pp.d);
    const double om = pp.omega;
    const double pm2 = pp.p - 2.0;
    return [dd, om, pm2, nonlinear](double r, const OdeState& y) -> OdeState {
        const double u = y[0], v = y[1];
        double nl = 0.0;
        if (nonlinear) nl = std::pow(std::abs(u), pm2) * u;
        return {v, -((dd - 1.0) / r) * v - (om - r * r) * u - nl};
    };
}

/// Core driver: integrate from (r_start, state) recording at `nodes`, stopping
/// at sign change or blow-up past `blow_scale`.
inline IvpResult drive(const ProblemParams& pp, double r_start, OdeState state,
                       double r_max, double blow_scale, const std::vector<double>& nodes,
                       const IvpOptions& opt) {
    IvpResult out;
    out.event = IvpEvent::reached_r_max;
    out.event_r = r_max;

    StepControl ctrl;
    ctrl.rel_tol = opt.rel_tol;
    ctrl.initial_step = 0.05 * r_start;
    ctrl.max_step = 0.05;
    ctrl.min_step = opt.min_step_rel * r_start;

    const OdeRhs rhs = radial_rhs(pp, opt.include_nonlinearity);
    double last_u = state[0];
    integrate_adaptive(
        rhs, r_start, r_max, state, nodes,
        [&](double r, const OdeState& y) {
            out.r.push_back(r);
            out.u.push_back(y[0]);
            out.du.push_back(y[1]);
        },
        [&](double r, const OdeState& y) {
            last_u = y[0];
            if (y[0] <= 0.0) {
                out.event = IvpEvent::sign_change;
                out.event_r = r;
                return true;
            }
            if (std::abs(y[0]) > blow_scale) {
                out.event = IvpEvent::blow_up;
                out.event_r = r;
                return true;
            }
            return false;
        },
        ctrl);
    out.u_end = last_u;
    return out;
}

}  // namespace detail

/// Integrates the radial IVP u(0) = b out to grid.r_max(), recording values at
/// the grid nodes, and stops at the first event.  The singular (d-1)/r term is
/// bypassed near the center by a quartic series start.
inline IvpResult integrate_ivp(const ProblemParams& pp, double b, const RadialGrid& grid,
                               const IvpOptions& opt = {}) {
    if (!(b > 0.0)) throw DomainError("integrate_ivp: requires b > 0");
    const auto series =
        detail::center_series(pp, b, opt.include_nonlinearity, std::min(1e-6, grid.r_min()));
    const double r_s = series.r_start;

    IvpResult head;
    std::vector<double> nodes;
    for (double r : grid.nodes) {
        if (r < r_s) {  // nodes inside the series region are filled analytically
            head.r.push_back(r);
            head.u.push_back(series.value(b, r));
            head.du.push_back(series.slope(b, r));
        } else {
            nodes.push_back(r);
        }
    }
    OdeState y0{series.value(b, r_s), series.slope(b, r_s)};
    IvpResult tail = detail::drive(pp, r_s, y0, grid.r_max(), opt.blowup_factor * b, nodes, opt);
    head.r.insert(head.r.end(), tail.r.begin(), tail.r.end());
    head.u.insert(head.u.end(), tail.u.begin(), tail.u.end());
    head.du.insert(head.du.end(), tail.du.begin(), tail.du.end());
    head.event = tail.event;
    head.event_r = tail.event_r;
    head.u_end = tail.u_end;
    return head;
}

/// A certified positive decaying solution of the radial equation.
struct ShotSolution {
    ProblemParams params;
    double b = 0.0;  // u(0)
    RadialProfile profile;
    std::vector<double> deriv;   // u' at the grid nodes
    double ode_residual = 0.0;   // max relative interior residual on the clean part
    bool decay_certified = false;
    double r_clean = 0.0;         // radius beyond which the inward decaying branch is spliced
    double tail_mismatch = 0.0;   // worst log-slope mismatch over the matching window
};

/// The singular profile with frequency omega_inf, blowing up like
/// inner_constant / r at the origin.
struct SingularSolution {
    int d = 0;
    double omega_inf = 0.0;
    double inner_constant = 0.0;  // sqrt(d-3)
    double r0 = 0.0;              // start radius of the integrated profile
    RadialProfile profile;        // on [r0, r_max]
    std::vector<double> deriv;
    double ode_residual = 0.0;
    bool decay_certified = false;
    double r_clean = 0.0;
    double omega_r0_delta = 0.0;  // |omega_inf(r0) - omega_inf(r0/2)|

    /// u_inf(r): two-term inner expansion below r0, cubic Hermite on the
    /// stored profile above it.
    double value(double r) const {
        const auto& rs = profile.grid.nodes;
        if (r <= r0) {
            const double a = inner_constant;
            return a / r - omega_inf * a * r / (4.0 * d - 10.0);
        }
        if (r >= rs.back()) return profile.values.back();
        const auto it = std::upper_bound(rs.begin(), rs.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - rs.begin()) - 1;
        const double h = rs[j + 1] - rs[j];
        const double t = (r - rs[j]) / h;
        const double u0 = profile.values[j], u1 = profile.values[j + 1];
        const double m0 = deriv[j] * h, m1 = deriv[j + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * u1 + (t3 - t2) * m1;
    }
};

namespace detail {

enum class Side { fell, rose };

inline Side side_of(const IvpResult& res) {
    return res.event == IvpEvent::sign_change ? Side::fell : Side::rose;
}

struct Bracket {
    double lo = 0.0, hi = 0.0;  // lo/hi in parameter order, sides differ
    Side lo_side = Side::fell;
};

/// Scans `xs` (ascending) and returns the first adjacent pair with differing
/// event sides, or nullopt when every probe lands on the same side.
inline std::optional<Bracket> scan_for_bracket(const std::function<Side(double)>& probe,
                                               const std::vector<double>& xs) {
    Bracket br;
    Side prev = probe(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const Side cur = probe(xs[i]);
        if (cur != prev) {
            br.lo = xs[i - 1];
            br.hi = xs[i];
            br.lo_side = prev;
            return br;
        }
        prev = cur;
    }
    return std::nullopt;
}

inline double bisect(const std::function<Side(double)>& probe, Bracket br, double tol_abs,
                     int max_iter = 200) {
    for (int it = 0; it < max_iter && (br.hi - br.lo) > tol_abs; ++it) {
        const double mid = 0.5 * (br.lo + br.hi);
        if (mid <= br.lo || mid >= br.hi) break;  // bracket at ulp resolution
        if (probe(mid) == br.lo_side)
            br.lo = mid;
        else
            br.hi = mid;
    }
    return 0.5 * (br.lo + br.hi);
}

/// Gaussian-type decay envelope r^{(omega-d)/2} e^{-r^2/2} in log form.
inline double log_envelope(int d, double omega, double r) {
    return 0.5 * (omega - static_cast<double>(d)) * std::log(r) - 0.5 * r * r;
}

/// Probe ladder for an open interval (lo, hi): geometric approach to both
/// endpoints, so a separatrix lying within 1e-13 of either end is still
/// bracketed (the admissible frequency tends to the upper endpoint as d
/// grows).
inline std::vector<double> open_interval_ladder(double lo, double hi) {
    const double width = hi - lo;
    std::vector<double> xs;
    for (int k = 1; k <= 46; ++k) xs.push_back(lo + width * std::pow(0.5, k));
    for (int k = 46; k >= 1; --k) xs.push_back(hi - width * std::pow(0.5, k));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

struct CertifyOutcome {
    bool ok = false;
    double band = 0.0;          // worst log-slope mismatch over the matching window
    std::size_t clean_end = 0;  // index of the last outward-clean node kept
};

/// Logarithmic slope u'/u of the decaying branch at the given (ascending)
/// nodes, obtained by integrating the Riccati equation
/// s' = -(d-1)s/r - (omega - r^2) - s^2 inward from the last node.  Inward
/// integration keeps the decaying branch attracting, and the log form never
/// overflows.  The nonlinear term is dropped: over the tail window this lives
/// on, it sits orders of magnitude below the matching tolerance.
inline std::vector<double> inward_decay_slope(int d, double omega,
                                              const std::vector<double>& nodes,
                                              double rel_tol) {
    const double rmax = nodes.back();
    const double gamma = 0.5 * (omega - static_cast<double>(d));
    const double c1 = -gamma * (gamma + static_cast<double>(d) - 2.0) / 4.0;
    OdeState y;
    y[0] = gamma / rmax - rmax -
           2.0 * c1 / (rmax * rmax * rmax) / (1.0 + c1 / (rmax * rmax));
    y[1] = 0.0;
    const OdeRhs rhs = [d, omega](double r, const OdeState& s) -> OdeState {
        return {-(d - 1.0) / r * s[0] - (omega - r * r) - s[0] * s[0], 0.0};
    };
    std::vector<double> rev(nodes.rbegin(), nodes.rend());
    std::vector<double> out_rev;
    out_rev.reserve(nodes.size());
    StepControl ctrl;
    ctrl.rel_tol = rel_tol;
    ctrl.initial_step = 1e-3;
    ctrl.max_step = 0.02;
    integrate_adaptive(rhs, rmax, nodes.front(), y, rev,
                       [&](double, const OdeState& s) { out_rev.push_back(s[0]); }, nullptr,
                       ctrl);
    if (out_rev.size() != nodes.size()) throw Error("inward_decay_slope: lost nodes");
    return {out_rev.rbegin(), out_rev.rend()};
}

/// Truncates the raw outward profile where it leaves the decaying branch,
/// certifies the decay by matching its logarithmic slope against the
/// inward-integrated decaying branch over a window below the truncation
/// radius, and splices the amplitude-matched inward branch beyond it.
inline CertifyOutcome splice_and_certify(const ProblemParams& pp, IvpResult& res,
                                         const RadialGrid& grid, double rel_tol = 1e-12) {
    CertifyOutcome out;
    if (res.u.size() < 8) return out;
    const double r_det = std::max(1.0, std::sqrt(std::max(pp.omega, 0.0)));
    const double r_tail = std::max(2.0, std::sqrt(std::max(pp.omega, 0.0)) + 0.5);
    const double u_head = *std::max_element(res.u.begin(), res.u.end());
    std::size_t ic = res.u.size();
    for (std::size_t i = 1; i < res.u.size(); ++i) {
        if (res.u[i] <= 0.0 || (res.r[i] > r_det && res.u[i] >= res.u[i - 1])) {
            ic = i;
            break;
        }
        // In the far tail the bisection remainder eventually bends the profile
        // off the decaying branch, up or down; a break in the slope relative
        // to the decay envelope marks the spot before the hard events fire.
        if (res.r[i] > r_tail && res.u[i] < 1e-3 * u_head) {
            const double dlog_u = std::log(res.u[i] / res.u[i - 1]);
            const double dlog_env = log_envelope(pp.d, pp.omega, res.r[i]) -
                                    log_envelope(pp.d, pp.omega, res.r[i - 1]);
            if (std::abs(dlog_u - dlog_env) > 0.01) {
                ic = i;
                break;
            }
        }
    }
    if (ic < 8) return out;
    std::size_t last = ic - 1;  // last outward-clean node
    const double rc = res.r[last];
    if (!(res.u[last] > 0.0)) return out;

    // Matching window [rc - 1.5, rc - 1.0], inside the linear tail.
    const double w_lo = std::max(std::sqrt(std::max(pp.omega, 0.0)) + 0.8, rc - 1.5);
    const double w_hi = rc - 1.0;
    if (w_hi <= w_lo + 1e-9) return out;

    // Inward decaying branch sampled on every grid node from the window floor.
    std::vector<double> tail_nodes;
    std::size_t first_tail = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= w_lo) {
            if (first_tail == grid.size()) first_tail = i;
            tail_nodes.push_back(grid[i]);
        }
    }
    if (tail_nodes.size() < 5) return out;
    const std::vector<double> s_in = inward_decay_slope(pp.d, pp.omega, tail_nodes, rel_tol);

    double worst = 0.0;
    std::size_t n_window = 0;
    std::size_t i_splice = 0;  // profile index anchoring the splice
    for (std::size_t i = first_tail; i <= last; ++i) {
        const double r = res.r[i];
        if (r > w_hi) break;
        const double s_out = res.du[i] / res.u[i];
        const double mism = std::abs(s_out - s_in[i - first_tail]) /
                            (1.0 + std::abs(s_in[i - first_tail]));
        worst = std::max(worst, mism);
        ++n_window;
        i_splice = i;
    }
    if (n_window < 5) return out;
    out.band = worst;
    out.clean_end = i_splice;
    last = i_splice;

    // Splice the inward branch beyond the anchor: log u accumulates the slope
    // by trapezoid over the grid nodes.
    res.r.resize(last + 1);
    res.u.resize(last + 1);
    res.du.resize(last + 1);
    double log_u = std::log(res.u[last]);
    double r_prev = res.r[last];
    double s_prev = s_in[last - first_tail];
    for (std::size_t i = last + 1 - first_tail; i < tail_nodes.size(); ++i) {
        const double r = tail_nodes[i];
        const double s = s_in[i];
        log_u += 0.5 * (s + s_prev) * (r - r_prev);
        const double u = std::exp(log_u);
        res.r.push_back(r);
        res.u.push_back(u);
        res.du.push_back(u * s);
        r_prev = r;
        s_prev = s;
    }

    out.ok = worst <= 0.02 && res.u[last] <= 1e-4 * u_head;
    return out;
}

/// Max relative residual of the equation over clean interior nodes.  On a
/// log-uniform grid the derivatives come from 4th-order stencils in t = log r,
/// which keeps the differentiation error well below the integration error even
/// in the 1/r region of singular profiles; otherwise a 3-point nonuniform
/// stencil applied to the recorded derivative is used.
inline double interior_residual(const ProblemParams& pp, const IvpResult& res,
                                std::size_t clean_end, bool nonlinear = true) {
    if (clean_end + 1 > res.r.size()) clean_end = res.r.size() - 1;
    bool log_uniform = res.r.size() >= 6;
    double dt = 0.0;
    if (log_uniform) {
        dt = std::log(res.r[1] / res.r[0]);
        for (std::size_t i = 1; i + 1 <= clean_end && log_uniform; ++i)
            if (std::abs(std::log(res.r[i + 1] / res.r[i]) - dt) > 1e-10 * dt)
                log_uniform = false;
    }

    double worst = 0.0;
    const auto accumulate = [&](std::size_t i, double upp) {
        const double r = res.r[i], u = res.u[i], v = res.du[i];
        const double drift = (pp.d - 1.0) / r * v;
        const double lin = (pp.omega - r * r) * u;
        const double nl = nonlinear ? std::pow(std::abs(u), pp.p - 2.0) * u : 0.0;
        const double scale = std::abs(drift) + std::abs(pp.omega * u) + r * r * std::abs(u) +
                             std::abs(nl) + 1e-300;
        worst = std::max(worst, std::abs(upp + drift + lin + nl) / scale);
    };

    if (log_uniform && clean_end >= 4) {
        // u'' = (dv/dt)/r with v = u'; first differences of v avoid the 1/r^2
        // roundoff amplification a second difference of u would suffer.  In the
        // Gaussian tail the stencil's own truncation grows like dt^4 r^8, so
        // nodes where that floor exceeds a tenth of the 1e-7 target are not
        // probative and are skipped (the envelope band certifies the tail).
        for (std::size_t i = 2; i + 2 <= clean_end; ++i) {
            const double r = res.r[i];
            const double fd_floor = std::pow(dt, 4) * std::pow(r, 8) / 30.0;
            if (fd_floor > 1e-8) continue;
            const double* v = res.du.data();
            const double dv = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) /
                              (12.0 * dt);
            accumulate(i, dv / r);
        }
        return worst;
    }
    for (std::size_t i = 1; i + 1 <= clean_end; ++i) {
        const double hm = res.r[i] - res.r[i - 1];
        const double hp = res.r[i + 1] - res.r[i];
        const double upp = (hm / (hp * (hm + hp))) * res.du[i + 1] +
                           ((hp - hm) / (hm * hp)) * res.du[i] -
                           (hp / (hm * (hm + hp))) * res.du[i - 1];
        accumulate(i, upp);
    }
    return worst;
}

inline RadialGrid output_grid(int d, double omega, double r_lo, std::size_t n) {
    const double r_hi = std::sqrt(std::max(omega, 0.0)) + 10.0;
    return RadialGrid::log_spaced(d, r_lo, r_hi, n);
}

}  // namespace detail

struct ShootOptions {
    std::size_t grid_n = 4096;
    double rel_tol = 1e-12;
    double bisect_tol_rel = 1e-15;  // on b for ground states
    double omega_tol_abs = 0.0;     // on omega: 0 bisects down to ulp resolution
};

/// Ground state of the critical equation for omega in (omega_*, d): bisection
/// on b = u(0) between the event regimes, then envelope splice + certification.
inline ShotSolution find_ground_state(int d, double omega, const ShootOptions& opt = {}) {
    ProblemParams pp{d, critical_exponent(d), omega};
    const double r_max = std::sqrt(std::max(omega, 0.0)) + 10.0;
    IvpOptions iopt;
    iopt.rel_tol = opt.rel_tol;

    const auto probe = [&](double b) {
        const auto series = detail::center_series(pp, b, true, 1e-6);
        OdeState y0{series.value(b, series.r_start), series.slope(b, series.r_start)};
        return detail::side_of(
            detail::drive(pp, series.r_start, y0, r_max, 10.0 * b, {}, iopt));
    };

    std::vector<double> bs;
    for (double b = 1e-3; b <= 1.1e9; b *= 2.0) bs.push_back(b);
    const auto bracket = detail::scan_for_bracket(probe, bs);
    if (!bracket) {
        NoSolutionReason why = NoSolutionReason::bracket_not_found;
        if (omega >= d)
            why = NoSolutionReason::omega_at_or_above_first_eigenvalue;
        else if (omega <= 0.0)
            why = NoSolutionReason::omega_nonpositive;
        else if (d == 3 && omega <= 1.0)
            why = NoSolutionReason::omega_below_threshold_d3;
        std::ostringstream os;
        os << "d=" << d << " omega=" << omega << ", all probes on one side over b in [1e-3, 1e9]";
        throw NoSolutionError(why, os.str());
    }
    const double b_star =
        detail::bisect(probe, *bracket, opt.bisect_tol_rel * bracket->hi);

    const auto series = detail::center_series(pp, b_star, true, 1e-6);
    const RadialGrid grid = detail::output_grid(d, omega, series.r_start, opt.grid_n);
    IvpResult res = integrate_ivp(pp, b_star, grid, iopt);
    const auto cert = detail::splice_and_certify(pp, res, grid, iopt.rel_tol);
    if (!cert.ok)
        throw CertificationError("find_ground_state: decay certification failed (mismatch " +
                                 std::to_string(cert.band) + ")");

    ShotSolution sol;
    sol.params = pp;
    sol.b = b_star;
    sol.profile = RadialProfile(grid, res.u, "u_omega");
    sol.deriv = res.du;
    sol.ode_residual = detail::interior_residual(pp, res, cert.clean_end);
    sol.decay_certified = true;
    sol.r_clean = res.r[cert.clean_end];
    sol.tail_mismatch = cert.band;
    return sol;
}

/// Positive decaying solution of the quartic equation with u(0) = b: bisection
/// on omega in (d-4, d).
inline ShotSolution find_omega_b(int d, double b, const ShootOptions& opt = {}) {
    if (d < 5) throw DomainError("find_omega_b: requires d >= 5 for the quartic nonlinearity");
    if (!(b > 0.0)) throw DomainError("find_omega_b: requires b > 0");
    IvpOptions iopt;
    iopt.rel_tol = opt.rel_tol;

    const auto probe = [&](double omega) {
        ProblemParams pp{d, 4.0, omega};
        const double r_max = std::sqrt(std::max(omega, 0.0)) + 10.0;
        const auto series = detail::center_series(pp, b, true, 1e-6);
        OdeState y0{series.value(b, series.r_start), series.slope(b, series.r_start)};
        return detail::side_of(
            detail::drive(pp, series.r_start, y0, r_max, 10.0 * b, {}, iopt));
    };

    const auto omegas = detail::open_interval_ladder(d - 4.0, static_cast<double>(d));
    const auto bracket = detail::scan_for_bracket(probe, omegas);
    if (!bracket) {
        std::ostringstream os;
        os << "find_omega_b: d=" << d << " b=" << b
           << ": event types do not separate on (d-4, d)";
        throw NoBracketError(os.str());
    }
    const double omega_b = detail::bisect(probe, *bracket, opt.omega_tol_abs);

    ProblemParams pp{d, 4.0, omega_b};
    const auto series = detail::center_series(pp, b, true, 1e-6);
    const RadialGrid grid = detail::output_grid(d, omega_b, series.r_start, opt.grid_n);
    IvpResult res = integrate_ivp(pp, b, grid, iopt);
    const auto cert = detail::splice_and_certify(pp, res, grid, iopt.rel_tol);
    if (!cert.ok)
        throw CertificationError("find_omega_b: decay certification failed at b = " +
                                 std::to_string(b));

    ShotSolution sol;
    sol.params = pp;
    sol.b = b;
    sol.profile = RadialProfile(grid, res.u, "u_b");
    sol.deriv = res.du;
    sol.ode_residual = detail::interior_residual(pp, res, cert.clean_end);
    sol.decay_certified = true;
    sol.r_clean = res.r[cert.clean_end];
    sol.tail_mismatch = cert.band;
    return sol;
}

struct SingularOptions {
    double r0 = 1e-4;
    std::size_t grid_n = 4096;
    double rel_tol = 1e-12;
    double omega_tol_abs = 0.0;  // bisect omega down to ulp resolution
    bool check_r0_robustness = true;
};

namespace detail {

inline OdeState singular_start(int d, double omega, double r0) {
    const double a = std::sqrt(static_cast<double>(d) - 3.0);
    const double c = omega * a / (4.0 * d - 10.0);
    return {a / r0 - c * r0, -a / (r0 * r0) - c};
}

inline double bisect_singular_omega(int d, double r0, double rel_tol, double tol_abs) {
    IvpOptions iopt;
    iopt.rel_tol = rel_tol;
    const auto probe = [&](double omega) {
        ProblemParams pp{d, 4.0, omega};
        const double r_max = std::sqrt(std::max(omega, 0.0)) + 10.0;
        const OdeState y0 = singular_start(d, omega, r0);
        if (y0[0] * r0 > std::sqrt(static_cast<double>(d) - 3.0))
            throw Error("find_singular: two-term start violates F(r0) <= sqrt(d-3)");
        return side_of(drive(pp, r0, y0, r_max, 10.0 * y0[0], {}, iopt));
    };
    const auto omegas = open_interval_ladder(d - 4.0, static_cast<double>(d));
    const auto bracket = scan_for_bracket(probe, omegas);
    if (!bracket)
        throw NoBracketError("find_singular: d=" + std::to_string(d) +
                             ": event types do not separate on (d-4, d)");
    return bisect(probe, *bracket, tol_abs);
}

}  // namespace detail

/// The singular profile: two-term inner start at r0, bisection on omega for
/// decay, r0-halving robustness check, and the pointwise bound u < sqrt(d-3)/r.
inline SingularSolution find_singular(int d, const SingularOptions& opt = {}) {
    if (d < 5) throw DomainError("find_singular: requires d >= 5");
    if (!(opt.r0 >= 1e-4 - 1e-18 && opt.r0 <= 1e-2))
        throw DomainError("find_singular: r0 must lie in [1e-4, 1e-2]");

    const double omega_inf =
        detail::bisect_singular_omega(d, opt.r0, opt.rel_tol, opt.omega_tol_abs);
    double delta = 0.0;
    if (opt.check_r0_robustness) {
        const double omega_half =
            detail::bisect_singular_omega(d, 0.5 * opt.r0, opt.rel_tol, opt.omega_tol_abs);
        delta = std::abs(omega_inf - omega_half);
        if (delta >= 1e-6)
            throw CertificationError(
                "find_singular: omega_inf moved by " + std::to_string(delta) +
                " under r0 halving");
    }

    ProblemParams pp{d, 4.0, omega_inf};
    const RadialGrid grid = detail::output_grid(d, omega_inf, opt.r0, opt.grid_n);
    IvpOptions iopt;
    iopt.rel_tol = opt.rel_tol;
    const OdeState y0 = detail::singular_start(d, omega_inf, opt.r0);
    IvpResult res = detail::drive(pp, opt.r0, y0, grid.r_max(), 10.0 * y0[0],
                                  grid.nodes, iopt);
    const auto cert = detail::splice_and_certify(pp, res, grid, iopt.rel_tol);
    if (!cert.ok)
        throw CertificationError("find_singular: decay certification failed for d = " +
                                 std::to_string(d));

    const double a = std::sqrt(static_cast<double>(d) - 3.0);
    SingularSolution sol;
    sol.d = d;
    sol.omega_inf = omega_inf;
    sol.inner_constant = a;
    sol.r0 = opt.r0;
    sol.profile = RadialProfile(grid, res.u, "u_inf");
    sol.deriv = res.du;
    sol.ode_residual = detail::interior_residual(pp, res, cert.clean_end);
    sol.decay_certified = true;
    sol.r_clean = res.r[cert.clean_end];
    sol.omega_r0_delta = delta;

    if (!(omega_inf > d - 4.0 && omega_inf < d))
        throw CertificationError("find_singular: omega_inf outside (d-4, d)");
    double prev_f = a;  // F(0+) = sqrt(d-3)
    for (std::size_t i = 0; i < sol.profile.size(); ++i) {
        const double f = grid[i] * sol.profile.values[i];
        if (!(f < a))
            throw CertificationError("find_singular: bound r u(r) < sqrt(d-3) violated");
        if (!(f < prev_f + 1e-12 * std::abs(prev_f)))
            throw CertificationError("find_singular: F(r) = r u(r) not decreasing");
        prev_f = f;
    }
    return sol;
}

/// One entry of a sweep over central amplitudes.
struct SweepPoint {
    double b = 0.0;
    std::optional<double> omega_b;
    std::string diagnostic;  // failure reason when omega_b is unset
};

/// Independent find_omega_b runs over an increasing list of b values; failures
/// are flagged per entry, results stay in input order.
inline std::vector<SweepPoint> sweep_b(int d, const std::vector<double>& b_values,
                                       const ShootOptions& opt = {},
                                       bool parallel = true) {
    for (std::size_t i = 1; i < b_values.size(); ++i)
        if (!(b_values[i] > b_values[i - 1]))
            throw DomainError("sweep_b: b_values must be increasing");

    const auto task = [&](double b) -> SweepPoint {
        SweepPoint pt;
        pt.b = b;
        try {
            ShootOptions o = opt;
            o.grid_n = 2048;  // enough tail nodes to certify; omega is the output
            pt.omega_b = find_omega_b(d, b, o).params.omega;
        } catch (const Error& e) {
            pt.diagnostic = e.what();
        }
        return pt;
    };

    std::vector<SweepPoint> out(b_values.size());
    if (!parallel) {
        for (std::size_t i = 0; i < b_values.size(); ++i) out[i] = task(b_values[i]);
        return out;
    }
    std::vector<std::future<SweepPoint>> futures;
    futures.reserve(b_values.size());
    for (double b : b_values)
        futures.push_back(std::async(std::launch::async, task, b));
    for (std::size_t i = 0; i < futures.size(); ++i) out[i] = futures[i].get();
    return out;
}

}  // namespace gpelab
