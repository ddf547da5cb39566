// Acceptance suite: one line per criterion, PASS/FAIL with the measured
// values and the pinned tolerances.  Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gpelab/asymptotics.hpp"
#include "gpelab/bubble.hpp"
#include "gpelab/green.hpp"
#include "gpelab/shooting.hpp"
#include "gpelab/spectral.hpp"
#include "support/oracles.hpp"

using namespace gpelab;

namespace {

int failures = 0;

void verdict(const std::string& id, bool ok, const std::string& detail) {
    std::printf("%s  criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// --------------------------------------------------------------------------
void criterion_1_kummer_oracle() {
    bool ok = true;
    double worst = 0.0;
    for (int d : {13, 16, 20}) {
        const auto spec = kummer_spec(d);
        const double rmax = std::sqrt(spec.sigma[3]) + 6.0;
        const auto g1 = detail::level_grid(d, 1e-5, rmax, 0.02);
        const auto g2 = detail::level_grid(d, 1e-5, rmax, 0.01);
        const auto t1 = limiting_operator(d, g1);
        const auto t2 = limiting_operator(d, g2);
        for (std::size_t n = 0; n < 4; ++n) {
            const double e1 = eigenvalue_by_count(t1, n + 1, 1e-10);
            const double e2 = eigenvalue_by_count(t2, n + 1, 1e-10);
            const double rich = (4.0 * e2 - e1) / 3.0;
            worst = std::max(worst, std::abs(rich - spec.sigma[n]) / spec.sigma[n]);
        }
    }
    ok = worst <= 0.005;
    verdict("1 (exact-spectrum oracle)", ok,
            "FD eigenvalues vs d+4n+2l+ after one Richardson step, d in {13,16,20}, "
            "n<=3: max rel err " + fmt(worst) + " (tol 0.005)");
}

// --------------------------------------------------------------------------
void criterion_2_morse_index() {
    bool ok = true;
    std::string detail;
    for (int d : {16, 20}) {
        const auto rep = morse_index(find_singular(d));
        const bool good = rep.morse_index && *rep.morse_index == 1;
        ok = ok && good;
        detail += "d=" + std::to_string(d) + ":" +
                  (rep.morse_index ? std::to_string(*rep.morse_index) : "unbounded") + " ";
    }
    for (int d : {13, 14, 15}) {
        const auto rep = morse_index(find_singular(d));
        const bool good = rep.morse_index && *rep.morse_index >= 1 && *rep.morse_index <= 2;
        ok = ok && good;
        detail += "d=" + std::to_string(d) + ":" +
                  (rep.morse_index ? std::to_string(*rep.morse_index) : "unbounded") + " ";
    }
    for (int d : {5, 8, 12}) {
        const auto rep = morse_index(find_singular(d));
        bool good = rep.unbounded;
        for (std::size_t i = 1; i < 4 && good; ++i)
            good = rep.refinement_trace[i].count > rep.refinement_trace[i - 1].count;
        ok = ok && good;
        detail += "d=" + std::to_string(d) + ":" + (good ? "unbounded" : "NOT-unbounded") + " ";
    }
    verdict("2 (Morse index)", ok, detail + "(expected 1 | 1..2 | unbounded)");
}

// --------------------------------------------------------------------------
void criterion_3_singular() {
    bool ok = true;
    std::string detail;
    for (int d : {8, 13, 16}) {
        const auto s = find_singular(d);
        const double a = std::sqrt(static_cast<double>(d) - 3.0);
        bool good = s.omega_inf > d - 4.0 && s.omega_inf < d && s.omega_r0_delta < 1e-6 &&
                    s.decay_certified;
        double prev = a;
        for (std::size_t i = 0; i < s.profile.size() && good; ++i) {
            const double f = s.profile.grid[i] * s.profile.values[i];
            good = f < a && f < prev + 1e-12 * std::abs(prev);
            prev = f;
        }
        ok = ok && good;
        detail += "d=" + std::to_string(d) + ": omega_inf=" + fmt(s.omega_inf) +
                  " dr0=" + fmt(s.omega_r0_delta) + "  ";
    }
    verdict("3 (singular profiles)", ok,
            detail + "(need omega_inf in (d-4,d), F decreasing < sqrt(d-3), r0-stable 1e-6)");
}

// --------------------------------------------------------------------------
void criterion_4_oscillation_vs_monotone() {
    std::vector<double> bs;
    for (int i = 0; i < 40; ++i) bs.push_back(10.0 * std::pow(1000.0, i / 39.0));

    const auto sing8 = find_singular(8);
    const auto pts8 = sweep_b(8, bs);
    int changes8 = 0, prev = 0;
    bool complete8 = true;
    for (const auto& p : pts8) {
        if (!p.omega_b) {
            complete8 = false;
            continue;
        }
        const int s = (*p.omega_b - sing8.omega_inf) > 0 ? 1 : -1;
        if (prev != 0 && s != prev) ++changes8;
        prev = s;
    }
    verdict("4a (oscillation, d=8)", complete8 && changes8 >= 3,
            std::to_string(changes8) + " sign changes of omega_b - omega_inf over 40-point "
            "log grid b in [10, 1e4] (need >= 3, all points solved)");

    const auto sing16 = find_singular(16);
    const auto pts16 = sweep_b(16, bs);
    int changes16 = 0;
    prev = 0;
    bool complete16 = true, decreasing = true;
    double prev_abs = 1e300;
    for (std::size_t i = 0; i < pts16.size(); ++i) {
        if (!pts16[i].omega_b) {
            complete16 = false;
            continue;
        }
        const double delta = *pts16[i].omega_b - sing16.omega_inf;
        const int s = delta > 0 ? 1 : -1;
        if (prev != 0 && s != prev) ++changes16;
        prev = s;
        if (i >= pts16.size() / 2) {
            if (std::abs(delta) >= prev_abs) decreasing = false;
            prev_abs = std::abs(delta);
        }
    }
    verdict("4b (monotone, d=16)", complete16 && changes16 == 0 && decreasing,
            std::to_string(changes16) + " sign changes; upper-half |omega_b - omega_inf| " +
                (decreasing ? "decreasing" : "NOT decreasing"));
}

// --------------------------------------------------------------------------
struct SweepData {
    std::vector<OmegaSample> samples;
    std::vector<double> remainders;
};

SweepData run_sweep(int d, const std::vector<double>& omegas, std::size_t grid_n) {
    SweepData out;
    ShootOptions opt;
    opt.grid_n = grid_n;
    for (double om : omegas) {
        const auto sol = find_ground_state(d, om, opt);
        OmegaSample s;
        s.omega = om;
        s.b = sol.b;
        s.eps = extract_eps(sol);
        s.energy = energy_level(sol);
        out.samples.push_back(s);
        out.remainders.push_back(remainder_norm(sol));
    }
    return out;
}

void criterion_5_critical_law_d7(const SweepData& data) {
    const auto bub = bubble_constants(7);
    const auto law = target_constants(7, nullptr, bub);

    // Monotone trend of the eps^2 ratio over the pinned omega set, then the
    // gate at the smallest computed omega.
    bool monotone = true;
    double prev_excess = 1e300;
    double gate_ratio = 0.0;
    for (const auto& s : data.samples) {
        const double r = s.eps * s.eps * 2.0 * (*bub.norm_xU_sq) / (s.omega * (*bub.norm_L2_sq));
        if (std::abs(r - 1.0) > prev_excess + 1e-12) monotone = false;
        prev_excess = std::abs(r - 1.0);
        gate_ratio = r;
    }
    const bool eps_ok = monotone && gate_ratio >= 0.95 && gate_ratio <= 1.05;
    verdict("5a (concentration law, d=7)", eps_ok,
            "eps^2 2||xU||^2/(omega ||U||^2) = " + fmt(gate_ratio) +
                " at omega=" + fmt(data.samples.back().omega) +
                " (tol [0.95, 1.05], monotone trend over 0.4..0.05)");

    const auto& last = data.samples.back();
    const double energy_ratio = (law.sobolev - last.energy) / law.energy_law(last.omega);
    const double alt_ratio = (law.sobolev - last.energy) / law.energy_law_alt(last.omega);
    verdict("5b (energy law, d=7)", energy_ratio >= 0.9 && energy_ratio <= 1.1,
            "(S-I)/law = " + fmt(energy_ratio) + " against the sharp 1/4 constant (tol 10%); "
            "displayed 1/(2d) constant would give " + fmt(alt_ratio));
}

void criterion_6_critical_law_d3(const SweepData& data, const GreenData& gd) {
    const auto law = target_constants(3, &gd, bubble_constants(3));
    bool monotone = true;
    double prev_excess = 1e300;
    double gate_ratio = 0.0;
    for (const auto& s : data.samples) {
        const double r = s.eps / law.eps_law(s.omega);
        if (std::abs(r - 1.0) > prev_excess + 1e-12) monotone = false;
        prev_excess = std::abs(r - 1.0);
        gate_ratio = r;
    }
    const double alt_ratio = data.samples.back().eps / law.eps_law_alt(data.samples.back().omega);
    verdict("6a (concentration law, d=3)",
            monotone && gate_ratio >= 0.90 && gate_ratio <= 1.10,
            "eps/(c ||G||^2 (omega-1)) = " + fmt(gate_ratio) +
                " at omega-1=" + fmt(data.samples.back().omega - 1.0) +
                " with the sharp 50pi constant (tol [0.9, 1.1]); displayed 20pi "
                "constant would give " + fmt(alt_ratio));
    verdict("6b (H(0) = 0, d=3)", gd.H_at_zero && std::abs(*gd.H_at_zero) <= 1e-4,
            "H(0) = " + fmt(gd.H_at_zero ? *gd.H_at_zero : 1e9) + " (tol 1e-4)");
}

// --------------------------------------------------------------------------
void criterion_7_green() {
    bool ok = true;
    std::string detail;
    for (int d : {3, 4, 5, 6}) {
        const auto gd = solve_green(d, RadialGrid::log_spaced(d, 1e-4, 9.0, 4096));
        double gmin = 1e300;
        for (double v : gd.G.values) gmin = std::min(gmin, v);
        bool good = gmin > 0.0 && gd.decay_sigma > 0.0;
        if (d == 4 || d == 5) {
            good = good && gd.H_at_zero && *gd.H_at_zero > 0.0;
            detail += "H0(d=" + std::to_string(d) + ")=" + fmt(*gd.H_at_zero) + " ";
        }
        if (d == 6) {
            good = good && gd.log_coeff_d6 && std::abs(*gd.log_coeff_d6 + 0.25) <= 0.01;
            detail += "logc(d=6)=" + fmt(*gd.log_coeff_d6) + " ";
        }
        ok = ok && good;
    }
    verdict("7 (Green regular part)", ok,
            detail + "(need H(0)>0 for d=4,5; log coeff -0.25 +- 0.01; G>0, sigma>0)");
}

// --------------------------------------------------------------------------
void criterion_8_nonexistence() {
    const auto expect = [&](int d, double om, NoSolutionReason want) {
        try {
            find_ground_state(d, om);
            return false;
        } catch (const NoSolutionError& e) {
            return e.reason == want;
        }
    };
    const bool a = expect(5, 5.5, NoSolutionReason::omega_at_or_above_first_eigenvalue);
    const bool b = expect(3, 0.5, NoSolutionReason::omega_below_threshold_d3);
    const bool c = expect(5, -1.0, NoSolutionReason::omega_nonpositive);
    verdict("8 (nonexistence)", a && b && c,
            std::string("d=5,omega=5.5: ") + (a ? "NoSolution" : "WRONG") +
                "; d=3,omega=0.5: " + (b ? "NoSolution" : "WRONG") +
                "; d=5,omega=-1: " + (c ? "NoSolution" : "WRONG"));
}

// --------------------------------------------------------------------------
void criterion_9_energy_ordering(const SweepData& d7, const SweepData& d3) {
    bool ok = true;
    const double s7 = sobolev_constant(7), s3 = sobolev_constant(3);
    double prev = 1e300;
    for (const auto& s : d7.samples) {
        ok = ok && s.energy > 0.0 && s.energy < s7 && (s7 - s.energy) < prev;
        prev = s7 - s.energy;
    }
    prev = 1e300;
    for (const auto& s : d3.samples) {
        ok = ok && s.energy > 0.0 && s.energy < s3 && (s3 - s.energy) < prev;
        prev = s3 - s.energy;
    }
    verdict("9 (energy ordering)", ok,
            "0 < I < S and S - I strictly decreasing toward omega_* on all accepted samples");
}

// --------------------------------------------------------------------------
void criterion_10_oracle_algebra() {
    // Beta closed forms vs adaptive quadrature.
    bool beta_ok = true;
    double worst = 0.0;
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> ua(0.0, 8.0);
    std::uniform_real_distribution<double> margin(0.75, 6.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double a = ua(rng);
        const double b = 0.5 * (a + 1.0) + margin(rng);
        const double closed = power_integral(a, b);
        const double quad = oracle::power_integral_quadrature(a, b, 1e-14 * closed);
        worst = std::max(worst, std::abs(closed - quad) / closed);
    }
    for (int d : {4, 5, 7}) {  // the named bubble norms
        const double q = 2.0 * d / (d - 2.0);
        const double closed = power_integral(d - 1.0, 0.5 * q * (d - 2.0));
        const double quad = oracle::power_integral_quadrature(
            d - 1.0, 0.5 * q * (d - 2.0), 1e-14 * closed);
        worst = std::max(worst, std::abs(closed - quad) / closed);
    }
    beta_ok = worst <= 1e-10;

    // Sturm counts vs closed-form spectra on three hand-checkable matrices.
    TridiagonalOperator diag3({1.0, 2.0, 3.0}, {0.0, 0.0});
    TridiagonalOperator lap3({2.0, 2.0, 2.0}, {-1.0, -1.0});
    const std::size_t n = 12;
    TridiagonalOperator lap12(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
    bool sturm_ok = count_eigs_below(diag3, 2.5) == 2 && count_eigs_below(diag3, 0.5) == 0 &&
                    count_eigs_below(lap3, 2.0) == 1 && count_eigs_below(lap3, 4.0) == 3;
    for (std::size_t k = 1; k <= n && sturm_ok; ++k) {
        const double lam = 2.0 - 2.0 * std::cos(M_PI * k / (n + 1.0));
        sturm_ok = count_eigs_below(lap12, lam + 1e-9) == k &&
                   count_eigs_below(lap12, lam - 1e-9) == k - 1;
    }

    // Closed-form eigenfunction residuals.
    const std::vector<double> samples = {0.3, 0.5, 0.8, 1.2, 1.7, 2.3, 3.0};
    double eig_res = 0.0;
    for (int d : {13, 16, 20})
        for (int m = 0; m <= 3; ++m)
            eig_res = std::max(eig_res, eigenfunction_residual(d, m, samples));
    const bool eig_ok = eig_res <= 1e-6;

    verdict("10 (oracle algebra)", beta_ok && sturm_ok && eig_ok,
            "Beta vs quadrature max rel " + fmt(worst) + " (tol 1e-10); Sturm counts " +
                (sturm_ok ? "exact" : "WRONG") + "; eigenfunction residual " + fmt(eig_res) +
                " (tol 1e-6)");
}

// --------------------------------------------------------------------------
void criterion_11_nondegeneracy() {
    const auto rep = morse_index(find_singular(16));
    const auto gap = nondegeneracy_gap(rep);
    const bool ok = gap.verdict == GapVerdict::nondegenerate;
    verdict("11 (nondegeneracy, d=16)", ok,
            "tau1=" + fmt(gap.tau1) + " < omega_inf=" + fmt(rep.omega_inf) +
                " < tau2=" + fmt(gap.tau2) + ", margin " + fmt(gap.margin) + " vs 10x error " +
                fmt(10.0 * gap.error_estimate));
}

}  // namespace

int main() {
    std::printf("acceptance suite (tolerances pinned in code)\n");

    criterion_1_kummer_oracle();
    criterion_2_morse_index();
    criterion_3_singular();
    criterion_4_oscillation_vs_monotone();

    // Shared sweeps for criteria 5, 6, 9.  The d = 7 trend set is the pinned
    // {0.4, 0.2, 0.1, 0.05}; smaller omegas extend the computed range for the
    // gate at the smallest computed omega.
    const SweepData d7 =
        run_sweep(7, {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125, 0.005}, 8192);
    const GreenData gd3 = solve_green(3, RadialGrid::log_spaced(3, 1e-4, 9.0, 4096));
    const SweepData d3 = run_sweep(3, {1.2, 1.1, 1.05, 1.025}, 8192);

    criterion_5_critical_law_d7(d7);
    criterion_6_critical_law_d3(d3, gd3);
    criterion_7_green();
    criterion_8_nonexistence();
    criterion_9_energy_ordering(d7, d3);
    criterion_10_oracle_algebra();
    criterion_11_nondegeneracy();

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
