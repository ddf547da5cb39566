// Batch driver for the stationary trapped-condensate laboratory: every
// computation is a subcommand with machine-readable CSV (canonical) or JSON
// output.  Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpelab/asymptotics.hpp"
#include "gpelab/bubble.hpp"
#include "gpelab/errors.hpp"
#include "gpelab/green.hpp"
#include "gpelab/shooting.hpp"
#include "gpelab/spectral.hpp"
#include "gpelab/version.hpp"
#include "output.hpp"

namespace {

using namespace gpelab;

struct RunConfig {
    std::string subcommand;
    int d = 5;
    double omega = 2.0;
    std::vector<double> omega_list;
    std::vector<double> b_list;
    std::size_t grid_n = 4096;
    double r_min = 1e-4;
    double r_max = 9.0;
    double r0 = 1e-4;
    double tol = 1e-12;
    std::string out;
    std::string profile_out;
    std::string format = "csv";
    std::string in_dir;

    std::string canonical() const {
        std::ostringstream os;
        os << subcommand << "|d=" << d << "|omega=" << cli::fmt17(omega) << "|omegas=";
        for (double x : omega_list) os << cli::fmt17(x) << ";";
        os << "|bs=";
        for (double x : b_list) os << cli::fmt17(x) << ";";
        os << "|n=" << grid_n << "|rmin=" << cli::fmt17(r_min) << "|rmax=" << cli::fmt17(r_max)
           << "|r0=" << cli::fmt17(r0) << "|tol=" << cli::fmt17(tol) << "|fmt=" << format;
        return os.str();
    }
};

void stamp(cli::Table& t, const RunConfig& cfg) {
    t.metadata.insert(t.metadata.begin(),
                      {{"tool", std::string("gpelab ") + version},
                       {"subcommand", cfg.subcommand},
                       {"config_hash", cli::hex64(cli::fnv1a(cfg.canonical()))}});
}

void emit(const RunConfig& cfg, cli::Table t) {
    stamp(t, cfg);
    if (cfg.out.empty()) {
        // Console rendering mirrors the CSV body.
        for (const auto& [k, v] : t.metadata) std::cout << "# " << k << "=" << v << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            std::cout << (i ? "," : "") << t.columns[i];
        std::cout << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::cout << (i ? "," : "");
                if (row[i]) std::cout << cli::fmt17(*row[i]);
            }
            std::cout << "\n";
        }
        return;
    }
    if (cfg.format == "json")
        cli::write_json(cfg.out, t);
    else
        cli::write_csv(cfg.out, t);
}

GreenData default_green(int d) {
    return solve_green(d, RadialGrid::log_spaced(d, 1e-4, 9.0, 4096));
}

// ---------------------------------------------------------------- constants
int cmd_constants(const RunConfig& cfg) {
    const auto c = bubble_constants(cfg.d);
    cli::Table t;
    t.meta("sphere_measure", sphere_measure(cfg.d));
    t.columns = {"d",          "sobolev_S",     "U_L2_sq",  "xU_L2_sq",
                 "U_L3_cubed", "U_L73_seventhirds"};
    t.rows.push_back({static_cast<double>(cfg.d), c.sobolev_S,
                      c.norm_L2_sq ? std::optional<double>(*c.norm_L2_sq) : std::nullopt,
                      c.norm_xU_sq ? std::optional<double>(*c.norm_xU_sq) : std::nullopt,
                      c.norm_L3_cubed_d4 ? std::optional<double>(*c.norm_L3_cubed_d4)
                                         : std::nullopt,
                      c.norm_L73_d5 ? std::optional<double>(*c.norm_L73_d5) : std::nullopt});
    emit(cfg, std::move(t));
    return 0;
}

// -------------------------------------------------------------------- green
int cmd_green(const RunConfig& cfg) {
    const auto grid = RadialGrid::log_spaced(cfg.d, cfg.r_min, cfg.r_max, cfg.grid_n);
    const auto gd = solve_green(cfg.d, grid);
    double g_min = gd.G.values[0];
    for (double v : gd.G.values) g_min = std::min(g_min, v);

    cli::Table t;
    t.columns = {"d",            "omega_star", "H_at_zero", "log_coeff", "G_L2_sq",
                 "decay_sigma",  "near_c0",    "near_c1",   "G_min"};
    t.rows.push_back({static_cast<double>(cfg.d), gd.omega,
                      gd.H_at_zero ? std::optional<double>(*gd.H_at_zero) : std::nullopt,
                      gd.log_coeff_d6 ? std::optional<double>(*gd.log_coeff_d6) : std::nullopt,
                      gd.G_L2_sq ? std::optional<double>(*gd.G_L2_sq) : std::nullopt,
                      gd.decay_sigma, gd.near_origin_c0, gd.near_origin_c1, g_min});
    emit(cfg, std::move(t));

    if (!cfg.profile_out.empty()) {
        RunConfig pcfg = cfg;
        pcfg.out = cfg.profile_out;
        cli::Table p;
        p.columns = {"r", "G", "H"};
        for (std::size_t i = 0; i < grid.size(); ++i)
            p.rows.push_back({grid[i], gd.G.values[i], gd.H.values[i]});
        emit(pcfg, std::move(p));
    }
    return 0;
}

// ------------------------------------------------------------------- ground
int cmd_ground(const RunConfig& cfg) {
    ShootOptions opt;
    opt.grid_n = cfg.grid_n;
    opt.rel_tol = cfg.tol;
    const auto sol = find_ground_state(cfg.d, cfg.omega, opt);
    const double eps = extract_eps(sol);
    const auto e = energy_level_detail(sol);
    const double S = sobolev_constant(cfg.d);

    cli::Table t;
    t.columns = {"d",        "omega",   "b",           "eps",      "I_omega",
                 "S_minus_I", "residual", "tail_mismatch", "certified"};
    t.rows.push_back({static_cast<double>(cfg.d), cfg.omega, sol.b, eps, e.value,
                      S - e.value, sol.ode_residual, sol.tail_mismatch,
                      sol.decay_certified ? 1.0 : 0.0});
    emit(cfg, std::move(t));
    return 0;
}

// -------------------------------------------------------------- sweep-omega
int cmd_sweep_omega(const RunConfig& cfg) {
    if (cfg.omega_list.empty()) throw DomainError("sweep-omega: --omega-list required");
    const auto bub = bubble_constants(cfg.d);
    std::optional<GreenData> green;
    if (cfg.d <= 5) green = default_green(cfg.d);
    const auto laws = target_constants(cfg.d, green ? &*green : nullptr, bub);

    ShootOptions opt;
    opt.grid_n = cfg.grid_n;
    opt.rel_tol = cfg.tol;

    cli::Table t;
    t.meta("sobolev_S", bub.sobolev_S);
    t.meta("law_kind", to_string(laws.kind));
    t.meta("eps_constant", laws.eps_constant);
    t.meta("energy_constant", laws.energy_constant);
    if (green && green->H_at_zero) t.meta("H_at_zero", *green->H_at_zero);
    if (green && green->G_L2_sq) t.meta("G_L2_sq", *green->G_L2_sq);
    t.columns = {"d",   "omega",        "b",
                 "eps", "I_omega",      "S_minus_I",
                 "ratio_to_law", "energy_ratio_to_law", "remainder_norm"};
    for (double om : cfg.omega_list) {
        const auto sol = find_ground_state(cfg.d, om, opt);
        const double eps = extract_eps(sol);
        const auto e = energy_level_detail(sol);
        const double gap = bub.sobolev_S - e.value;
        double eps_ratio;
        if (laws.kind == LawKind::d4_log)
            eps_ratio = om * std::abs(std::log(eps)) / laws.eps_constant;
        else
            eps_ratio = eps / laws.eps_law(om);
        t.rows.push_back({static_cast<double>(cfg.d), om, sol.b, eps, e.value, gap,
                          eps_ratio, gap / laws.energy_law(om), remainder_norm(sol)});
    }
    emit(cfg, std::move(t));
    return 0;
}

// ----------------------------------------------------------------- singular
int cmd_singular(const RunConfig& cfg) {
    SingularOptions opt;
    opt.r0 = cfg.r0;
    opt.grid_n = cfg.grid_n;
    opt.rel_tol = cfg.tol;
    const auto s = find_singular(cfg.d, opt);
    cli::Table t;
    t.columns = {"d",     "omega_inf", "inner_constant", "r0",
                 "omega_r0_delta", "residual",  "r_clean",        "certified"};
    t.rows.push_back({static_cast<double>(cfg.d), s.omega_inf, s.inner_constant, s.r0,
                      s.omega_r0_delta, s.ode_residual, s.r_clean,
                      s.decay_certified ? 1.0 : 0.0});
    emit(cfg, std::move(t));
    return 0;
}

// ------------------------------------------------------------------ sweep-b
int cmd_sweep_b(const RunConfig& cfg) {
    if (cfg.b_list.empty()) throw DomainError("sweep-b: --b-list required");
    SingularOptions sopt;
    sopt.r0 = cfg.r0;
    sopt.rel_tol = cfg.tol;
    const auto sing = find_singular(cfg.d, sopt);
    ShootOptions opt;
    opt.rel_tol = cfg.tol;
    const auto pts = sweep_b(cfg.d, cfg.b_list, opt);

    cli::Table t;
    t.meta("omega_inf", sing.omega_inf);
    t.columns = {"d", "b", "omega_b", "omega_inf", "delta", "failed"};
    std::size_t failures = 0;
    for (const auto& p : pts) {
        if (p.omega_b) {
            t.rows.push_back({static_cast<double>(cfg.d), p.b, *p.omega_b, sing.omega_inf,
                              *p.omega_b - sing.omega_inf, 0.0});
        } else {
            ++failures;
            t.rows.push_back({static_cast<double>(cfg.d), p.b, std::nullopt, sing.omega_inf,
                              std::nullopt, 1.0});
            std::cerr << "sweep-b: b=" << p.b << ": " << p.diagnostic << "\n";
        }
    }
    emit(cfg, std::move(t));
    return failures == pts.size() && !pts.empty() ? 3 : 0;
}

// -------------------------------------------------------------------- morse
int cmd_morse(const RunConfig& cfg) {
    SingularOptions sopt;
    sopt.r0 = cfg.r0;
    sopt.rel_tol = cfg.tol;
    const auto sing = find_singular(cfg.d, sopt);
    const auto rep = morse_index(sing);

    cli::Table t;
    if (rep.unbounded)
        t.meta("unbounded", "true");
    else
        t.meta("morse_index", cli::fmt17(static_cast<double>(*rep.morse_index)));
    if (rep.tau.size() >= 2) {
        t.meta("tau1", rep.tau[0]);
        t.meta("tau2", rep.tau[1]);
        t.meta("tau_err", rep.tau_err);
        const auto gap = nondegeneracy_gap(rep);
        t.meta("gap_margin", gap.margin);
        t.meta("gap_error_estimate", gap.error_estimate);
        t.meta("nondegenerate",
               gap.verdict == GapVerdict::nondegenerate ? "true" : "inconclusive");
    }
    t.columns = {"d", "omega_inf", "count", "r_min", "r_max", "n"};
    for (const auto& e : rep.refinement_trace)
        t.rows.push_back({static_cast<double>(cfg.d), rep.omega_inf,
                          static_cast<double>(e.count), e.r_min, e.r_max,
                          static_cast<double>(e.n)});
    emit(cfg, std::move(t));
    return 0;
}

// ------------------------------------------------------------------- kummer
int cmd_kummer(const RunConfig& cfg) {
    const auto spec = kummer_spec(cfg.d);
    cli::Table t;
    if (spec.l_plus) {
        t.meta("l_plus", *spec.l_plus);
        t.meta("l_minus", *spec.l_minus);
    }
    if (spec.alpha_osc) t.meta("alpha_osc", *spec.alpha_osc);
    t.meta("beta_osc", spec.beta_osc);
    t.columns = {"d", "n", "sigma_n"};
    for (std::size_t n = 0; n < spec.sigma.size(); ++n)
        t.rows.push_back({static_cast<double>(cfg.d), static_cast<double>(n), spec.sigma[n]});
    emit(cfg, std::move(t));
    return 0;
}

// ------------------------------------------------------------------- report
struct CriterionRow {
    std::string id;
    std::string status;  // pass / fail / skipped
    std::string measured;
    std::string target;
};

int cmd_report(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.in_dir.empty()) throw DomainError("report: --in directory required");
    const fs::path dir = cfg.in_dir;
    if (!fs::is_directory(dir)) {
        std::cerr << "report: missing input directory " << dir << "\n";
        return 2;
    }
    std::vector<CriterionRow> rows;
    bool corrupted = false;

    const auto load = [&](const std::string& name) -> std::optional<cli::ParsedCsv> {
        const fs::path p = dir / name;
        if (!fs::exists(p)) return std::nullopt;
        try {
            return cli::read_csv(p);
        } catch (const std::exception& e) {
            std::cerr << "report: " << e.what() << "\n";
            corrupted = true;
            return std::nullopt;
        }
    };
    const auto add = [&](const std::string& id, bool pass, const std::string& measured,
                         const std::string& target) {
        rows.push_back({id, pass ? "pass" : "fail", measured, target});
    };
    const auto skip = [&](const std::string& id, const std::string& why) {
        rows.push_back({id, "skipped", "", why});
    };

    // 1: exact-spectrum oracle, evaluated live (runtime: seconds).
    {
        bool ok = true;
        double worst = 0.0;
        for (int d : {13, 16, 20}) {
            const auto spec = kummer_spec(d);
            const double rmax = std::sqrt(spec.sigma[3]) + 6.0;
            const auto g1 = gpelab::detail::level_grid(d, 1e-5, rmax, 0.02);
            const auto g2 = gpelab::detail::level_grid(d, 1e-5, rmax, 0.01);
            const auto t1 = limiting_operator(d, g1);
            const auto t2 = limiting_operator(d, g2);
            for (std::size_t n = 0; n < 4; ++n) {
                const double e1 = eigenvalue_by_count(t1, n + 1, 1e-10);
                const double e2 = eigenvalue_by_count(t2, n + 1, 1e-10);
                const double rich = (4.0 * e2 - e1) / 3.0;
                const double rel = std::abs(rich - spec.sigma[n]) / spec.sigma[n];
                worst = std::max(worst, rel);
                ok = ok && rel <= 0.005;
            }
        }
        add("1-kummer-oracle", ok, "max rel err " + cli::fmt17(worst), "<= 0.005");
    }

    // 2: Morse index per dimension from morse_d*.csv.
    {
        const std::map<int, std::pair<int, int>> expect = {
            {5, {-1, -1}},  {8, {-1, -1}},  {12, {-1, -1}}, {13, {1, 2}},
            {14, {1, 2}},   {15, {1, 2}},   {16, {1, 1}},   {20, {1, 1}}};
        for (const auto& [d, range] : expect) {
            const auto csv = load("morse_d" + std::to_string(d) + ".csv");
            if (!csv) {
                skip("2-morse-d" + std::to_string(d), "morse_d*.csv not present");
                continue;
            }
            if (range.first < 0) {
                bool ok = csv->metadata.count("unbounded") > 0;
                std::size_t prev = 0;
                for (std::size_t i = 0; i < 4 && i < csv->rows.size(); ++i) {
                    const auto c = csv->rows[i][csv->col("count")];
                    if (i > 0 && (!c || static_cast<std::size_t>(*c) <= prev)) ok = false;
                    if (c) prev = static_cast<std::size_t>(*c);
                }
                add("2-morse-d" + std::to_string(d), ok, "unbounded trace",
                    "count strictly grows");
            } else {
                const auto it = csv->metadata.find("morse_index");
                bool ok = it != csv->metadata.end();
                int m = ok ? static_cast<int>(std::stod(it->second)) : -1;
                ok = ok && m >= range.first && m <= range.second;
                add("2-morse-d" + std::to_string(d), ok,
                    ok ? "index " + std::to_string(m) : "missing",
                    "[" + std::to_string(range.first) + "," + std::to_string(range.second) +
                        "]");
            }
        }
    }

    // 3: singular profiles.
    for (int d : {8, 13, 16}) {
        const auto csv = load("singular_d" + std::to_string(d) + ".csv");
        if (!csv) {
            skip("3-singular-d" + std::to_string(d), "singular_d*.csv not present");
            continue;
        }
        const auto& row = csv->rows.at(0);
        const double om = *row[csv->col("omega_inf")];
        const double delta = *row[csv->col("omega_r0_delta")];
        const bool cert = *row[csv->col("certified")] == 1.0;
        const bool ok = om > d - 4 && om < d && delta < 1e-6 && cert;
        add("3-singular-d" + std::to_string(d), ok, "omega_inf " + cli::fmt17(om),
            "in (d-4, d), r0-stable, certified");
    }

    // 4: oscillation vs monotonicity of the quartic family.
    {
        const auto osc = load("sweep_b_d8.csv");
        if (!osc) {
            skip("4-oscillation-d8", "sweep_b_d8.csv not present");
        } else {
            int changes = 0, prev = 0;
            for (const auto& row : osc->rows) {
                const auto delta = row[osc->col("delta")];
                if (!delta) continue;
                const int s = *delta > 0 ? 1 : -1;
                if (prev != 0 && s != prev) ++changes;
                prev = s;
            }
            add("4-oscillation-d8", changes >= 3, std::to_string(changes) + " sign changes",
                ">= 3");
        }
        const auto mono = load("sweep_b_d16.csv");
        if (!mono) {
            skip("4-monotone-d16", "sweep_b_d16.csv not present");
        } else {
            int changes = 0, prev = 0;
            bool decreasing = true;
            double prev_abs = 1e300;
            const std::size_t half = mono->rows.size() / 2;
            for (std::size_t i = 0; i < mono->rows.size(); ++i) {
                const auto delta = mono->rows[i][mono->col("delta")];
                if (!delta) {
                    decreasing = false;
                    continue;
                }
                const int s = *delta > 0 ? 1 : -1;
                if (prev != 0 && s != prev) ++changes;
                prev = s;
                if (i >= half) {
                    if (std::abs(*delta) >= prev_abs) decreasing = false;
                    prev_abs = std::abs(*delta);
                }
            }
            add("4-monotone-d16", changes == 0 && decreasing,
                std::to_string(changes) + " sign changes", "0 changes, |delta| decreasing");
        }
    }

    // 5 and 9 on the d = 7 sweep; 6 and 9 on the d = 3 sweep.
    const auto check_sweep = [&](int d, double lo, double hi, bool square_ratio) {
        const auto csv = load("sweep_omega_d" + std::to_string(d) + ".csv");
        const std::string tag = std::to_string(d);
        if (!csv) {
            skip((d == 7 ? std::string("5-law-d") : std::string("6-law-d")) + tag,
                 "sweep_omega_d*.csv not present");
            skip("9-ordering-d" + tag, "sweep_omega_d*.csv not present");
            return;
        }
        const double S = std::stod(csv->metadata.at("sobolev_S"));
        bool ordering = true;
        double prev_gap = 1e300;
        double last_ratio = 0.0, last_energy_ratio = 0.0;
        bool monotone = true;
        double prev_excess = 1e300;
        for (const auto& row : csv->rows) {
            const double I = *row[csv->col("I_omega")];
            const double gap = *row[csv->col("S_minus_I")];
            ordering = ordering && I > 0.0 && I < S && gap < prev_gap;
            prev_gap = gap;
            double ratio = *row[csv->col("ratio_to_law")];
            if (square_ratio) ratio *= ratio;
            if (std::abs(ratio - 1.0) > prev_excess + 1e-12) monotone = false;
            prev_excess = std::abs(ratio - 1.0);
            last_ratio = ratio;
            last_energy_ratio = *row[csv->col("energy_ratio_to_law")];
        }
        add((d == 7 ? "5-law-d" : "6-law-d") + tag,
            last_ratio >= lo && last_ratio <= hi && monotone, "ratio " + cli::fmt17(last_ratio),
            "[" + cli::fmt17(lo) + ", " + cli::fmt17(hi) + "], monotone trend");
        if (d == 7)
            add("5-energy-d7", last_energy_ratio >= 0.9 && last_energy_ratio <= 1.1,
                "ratio " + cli::fmt17(last_energy_ratio), "[0.9, 1.1]");
        add("9-ordering-d" + tag, ordering, "0 < I < S, gap decreasing", "strict");
    };
    check_sweep(7, 0.95, 1.05, true);
    check_sweep(3, 0.90, 1.10, false);

    // 6: H(0) for d = 3.
    {
        const auto csv = load("green_d3.csv");
        if (!csv) {
            skip("6-H0-d3", "green_d3.csv not present");
        } else {
            const double h0 = *csv->rows.at(0)[csv->col("H_at_zero")];
            add("6-H0-d3", std::abs(h0) <= 1e-4, "H(0) " + cli::fmt17(h0), "|H(0)| <= 1e-4");
        }
    }

    // 7: regular part of the Green function across dimensions.
    for (int d : {4, 5, 6}) {
        const auto csv = load("green_d" + std::to_string(d) + ".csv");
        if (!csv) {
            skip("7-green-d" + std::to_string(d), "green_d*.csv not present");
            continue;
        }
        const auto& row = csv->rows.at(0);
        const double sigma = *row[csv->col("decay_sigma")];
        const double gmin = *row[csv->col("G_min")];
        bool ok = sigma > 0.0 && gmin > 0.0;
        std::string measured = "sigma " + cli::fmt17(sigma);
        if (d == 6) {
            const double lc = *row[csv->col("log_coeff")];
            ok = ok && std::abs(lc + 0.25) <= 0.01;
            measured += ", log coeff " + cli::fmt17(lc);
        } else {
            const double h0 = *row[csv->col("H_at_zero")];
            ok = ok && h0 > 0.0;
            measured += ", H(0) " + cli::fmt17(h0);
        }
        add("7-green-d" + std::to_string(d), ok, measured,
            d == 6 ? "G > 0, sigma > 0, log coeff -0.25 +- 0.01"
                   : "G > 0, sigma > 0, H(0) > 0");
    }

    // 8: nonexistence, evaluated live through the bracket scan.
    {
        const auto expect_reason = [&](int d, double om, NoSolutionReason want) {
            try {
                find_ground_state(d, om);
                return false;
            } catch (const NoSolutionError& e) {
                return e.reason == want;
            }
        };
        const bool ok =
            expect_reason(5, 5.5, NoSolutionReason::omega_at_or_above_first_eigenvalue) &&
            expect_reason(3, 0.5, NoSolutionReason::omega_below_threshold_d3) &&
            expect_reason(5, -1.0, NoSolutionReason::omega_nonpositive);
        add("8-nonexistence", ok, "three NoSolution reasons", "as classified");
    }

    // 10 is exercised by the acceptance suite's independent oracles.
    skip("10-oracle-algebra", "covered by the acceptance test binary");

    // 11: nondegeneracy gap at d = 16 from morse_d16.csv metadata.
    {
        const auto csv = load("morse_d16.csv");
        if (!csv) {
            skip("11-nondegeneracy-d16", "morse_d16.csv not present");
        } else {
            const bool ok = csv->metadata.count("nondegenerate") &&
                            csv->metadata.at("nondegenerate") == "true";
            add("11-nondegeneracy-d16", ok,
                csv->metadata.count("gap_margin") ? "margin " + csv->metadata.at("gap_margin")
                                                  : "missing",
                "tau1 < omega_inf < tau2, margin >= 10x error");
        }
    }

    if (corrupted) return 2;

    std::ostringstream body;
    body << "criterion,status,measured,target\n";
    bool any_fail = false;
    for (const auto& r : rows) {
        body << r.id << "," << r.status << "," << r.measured << "," << r.target << "\n";
        if (r.status == "fail") any_fail = true;
        std::cout << r.id << ": " << r.status
                  << (r.measured.empty() ? "" : " (" + r.measured + ")") << "\n";
    }
    if (!cfg.out.empty()) {
        std::string head = "# tool=gpelab " + std::string(version) + "\n# subcommand=report\n" +
                           "# config_hash=" + cli::hex64(cli::fnv1a(cfg.canonical())) + "\n";
        cli::write_atomically(cfg.out, head + body.str());
    }
    return any_fail ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for trapped condensate ground states, "
                 "singular profiles, and their spectra"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file with defaults (flags override)");
        sub->add_option("--d", cfg.d, "ambient dimension");
        sub->add_option("--grid-n", cfg.grid_n, "grid size (>= 64)");
        sub->add_option("--r-min", cfg.r_min, "inner grid radius");
        sub->add_option("--r-max", cfg.r_max, "outer grid radius");
        sub->add_option("--tol", cfg.tol, "integrator relative tolerance");
        sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
        sub->add_option("--format", cfg.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* c_constants = app.add_subcommand("constants", "closed-form bubble constants");
    add_common(c_constants);
    auto* c_green = app.add_subcommand("green", "Green function and regular part");
    add_common(c_green);
    c_green->add_option("--profile-out", cfg.profile_out, "also write r,G,H samples");
    auto* c_ground = app.add_subcommand("ground", "critical ground state at one omega");
    add_common(c_ground);
    c_ground->add_option("--omega", cfg.omega, "frequency");
    auto* c_sweep_omega = app.add_subcommand("sweep-omega", "ground states along omega");
    add_common(c_sweep_omega);
    c_sweep_omega->add_option("--omega-list", cfg.omega_list, "frequencies")->delimiter(',');
    auto* c_singular = app.add_subcommand("singular", "singular quartic profile");
    add_common(c_singular);
    c_singular->add_option("--r0", cfg.r0, "inner start radius in [1e-4, 1e-2]");
    auto* c_sweep_b = app.add_subcommand("sweep-b", "quartic family along b");
    add_common(c_sweep_b);
    c_sweep_b->add_option("--b-list", cfg.b_list, "central amplitudes")->delimiter(',');
    c_sweep_b->add_option("--r0", cfg.r0, "inner start radius for omega_inf");
    auto* c_morse = app.add_subcommand("morse", "Morse index with refinement trace");
    add_common(c_morse);
    c_morse->add_option("--r0", cfg.r0, "inner start radius for the singular profile");
    auto* c_kummer = app.add_subcommand("kummer", "exact spectrum of the limiting operator");
    add_common(c_kummer);
    auto* c_report = app.add_subcommand("report", "aggregate acceptance checks from outputs");
    add_common(c_report);
    c_report->add_option("--in", cfg.in_dir, "directory with prior outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();

    try {
        // Config file fills every value not set on the command line.
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw DomainError("cannot open config " + config_path);
            nlohmann::json j;
            in >> j;
            const auto take = [&](const char* flag, const char* key, auto& target) {
                const auto* opt = sub->get_option_no_throw(flag);
                const bool given = opt != nullptr && opt->count() > 0;
                if (!given && j.contains(key)) j.at(key).get_to(target);
            };
            take("--d", "d", cfg.d);
            take("--omega", "omega", cfg.omega);
            take("--omega-list", "omega_list", cfg.omega_list);
            take("--b-list", "b_list", cfg.b_list);
            take("--grid-n", "grid_n", cfg.grid_n);
            take("--r-min", "r_min", cfg.r_min);
            take("--r-max", "r_max", cfg.r_max);
            take("--r0", "r0", cfg.r0);
            take("--tol", "tol", cfg.tol);
            take("--out", "out", cfg.out);
            take("--format", "format", cfg.format);
            take("--in", "in", cfg.in_dir);
        }
        if (cfg.grid_n < 64) throw DomainError("grid size must be >= 64");
        if (!(cfg.tol > 0.0)) throw DomainError("tolerances must be positive");

        if (cfg.subcommand == "constants") return cmd_constants(cfg);
        if (cfg.subcommand == "green") return cmd_green(cfg);
        if (cfg.subcommand == "ground") return cmd_ground(cfg);
        if (cfg.subcommand == "sweep-omega") return cmd_sweep_omega(cfg);
        if (cfg.subcommand == "singular") return cmd_singular(cfg);
        if (cfg.subcommand == "sweep-b") return cmd_sweep_b(cfg);
        if (cfg.subcommand == "morse") return cmd_morse(cfg);
        if (cfg.subcommand == "kummer") return cmd_kummer(cfg);
        if (cfg.subcommand == "report") return cmd_report(cfg);
        throw DomainError("unknown subcommand");
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
