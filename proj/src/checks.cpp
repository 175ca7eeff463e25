#include "rydrep/checks.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rydrep/bell.hpp"
#include "rydrep/mc.hpp"
#include "rydrep/phase_match.hpp"
#include "rydrep/pulse.hpp"
#include "rydrep/rates.hpp"
#include "rydrep/rng.hpp"

namespace rydrep {

namespace {

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

bool within(double value, double reference, double rel_tol) {
    return std::abs(value - reference) <= rel_tol * std::abs(reference);
}

void check_value(CheckResult& result, const std::string& label, double value, double reference,
                 double rel_tol) {
    bool ok = within(value, reference, rel_tol);
    if (!ok) result.pass = false;
    result.details.push_back(fmt("%s %s: computed %.6g, expected %.6g (tol %.2g%%)",
                                 ok ? "ok" : "FAIL", label.c_str(), value, reference,
                                 100.0 * rel_tol));
}

CheckResult headline_rates() {
    CheckResult result{1, "two-node headline rates", true, true, {}};
    auto cons = conservative_preset().values;
    auto opt = optimistic_preset().values;
    check_value(result, "conservative generation rate [Hz]", two_node_generation(cons).rate, 24.9,
                0.02);
    check_value(result, "conservative teleportation rate [Hz]", two_node_teleportation(cons).rate,
                4.78, 0.02);
    check_value(result, "optimistic generation rate [Hz]", two_node_generation(opt).rate, 7810.0,
                0.03);
    check_value(result, "optimistic teleportation rate [Hz]", two_node_teleportation(opt).rate,
                3540.0, 0.03);
    result.details.push_back("reference figures: 25 Hz, ~5 Hz, 7.8 kHz, 3.6 kHz");
    return result;
}

CheckResult repetition_limits() {
    CheckResult result{2, "repetition-rate limits", true, true, {}};
    auto params = conservative_preset().values;
    check_value(result, "max repetition rate at d=0 [Hz]", max_rep_rate(params), 142.9e3, 0.005);
    params.d = 10e3;
    check_value(result, "round-trip light limit at 10 km [Hz]", light_limited_rate(params), 10e3,
                1e-9);
    check_value(result, "protocol-inclusive ceiling at 10 km [Hz]", max_rep_rate(params), 10e3,
                0.10);
    result.details.push_back("reference figures: 140 kHz and 10 kHz");
    return result;
}

CheckResult preparation_ratio() {
    CheckResult result{3, "rate ratio against the 12-step preparation", true, true, {}};
    check_value(result, "conservative ratio", twelve_step_rate_ratio(conservative_preset().values), 19.4,
                0.02);
    check_value(result, "optimistic ratio", twelve_step_rate_ratio(optimistic_preset().values), 5.26,
                0.02);
    result.details.push_back("reference figures: ~20 and 5");
    return result;
}

CheckResult protocol_algebra() {
    CheckResult result{4, "protocol algebra", true, true, {}};

    Table1Run table1 = run_table1(1, 0, Convention::table);
    if (table1.first_mismatch >= 0) {
        result.pass = false;
        result.details.push_back(
            fmt("FAIL table1 row mismatch at step %d", table1.first_mismatch));
    } else {
        result.details.push_back("ok every table1 row matched");
    }

    Rng rng(20240708);
    int checked_runs = 0;
    double worst = 1.0;
    for (int trial = 0; trial < 100; ++trial) {
        double x0 = rng.next_double() * 2.0 - 1.0;
        double x1 = rng.next_double() * 2.0 - 1.0;
        double x2 = rng.next_double() * 2.0 - 1.0;
        double x3 = rng.next_double() * 2.0 - 1.0;
        Complex alpha(x0, x1);
        Complex beta(x2, x3);
        double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
        TargetQubit target(alpha / norm, beta / norm);
        for (Convention convention : {Convention::table, Convention::rabi}) {
            for (OutcomePair outcome : {OutcomePair{QubitLabel::u, QubitLabel::u},
                                        OutcomePair{QubitLabel::u, QubitLabel::d},
                                        OutcomePair{QubitLabel::d, QubitLabel::u},
                                        OutcomePair{QubitLabel::d, QubitLabel::d}}) {
                StateVector pair = StateVector::from_terms(
                    2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), 1.0 / std::numbers::sqrt2},
                        {BasisKet(2).with(0, Mode::d).with(1, Mode::d), 1.0 / std::numbers::sqrt2}});
                auto record = run_table2_teleport(pair, 0, 1, target, convention, outcome, nullptr,
                                                  convention == Convention::table);
                worst = std::min(worst, record.fidelity_to_target);
                if (record.first_mismatch >= 0) {
                    result.pass = false;
                    result.details.push_back(
                        fmt("FAIL table2 row mismatch at step %d", record.first_mismatch));
                }
                ++checked_runs;
            }
        }
    }
    bool fidelity_ok = worst >= 1.0 - 1e-9;
    if (!fidelity_ok) result.pass = false;
    result.details.push_back(fmt("%s teleportation fidelity over %d runs: worst %.12f",
                                 fidelity_ok ? "ok" : "FAIL", checked_runs, worst));
    return result;
}

CheckResult bell_analyzer() {
    CheckResult result{5, "Bell analyzer branch structure", true, true, {}};
    StateVector joint = make_joint_table1(2, 0, 1, Convention::table);
    auto branches = analyze(joint);

    double useful = 0.0;
    double lost = 0.0;
    bool patterns_ok = true;
    bool projections_ok = true;
    StateVector bell_plus = StateVector::from_terms(
        2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), 1.0 / std::numbers::sqrt2},
            {BasisKet(2).with(0, Mode::d).with(1, Mode::d), 1.0 / std::numbers::sqrt2}});
    StateVector bell_minus = StateVector::from_terms(
        2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), 1.0 / std::numbers::sqrt2},
            {BasisKet(2).with(0, Mode::d).with(1, Mode::d), -1.0 / std::numbers::sqrt2}});
    for (const auto& branch : branches) {
        if (branch.outcome.kind == Herald::lost) {
            lost += branch.outcome.probability;
            continue;
        }
        useful += branch.outcome.probability;
        if (std::abs(branch.outcome.probability - 0.125) > 1e-12) patterns_ok = false;
        const StateVector& reference =
            branch.outcome.kind == Herald::phi_plus ? bell_plus : bell_minus;
        if (std::abs(fidelity(reference, branch.projected) - 1.0) > 1e-9) projections_ok = false;
    }
    bool useful_ok = std::abs(useful - 0.5) <= 1e-12;
    bool total_ok = std::abs(useful + lost - 1.0) <= 1e-12;
    result.pass = useful_ok && total_ok && patterns_ok && projections_ok;
    result.details.push_back(fmt("%s useful-herald probability %.15f (expected 0.5)",
                                 useful_ok ? "ok" : "FAIL", useful));
    result.details.push_back(fmt("%s each useful pattern at probability 1/8",
                                 patterns_ok ? "ok" : "FAIL"));
    result.details.push_back(fmt("%s heralded projections match the +/- Bell states",
                                 projections_ok ? "ok" : "FAIL"));
    result.details.push_back(fmt("%s branch probabilities sum to 1 (%.15f)",
                                 total_ok ? "ok" : "FAIL", useful + lost));
    return result;
}

CheckResult phase_matching() {
    CheckResult result{6, "phase-matched emission enhancement", false, true, {}};
    const int atoms = 2000;
    AtomCloud cloud = sample_cloud(atoms, 10e-6, 991);
    WaveVectorSet kset = default_wave_vector_set();
    auto enhancement = enhancement_ratio(cloud, kset, 1000, 992);
    bool matched_ok = within(enhancement.matched_amplitude, atoms, 1e-6);
    bool ratio_ok = enhancement.ratio >= 0.5 * atoms && enhancement.ratio <= 2.0 * atoms;
    result.pass = matched_ok && ratio_ok;
    result.details.push_back(fmt("%s phase-matched amplitude %.6f (= atom count)",
                                 matched_ok ? "ok" : "FAIL", enhancement.matched_amplitude));
    result.details.push_back(fmt("%s enhancement ratio %.1f within [%.0f, %.0f]",
                                 ratio_ok ? "ok" : "FAIL", enhancement.ratio, 0.5 * atoms,
                                 2.0 * atoms));
    return result;
}

CheckResult mc_vs_analytic() {
    CheckResult result{7, "Monte Carlo against analytic recursions", true, true, {}};
    auto cons = conservative_preset().values;
    auto opt = optimistic_preset().values;

    auto make_config = [](const EfficiencyParams& params, Scheme scheme, int n, int k,
                          std::uint64_t seed) {
        TrialConfig config;
        config.params = params;
        config.scheme = scheme;
        config.n = n;
        config.k = k;
        config.trials = 100000;
        config.seed = seed;
        return config;
    };
    struct Case {
        const char* label;
        TrialConfig config;
    };
    std::vector<Case> cases = {
        {"two_node_gen conservative", make_config(cons, Scheme::two_node_gen, 1, 0, 101)},
        {"two_node_teleport optimistic", make_config(opt, Scheme::two_node_teleport, 1, 0, 102)},
        {"chain_gen n=3 optimistic", make_config(opt, Scheme::chain_gen, 3, 0, 103)},
        {"chain_teleport n=2 optimistic", make_config(opt, Scheme::chain_teleport, 2, 0, 104)},
        {"end_to_end n=2 optimistic", make_config(opt, Scheme::end_to_end_teleport, 2, 0, 105)},
        {"nested_swap k=1 conservative", make_config(cons, Scheme::nested_swap, 1, 1, 106)},
    };
    for (const auto& test_case : cases) {
        TrialStats stats = simulate(test_case.config);
        auto report = compare_to_analytic(stats, analytic_for_config(test_case.config));
        if (!report.pass) result.pass = false;
        result.details.push_back(fmt("%s %s: mc %.6g s vs analytic %.6g s (z=%.2f, dev %.2f%%)",
                                     report.pass ? "ok" : "FAIL", test_case.label, report.mc_mean,
                                     report.analytic_mean, report.z_score,
                                     100.0 * report.relative_deviation));
    }

    TrialConfig chi_config = make_config(opt, Scheme::two_node_gen, 1, 0, 107);
    TrialStats chi_stats = simulate(chi_config);
    auto chi = chi_square_geometric(chi_stats.attempts_histogram, opt.P_G(), chi_config.trials);
    if (!chi.pass) result.pass = false;
    result.details.push_back(
        fmt("%s attempt counts vs Geometric(P_G): chi2 %.2f, dof %d, 1%% critical %.2f",
            chi.pass ? "ok" : "FAIL", chi.statistic, chi.dof, chi.critical_1pct));
    return result;
}

CheckResult nested_swap_factor() {
    CheckResult result{8, "nested-swap waiting factor", false, true, {}};
    auto cons = conservative_preset().values;
    TrialConfig config;
    config.params = cons;
    config.scheme = Scheme::nested_swap;
    config.k = 1;
    config.trials = 100000;
    config.seed = 108;
    TrialStats stats = simulate(config);
    double base = two_node_generation(cons).mean_time;
    double factor = stats.mean_time / base;
    result.pass = factor >= 1.4 && factor <= 1.6;
    result.details.push_back(fmt("%s empirical factor %.4f within [1.4, 1.6] (model: 3/2)",
                                 result.pass ? "ok" : "FAIL", factor));
    return result;
}

CheckResult multi_node_report() {
    CheckResult result{9, "multi-node figures (documented discrepancies)", false, true, {}};
    auto cons = conservative_preset().values;
    auto opt = optimistic_preset().values;

    struct Item {
        const char* label;
        double computed;
        double frozen;  // value the formulas actually give
        const char* reference;
    };
    std::vector<Item> items = {
        {"hop-by-hop teleport, 3 nodes, optimistic [s]",
         chain_teleportation(opt, 2, SolveMethod::closed_form).mean_time, 0.0122222, "0.145"},
        {"end-to-end teleport, 3 nodes, optimistic [s]",
         end_to_end_teleportation(opt, 2, SolveMethod::closed_form).mean_time, 0.0059957, "0.034"},
        {"end-to-end teleport, 6th node, optimistic [s]",
         end_to_end_teleportation(opt, 5, SolveMethod::closed_form).mean_time, 58.30, "90"},
        {"hop-by-hop teleport, 6th node, optimistic [s]",
         chain_teleportation(opt, 5, SolveMethod::closed_form).mean_time, 1086.1, "~3600"},
        {"deterministic-swap advantage, 3 nodes, conservative",
         multi_node_generation(cons, 2, SolveMethod::closed_form).mean_time /
             deterministic_swap_generation(cons, 1).mean_time,
         4464.0, "400"},
        {"deterministic-swap advantage, 3 nodes, optimistic",
         multi_node_generation(opt, 2, SolveMethod::closed_form).mean_time /
             deterministic_swap_generation(opt, 1).mean_time,
         14.93, "100"},
    };
    for (const auto& item : items) {
        bool ok = within(item.computed, item.frozen, 0.01);
        if (!ok) result.pass = false;
        result.details.push_back(fmt("%s %s: formulas give %.6g, reference figure %s",
                                     ok ? "note" : "FAIL", item.label, item.computed,
                                     item.reference));
    }

    bool ordering_ok = true;
    for (const auto& preset : {cons, opt}) {
        for (int n = 2; n <= 10; ++n) {
            double t_hop = chain_teleportation(preset, n, SolveMethod::closed_form).mean_time;
            double t_end = end_to_end_teleportation(preset, n, SolveMethod::closed_form).mean_time;
            if (!(t_end < t_hop)) ordering_ok = false;
        }
        for (int k = 1; k <= 3; ++k) {
            double det = deterministic_swap_generation(preset, k).mean_time;
            double prob =
                multi_node_generation(preset, 1 << k, SolveMethod::closed_form).mean_time;
            if (!(det < prob)) ordering_ok = false;
        }
    }
    if (!ordering_ok) result.pass = false;
    result.details.push_back(fmt(
        "%s orderings hold: end-to-end faster than hop-by-hop (n>=2), deterministic swapping "
        "faster than photonic (n>=2)",
        ordering_ok ? "ok" : "FAIL"));
    result.details.push_back(
        "the reference multi-node figures are not reproduced by the stated formulas; "
        "computed values are reported beside them");
    return result;
}

CheckResult od_formula() {
    CheckResult result{10, "collection efficiency from optical depth", true, true, {}};
    auto pg = p_gamma_from_od(3.0);
    bool ok = std::abs(pg.value - 0.3485) <= 1e-4 && !pg.clamped;
    if (!ok) result.pass = false;
    result.details.push_back(
        fmt("%s p_gamma(OD=3) = %.6f", ok ? "ok" : "FAIL", pg.value));
    double preset_value = conservative_preset().values.P_gamma;
    bool preset_ok = preset_value == 0.3;
    if (!preset_ok) result.pass = false;
    result.details.push_back(fmt(
        "%s the conservative preset rounds this down to %.2f, as used in every headline rate",
        preset_ok ? "note" : "FAIL", preset_value));
    return result;
}

}  // namespace

std::vector<CheckResult> run_paper_checks() {
    return {
        headline_rates(), repetition_limits(), preparation_ratio(),    protocol_algebra(),
        bell_analyzer(),  phase_matching(),    mc_vs_analytic(), nested_swap_factor(),
        multi_node_report(), od_formula(),
    };
}

std::string format_check_report(const std::vector<CheckResult>& results) {
    std::ostringstream out;
    for (const auto& result : results) {
        out << (result.pass ? "PASS" : "FAIL") << " criterion " << result.id << " ["
            << (result.hard ? "hard" : "soft") << "] " << result.name << '\n';
        for (const auto& line : result.details) {
            out << "    " << line << '\n';
        }
    }
    return out.str();
}

bool all_hard_criteria_pass(const std::vector<CheckResult>& results) {
    for (const auto& result : results) {
        if (result.hard && !result.pass) return false;
    }
    return true;
}

}  // namespace rydrep
