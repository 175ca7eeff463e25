// Command-line front end: runs the pulse-level protocols on the state-vector
// engine, evaluates the closed-form rate model, drives the Monte Carlo
// retry simulator, and samples collective-emission enhancement. All outputs
// are plain CSV/JSON with an embedded run manifest; given the same inputs and
// seed, re-runs produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rydrep/bell.hpp"
#include "rydrep/checks.hpp"
#include "rydrep/config.hpp"
#include "rydrep/mc.hpp"
#include "rydrep/phase_match.hpp"
#include "rydrep/pulse.hpp"
#include "rydrep/rates.hpp"
#include "rydrep/version.hpp"

namespace {

using namespace rydrep;
using nlohmann::json;

struct Manifest {
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string output_path;

    // Timestamps are printed to stdout only, never into data files, so that
    // re-runs stay byte-identical.
    std::string csv_header() const {
        std::ostringstream out;
        out << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
        out << "# command: " << command << '\n';
        out << "# config: " << (config_path.empty() ? "none" : config_path) << '\n';
        out << "# seed: " << seed << '\n';
        out << "# output: " << (output_path.empty() ? "stdout" : output_path) << '\n';
        return out.str();
    }

    json to_json() const {
        return json{{"tool", std::string(kToolName) + " " + kToolVersion},
                    {"command", command},
                    {"config", config_path.empty() ? "none" : config_path},
                    {"seed", seed},
                    {"output", output_path.empty() ? "stdout" : output_path}};
    }
};

std::string join_args(int argc, char** argv) {
    std::ostringstream out;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) out << ' ';
        out << argv[i];
    }
    return out.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void print_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    std::cout << "run at " << buf << '\n';
}

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

Complex parse_complex(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
    return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

json params_to_json(const EfficiencyParams& p) {
    json out{{"P_R", p.P_R},     {"P_gamma", p.P_gamma}, {"P_B", p.P_B},
             {"t_o", p.t_o},     {"d", p.d},             {"c_fiber", p.c_fiber},
             {"n_G", p.n_G},     {"n_T", p.n_T},         {"n_S", p.n_S}};
    if (p.OD) out["OD"] = *p.OD;
    return out;
}

// ---------------------------------------------------------------------------
// protocol

int cmd_protocol(const std::string& script_name, const std::string& script_file,
                 const std::string& export_name, Convention convention, Complex alpha,
                 Complex beta, const std::string& outcome_text, int nodes, std::uint64_t seed,
                 const Manifest& manifest) {
    if (!export_name.empty()) {
        if (export_name == "table1") {
            write_output(manifest.output_path, table1_script(0).to_text());
        } else if (export_name == "table2") {
            write_output(manifest.output_path, table2_script(2, 0, 1, 1.0, 0.0).to_text());
        } else {
            std::cerr << "unknown script: " << export_name << '\n';
            return 2;
        }
        return 0;
    }

    std::ostringstream out;
    out << manifest.csv_header();
    int exit_code = 0;

    if (!script_file.empty()) {
        ProtocolScript script = load_script_file(script_file);
        auto run = run_script(make_vacuum(nodes), script, convention, false, true);
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
            out << "step " << i << ":\n" << run.trace[i].to_debug_string();
        }
    } else if (script_name == "table1") {
        auto run = run_table1(1, 0, convention);
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
            out << "step " << i << ":\n" << run.trace[i].to_debug_string();
        }
        if (run.first_mismatch >= 0) {
            out << "mismatch at step " << run.first_mismatch << '\n';
            exit_code = 1;
        } else if (convention == Convention::table) {
            out << "all reference rows matched\n";
        }
    } else if (script_name == "table2") {
        double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
        if (norm <= 0.0) throw std::invalid_argument("alpha and beta cannot both vanish");
        TargetQubit target(alpha / norm, beta / norm);
        StateVector pair = StateVector::from_terms(
            2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), 1.0 / std::numbers::sqrt2},
                {BasisKet(2).with(0, Mode::d).with(1, Mode::d), 1.0 / std::numbers::sqrt2}});
        auto forced = outcome_from_string(outcome_text);
        Rng rng(seed);
        auto record = run_table2_teleport(pair, 0, 1, target, convention, forced,
                                          forced ? nullptr : &rng, true, true);
        for (std::size_t i = 0; i < record.gate_trace.size(); ++i) {
            out << "step " << i << ":\n" << record.gate_trace[i].to_debug_string();
        }
        out << "outcome " << to_string(record.outcome) << " (probability "
            << fmt("%.6g", record.probability) << ")\n";
        out << "receiver state:\n" << record.state.to_debug_string();
        out << fmt("fidelity %.12f\n", record.fidelity_to_target);
        if (record.first_mismatch >= 0) {
            out << "mismatch at step " << record.first_mismatch << '\n';
            exit_code = 1;
        } else if (convention == Convention::table) {
            out << "all reference rows matched\n";
        }
        if (record.fidelity_to_target < 1.0 - 1e-9) exit_code = 1;
    } else if (script_name == "swap_chain") {
        Rng rng(seed);
        StateVector chain = run_swap_chain(nodes, convention, rng);
        out << "final state (node 0 entangled with node " << nodes - 1 << "):\n"
            << chain.to_debug_string();
    } else {
        std::cerr << "unknown script: " << script_name << '\n';
        return 2;
    }

    write_output(manifest.output_path, out.str());
    if (!manifest.output_path.empty()) std::cout << "wrote " << manifest.output_path << '\n';
    return exit_code;
}

// ---------------------------------------------------------------------------
// rates

struct SweepSpec {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;  // 0 = automatic
};

SweepSpec parse_sweep(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("sweep: expected param=lo:hi[:points]");
    SweepSpec spec;
    spec.param = text.substr(0, eq);
    std::string range = text.substr(eq + 1);
    auto colon1 = range.find(':');
    if (colon1 == std::string::npos) throw std::invalid_argument("sweep: expected lo:hi");
    spec.lo = std::stod(range.substr(0, colon1));
    std::string rest = range.substr(colon1 + 1);
    auto colon2 = rest.find(':');
    if (colon2 == std::string::npos) {
        spec.hi = std::stod(rest);
    } else {
        spec.hi = std::stod(rest.substr(0, colon2));
        spec.points = std::stoi(rest.substr(colon2 + 1));
    }
    return spec;
}

bool is_integer_param(const std::string& name) {
    return name == "n_G" || name == "n_T" || name == "n_S";
}

RateResult evaluate_scheme(const std::string& scheme, const EfficiencyParams& params, int n,
                           int k, SolveMethod method) {
    if (scheme == "two_node_gen") return two_node_generation(params);
    if (scheme == "two_node_teleport") return two_node_teleportation(params);
    if (scheme == "chain_gen") return multi_node_generation(params, n, method);
    if (scheme == "chain_teleport") return chain_teleportation(params, n, method);
    if (scheme == "end_to_end_teleport") return end_to_end_teleportation(params, n, method);
    if (scheme == "deterministic_swap") return deterministic_swap_generation(params, k);
    throw CLI::ValidationError("unknown scheme: " + scheme);
}

int cmd_rates(const std::string& preset_name, const std::string& scheme,
              const std::string& sweep_text, EfficiencyParams params, int n, int k,
              const std::string& method_name, const Manifest& manifest) {
    SolveMethod method =
        method_name == "recursion" ? SolveMethod::recursion : SolveMethod::closed_form;

    std::ostringstream out;
    out << manifest.csv_header();

    if (sweep_text.empty()) {
        RateResult result = evaluate_scheme(scheme, params, n, k, method);
        out << "param_value,rate_hz,mean_time_s,success_prob\n";
        out << fmt("0,%.10g,%.10g,%.10g\n", result.rate, result.mean_time,
                   result.success_probability);
        std::cout << preset_name << ' ' << scheme << ": "
                  << fmt("rate %.6g Hz, mean time %.6g s", result.rate, result.mean_time) << '\n';
        if (scheme == "two_node_gen") {
            std::cout << fmt("max repetition rate %.6g Hz", max_rep_rate(params)) << '\n';
            std::cout << fmt("comparison against 12-step preparation: x%.4g",
                             twelve_step_rate_ratio(params))
                      << '\n';
        }
    } else {
        SweepSpec spec = parse_sweep(sweep_text);
        int points = spec.points;
        if (points <= 0) {
            points = is_integer_param(spec.param)
                         ? static_cast<int>(spec.hi - spec.lo) + 1
                         : 26;
        }
        out << "param_value,rate_hz,mean_time_s,success_prob\n";
        for (int i = 0; i < points; ++i) {
            double value =
                points == 1 ? spec.lo : spec.lo + (spec.hi - spec.lo) * i / (points - 1);
            EfficiencyParams swept = params;
            apply_config(swept, {{spec.param, fmt("%.17g", value)}});
            RateResult result = evaluate_scheme(scheme, swept, n, k, method);
            out << fmt("%.10g,%.10g,%.10g,%.10g\n", value, result.rate, result.mean_time,
                       result.success_probability);
        }
    }

    write_output(manifest.output_path, out.str());
    if (!manifest.output_path.empty()) std::cout << "wrote " << manifest.output_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// mc

int cmd_mc(const std::string& scheme_name, EfficiencyParams params, int n, int k,
           std::uint64_t trials, double lifetime, const Manifest& manifest) {
    TrialConfig config;
    config.params = params;
    config.scheme = scheme_from_string(scheme_name);
    config.n = n;
    config.k = k;
    config.trials = trials;
    config.seed = manifest.seed;
    if (lifetime > 0.0) config.memory_lifetime = lifetime;

    TrialStats stats = simulate(config);
    RateResult analytic = analytic_for_config(config);
    ComparisonReport report = compare_to_analytic(stats, analytic);

    json record{{"manifest", manifest.to_json()},
                {"result",
                 {{"scheme", scheme_name},
                  {"params", params_to_json(params)},
                  {"n", n},
                  {"k", k},
                  {"trials", trials},
                  {"seed", manifest.seed},
                  {"mean_time_s", stats.mean_time},
                  {"std_error_s", stats.std_error},
                  {"success_fraction", stats.success_fraction}}},
                {"comparison",
                 {{"analytic_mean_s", report.analytic_mean},
                  {"z_score", report.z_score},
                  {"relative_deviation", report.relative_deviation},
                  {"pass", report.pass}}}};

    write_output(manifest.output_path, record.dump(2) + "\n");
    std::cout << fmt("%s: mc mean %.6g s (stderr %.2g), analytic %.6g s, z=%.2f -> %s",
                     scheme_name.c_str(), stats.mean_time, stats.std_error, report.analytic_mean,
                     report.z_score, report.pass ? "pass" : "FAIL")
              << '\n';
    if (stats.success_fraction < 1.0) {
        std::cout << fmt("success fraction %.4f (memory lifetime)", stats.success_fraction)
                  << '\n';
    }
    if (!manifest.output_path.empty()) std::cout << "wrote " << manifest.output_path << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// emission

int cmd_emission(int atoms, double radius, int samples, const std::string& atom_sweep,
                 const Manifest& manifest) {
    WaveVectorSet kset = default_wave_vector_set();
    std::ostringstream out;
    out << manifest.csv_header();

    if (!atom_sweep.empty()) {
        // comma-separated atom counts; the ratio should grow linearly, so the
        // log-log fit slope is reported as the summary
        std::vector<int> counts;
        std::size_t pos = 0;
        while (pos < atom_sweep.size()) {
            auto comma = atom_sweep.find(',', pos);
            if (comma == std::string::npos) comma = atom_sweep.size();
            counts.push_back(std::stoi(atom_sweep.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        out << "atoms,enhancement_ratio\n";
        double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
        for (int count : counts) {
            AtomCloud cloud = sample_cloud(count, radius, manifest.seed);
            double ratio = enhancement_ratio(cloud, kset, samples, manifest.seed + 1).ratio;
            out << fmt("%d,%.10g\n", count, ratio);
            double x = std::log(static_cast<double>(count));
            double y = std::log(ratio);
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_xy += x * y;
        }
        double n = static_cast<double>(counts.size());
        double slope = (n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x);
        write_output(manifest.output_path, out.str());
        std::cout << fmt("log-log fit of enhancement ratio vs atom number: slope %.3f "
                         "(1 = linear growth)",
                         slope)
                  << '\n';
        if (!manifest.output_path.empty()) std::cout << "wrote " << manifest.output_path << '\n';
        return 0;
    }

    AtomCloud cloud = sample_cloud(atoms, radius, manifest.seed);
    EnhancementResult result = enhancement_ratio(cloud, kset, samples, manifest.seed + 1);
    out << "direction_index,cos_angle_from_k_tot,amplitude\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        out << fmt("%zu,%.10g,%.10g\n", i, result.samples[i].cos_angle,
                   result.samples[i].amplitude);
    }
    write_output(manifest.output_path, out.str());

    std::cout << fmt("atoms %d: phase-matched amplitude %.4f, mean random %.4f, ratio %.1f",
                     atoms, result.matched_amplitude, result.mean_random_amplitude, result.ratio)
              << '\n';
    if (!manifest.output_path.empty()) std::cout << "wrote " << manifest.output_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rydberg-ensemble repeater protocol simulator and rate toolkit"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "key=value parameter file")->capture_default_str();
    app.add_option("--out", output_path, "output data file (default stdout)");
    app.add_option("--seed", seed, "random seed")->capture_default_str();

    // protocol
    auto* protocol = app.add_subcommand("protocol", "run a pulse-level protocol script");
    std::string script_name;
    std::string script_file;
    std::string export_name;
    std::string convention_name = "table";
    std::string alpha_text = "1";
    std::string beta_text = "0";
    std::string outcome_text = "random";
    int nodes = 2;
    protocol->add_option("script", script_name, "table1 | table2 | swap_chain");
    protocol->add_option("--script-file", script_file, "run a script file instead of a built-in");
    protocol->add_option("--export", export_name, "print a built-in script and exit");
    protocol->add_option("--convention", convention_name, "table | rabi")->capture_default_str();
    protocol->add_option("--alpha", alpha_text, "target amplitude re[,im]")->capture_default_str();
    protocol->add_option("--beta", beta_text, "target amplitude re[,im]")->capture_default_str();
    protocol->add_option("--outcome", outcome_text, "uu | ud | du | dd | random")
        ->capture_default_str();
    protocol->add_option("--nodes", nodes, "node count for swap_chain / script files")
        ->capture_default_str();

    // rates
    auto* rates = app.add_subcommand("rates", "closed-form rate model");
    std::string preset_name = "conservative";
    std::string scheme_name = "two_node_gen";
    std::string sweep_text;
    std::vector<std::string> fixes;
    std::string method_name = "closed_form";
    int n_links = 1;
    int k_levels = 0;
    double distance = -1.0;
    rates->add_option("--preset", preset_name, "conservative | optimistic")->capture_default_str();
    rates->add_option("--scheme", scheme_name,
                      "two_node_gen | two_node_teleport | chain_gen | chain_teleport | "
                      "end_to_end_teleport | deterministic_swap")
        ->capture_default_str();
    rates->add_option("--sweep", sweep_text, "param=lo:hi[:points]");
    rates->add_option("--fix", fixes, "param=value override, repeatable");
    rates->add_option("--method", method_name, "recursion | closed_form")->capture_default_str();
    rates->add_option("-n,--n", n_links, "links (nodes - 1) for chain schemes")
        ->capture_default_str();
    rates->add_option("-k,--k", k_levels, "nesting depth for deterministic_swap")
        ->capture_default_str();
    rates->add_option("-d,--distance", distance, "node separation in meters");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo retry simulation");
    std::string mc_scheme = "two_node_gen";
    std::string mc_preset = "conservative";
    std::vector<std::string> mc_fixes;
    std::uint64_t trials = 100000;
    int mc_n = 1;
    int mc_k = 0;
    double lifetime = 0.0;
    mc->add_option("--scheme", mc_scheme,
                   "two_node_gen | two_node_teleport | chain_gen | chain_teleport | "
                   "end_to_end_teleport | nested_swap")
        ->capture_default_str();
    mc->add_option("--preset", mc_preset, "conservative | optimistic")->capture_default_str();
    mc->add_option("--fix", mc_fixes, "param=value override, repeatable");
    mc->add_option("--trials", trials, "number of trials")->capture_default_str();
    mc->add_option("-n,--n", mc_n, "links for chain schemes")->capture_default_str();
    mc->add_option("-k,--k", mc_k, "nesting depth for nested_swap")->capture_default_str();
    mc->add_option("--lifetime", lifetime, "memory lifetime in seconds (0 = unlimited)");

    // emission
    auto* emission = app.add_subcommand("emission", "collective-emission enhancement sweep");
    int atoms = 2000;
    double radius = 10e-6;
    int samples = 1000;
    emission->add_option("--atoms", atoms, "atoms in the blockade sphere")->capture_default_str();
    emission->add_option("--radius", radius, "blockade radius in meters")->capture_default_str();
    emission->add_option("--samples", samples, "random emission directions")
        ->capture_default_str();
    std::string atom_sweep;
    emission->add_option("--atom-sweep", atom_sweep,
                         "comma-separated atom counts; reports the growth-law fit");

    // check-paper
    auto* check = app.add_subcommand("check-paper",
                                     "run every acceptance check against the reference figures");

    CLI11_PARSE(app, argc, argv);

    Manifest manifest;
    manifest.command = join_args(argc, argv);
    manifest.config_path = config_path;
    manifest.seed = seed;
    manifest.output_path = output_path;

    try {
        auto build_params = [&](const std::string& preset,
                                const std::vector<std::string>& fix_list) {
            EfficiencyParams params = preset_by_name(preset).values;
            if (!config_path.empty()) apply_config(params, load_config_file(config_path));
            for (const auto& fix : fix_list) {
                apply_config(params, parse_key_values(fix));
            }
            return params;
        };

        if (*protocol) {
            if (export_name.empty()) print_timestamp();  // exports are pure script text
            return cmd_protocol(script_name, script_file, export_name,
                                convention_from_string(convention_name),
                                parse_complex(alpha_text), parse_complex(beta_text), outcome_text,
                                nodes, seed, manifest);
        }
        if (*rates) {
            print_timestamp();
            EfficiencyParams params = build_params(preset_name, fixes);
            if (distance >= 0.0) params.d = distance;
            return cmd_rates(preset_name, scheme_name, sweep_text, params, n_links, k_levels,
                             method_name, manifest);
        }
        if (*mc) {
            print_timestamp();
            EfficiencyParams params = build_params(mc_preset, mc_fixes);
            return cmd_mc(mc_scheme, params, mc_n, mc_k, trials, lifetime, manifest);
        }
        if (*emission) {
            print_timestamp();
            return cmd_emission(atoms, radius, samples, atom_sweep, manifest);
        }
        if (*check) {
            auto results = run_paper_checks();
            std::cout << format_check_report(results);
            return all_hard_criteria_pass(results) ? 0 : 1;
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    }
    return 0;
}
