#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "rydrep/rates.hpp"

namespace rydrep {

enum class Scheme {
    two_node_gen,
    two_node_teleport,
    chain_gen,
    chain_teleport,
    end_to_end_teleport,
    nested_swap,
};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct TrialConfig {
    EfficiencyParams params;
    Scheme scheme = Scheme::two_node_gen;
    int n = 1;  // links, for the chain schemes
    int k = 0;  // nesting depth, for nested_swap
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    /// When set, a trial is truncated (counted unsuccessful) as soon as the
    /// oldest still-entangled memory has waited longer than this.
    std::optional<double> memory_lifetime;
};

struct TrialStats {
    double mean_time = 0.0;  // over successful trials
    double std_error = 0.0;  // sample std / sqrt(successes)
    std::map<std::uint64_t, std::uint64_t> attempts_histogram;
    double success_fraction = 1.0;
    std::uint64_t trials = 0;
};

/// Samples the retry dynamics of one protocol scheme. Elementary heralded
/// attempts are Bernoulli with the per-attempt probability from the
/// parameter set; the attempts-until-success count of each heralded stage is
/// drawn geometrically in one step. Trials use independent derived RNG
/// substreams, so results are reproducible bit-for-bit for a given
/// (config, seed) and independent of evaluation order.
TrialStats simulate(const TrialConfig& config);

/// Analytic mean the simulation of `config` is expected to reproduce (the
/// recursion variant for the multi-node schemes).
RateResult analytic_for_config(const TrialConfig& config);

struct ComparisonReport {
    double mc_mean = 0.0;
    double analytic_mean = 0.0;
    double z_score = 0.0;
    double relative_deviation = 0.0;
    bool pass = false;
};

/// Pass when |z| <= 3 or the relative deviation is within 2 percent.
ComparisonReport compare_to_analytic(const TrialStats& stats, const RateResult& analytic);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double critical_1pct = 0.0;
    bool pass = false;
};

/// Chi-square of an attempts histogram against Geometric(p), tail-binned so
/// every expected count stays above 5; tested at 1 percent significance.
ChiSquareResult chi_square_geometric(const std::map<std::uint64_t, std::uint64_t>& histogram,
                                     double p, std::uint64_t trials);

}  // namespace rydrep
