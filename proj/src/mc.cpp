#include "rydrep/mc.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rydrep/rng.hpp"

namespace rydrep {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::two_node_gen: return "two_node_gen";
        case Scheme::two_node_teleport: return "two_node_teleport";
        case Scheme::chain_gen: return "chain_gen";
        case Scheme::chain_teleport: return "chain_teleport";
        case Scheme::end_to_end_teleport: return "end_to_end_teleport";
        case Scheme::nested_swap: return "nested_swap";
    }
    throw std::invalid_argument("unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "two_node_gen") return Scheme::two_node_gen;
    if (name == "two_node_teleport") return Scheme::two_node_teleport;
    if (name == "chain_gen") return Scheme::chain_gen;
    if (name == "chain_teleport") return Scheme::chain_teleport;
    if (name == "end_to_end_teleport") return Scheme::end_to_end_teleport;
    if (name == "nested_swap") return Scheme::nested_swap;
    throw std::invalid_argument("unknown scheme: " + name);
}

namespace {

// One trial of the retry process behind each analytic mean. A failed stage
// consumes the entanglement it depended on, so except for the lowest level
// everything built so far is rebuilt; that is exactly the structure of the
// recursive mean-time expressions.
class TrialSim {
public:
    TrialSim(const TrialConfig& config, Rng& rng)
        : rng_(rng),
          lifetime_(config.memory_lifetime),
          t_G_(config.params.t_G()),
          t_T_(config.params.t_T()),
          t_S_(config.params.t_S()),
          P_G_(config.params.P_G()),
          P_T_(config.params.P_T()),
          P_S_(config.params.P_S()) {}

    bool truncated() const { return truncated_; }
    std::uint64_t attempts() const { return attempts_; }

    // Heralded two-node generation: retries are independent, so the number
    // of attempts is geometric.
    double generate_pair() {
        std::uint64_t n = sample_geometric(rng_, P_G_);
        attempts_ += n;
        return static_cast<double>(n) * t_G_;
    }

    double two_node_teleport() {
        double now = 0.0;
        for (;;) {
            now += generate_pair();
            now += t_T_;
            attempts_ += 1;
            if (expired(t_T_)) return now;
            if (rng_.bernoulli(P_T_)) return now;
            // teleport failed, the pair is consumed
        }
    }

    // Chain of `links` heralded segments. A failed extension attempt reads
    // out (and so destroys) the inner memory, collapsing the whole chain.
    // Returns the completion time; `birth` reports when the oldest surviving
    // memory (node 0) was created.
    double build_chain(int links, double& birth) {
        if (links == 1) {
            double t = generate_pair();
            birth = t;
            return t;
        }
        double now = 0.0;
        for (;;) {
            double start = now;
            double sub_birth = 0.0;
            now += build_chain(links - 1, sub_birth);
            if (truncated_) return now;
            double birth_abs = start + sub_birth;
            now += t_S_;
            attempts_ += 1;
            if (expired(now - birth_abs)) return now;
            if (rng_.bernoulli(P_S_)) {
                birth = birth_abs;
                return now;
            }
        }
    }

    double chain_teleport(int links) {
        if (links == 1) return two_node_teleport();
        double now = 0.0;
        for (;;) {
            now += chain_teleport(links - 1);
            if (truncated_) return now;
            now += t_G_;
            attempts_ += 1;
            if (!rng_.bernoulli(P_G_)) continue;  // hop entanglement failed
            double born = now;
            now += t_T_;
            attempts_ += 1;
            if (expired(now - born)) return now;
            if (rng_.bernoulli(P_T_)) return now;
            // teleport failed and consumed the hop pair together with the
            // teleported progress it carried
        }
    }

    double end_to_end_teleport(int links) {
        double now = 0.0;
        for (;;) {
            double birth = 0.0;
            now += build_chain(links, birth);
            if (truncated_) return now;
            now += t_T_;
            attempts_ += 1;
            if (expired(now - birth)) return now;
            if (rng_.bernoulli(P_T_)) return now;
        }
    }

    // Binary nesting: all leaf pairs start together, a swap fires as soon as
    // both children exist and costs no time. The earlier subtree waits for
    // its sibling, which is where memory lifetime bites.
    struct SubtreeTimes {
        double completion = 0.0;
        double left_birth = 0.0;   // birth of the surviving left-end memory
        double right_birth = 0.0;  // birth of the surviving right-end memory
    };

    SubtreeTimes nested(int depth) {
        if (depth == 0) {
            double t = generate_pair();
            return {t, t, t};
        }
        SubtreeTimes left = nested(depth - 1);
        SubtreeTimes right = nested(depth - 1);
        double done = std::max(left.completion, right.completion);
        // The two inner memories are consumed by the swap at `done`.
        expired(done - left.right_birth);
        expired(done - right.left_birth);
        return {done, left.left_birth, right.right_birth};
    }

    double nested_swap(int depth) {
        SubtreeTimes tree = nested(depth);
        expired(tree.completion - tree.left_birth);
        expired(tree.completion - tree.right_birth);
        return tree.completion;
    }

private:
    bool expired(double waited) {
        if (lifetime_ && waited > *lifetime_) truncated_ = true;
        return truncated_;
    }

    Rng& rng_;
    std::optional<double> lifetime_;
    bool truncated_ = false;
    std::uint64_t attempts_ = 0;
    double t_G_, t_T_, t_S_;
    double P_G_, P_T_, P_S_;
};

double run_trial(const TrialConfig& config, Rng& rng, std::uint64_t& attempts, bool& success) {
    TrialSim sim(config, rng);
    double time = 0.0;
    switch (config.scheme) {
        case Scheme::two_node_gen: time = sim.generate_pair(); break;
        case Scheme::two_node_teleport: time = sim.two_node_teleport(); break;
        case Scheme::chain_gen: {
            double birth = 0.0;
            time = sim.build_chain(config.n, birth);
            break;
        }
        case Scheme::chain_teleport: time = sim.chain_teleport(config.n); break;
        case Scheme::end_to_end_teleport: time = sim.end_to_end_teleport(config.n); break;
        case Scheme::nested_swap: time = sim.nested_swap(config.k); break;
    }
    attempts = sim.attempts();
    success = !sim.truncated();
    return time;
}

}  // namespace

TrialStats simulate(const TrialConfig& config) {
    config.params.validate();
    if (config.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if ((config.scheme == Scheme::chain_gen || config.scheme == Scheme::chain_teleport ||
         config.scheme == Scheme::end_to_end_teleport) &&
        config.n < 1) {
        throw std::invalid_argument("simulate: n must be >= 1");
    }
    if (config.scheme == Scheme::nested_swap && config.k < 0) {
        throw std::invalid_argument("simulate: k must be >= 0");
    }

    TrialStats stats;
    stats.trials = config.trials;
    std::vector<double> times;
    times.reserve(config.trials);
    std::uint64_t successes = 0;

    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = Rng::for_trial(config.seed, trial);
        std::uint64_t attempts = 0;
        bool success = false;
        double time = run_trial(config, rng, attempts, success);
        stats.attempts_histogram[attempts] += 1;
        if (success) {
            times.push_back(time);
            ++successes;
        }
    }

    stats.success_fraction = static_cast<double>(successes) / config.trials;
    if (!times.empty()) {
        double sum = 0.0;
        for (double t : times) sum += t;
        stats.mean_time = sum / times.size();
        if (times.size() > 1) {
            double ss = 0.0;
            for (double t : times) ss += (t - stats.mean_time) * (t - stats.mean_time);
            double sample_std = std::sqrt(ss / (times.size() - 1));
            stats.std_error = sample_std / std::sqrt(static_cast<double>(times.size()));
        }
    }
    return stats;
}

RateResult analytic_for_config(const TrialConfig& config) {
    switch (config.scheme) {
        case Scheme::two_node_gen: return two_node_generation(config.params);
        case Scheme::two_node_teleport: return two_node_teleportation(config.params);
        case Scheme::chain_gen:
            return multi_node_generation(config.params, config.n, SolveMethod::recursion);
        case Scheme::chain_teleport:
            return chain_teleportation(config.params, config.n, SolveMethod::recursion);
        case Scheme::end_to_end_teleport:
            return end_to_end_teleportation(config.params, config.n, SolveMethod::recursion);
        case Scheme::nested_swap:
            return deterministic_swap_generation(config.params, config.k);
    }
    throw std::invalid_argument("unknown scheme");
}

ComparisonReport compare_to_analytic(const TrialStats& stats, const RateResult& analytic) {
    ComparisonReport report;
    report.mc_mean = stats.mean_time;
    report.analytic_mean = analytic.mean_time;
    report.z_score = stats.std_error > 0.0
                         ? (stats.mean_time - analytic.mean_time) / stats.std_error
                         : (stats.mean_time == analytic.mean_time ? 0.0
                                                                  : std::numeric_limits<double>::infinity());
    report.relative_deviation = std::abs(stats.mean_time - analytic.mean_time) / analytic.mean_time;
    report.pass = std::abs(report.z_score) <= 3.0 || report.relative_deviation <= 0.02;
    return report;
}

ChiSquareResult chi_square_geometric(const std::map<std::uint64_t, std::uint64_t>& histogram,
                                     double p, std::uint64_t trials) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi_square_geometric: p in (0,1)");
    const double n = static_cast<double>(trials);
    const double min_expected = 5.0;

    // Individual bins while the expected count stays comfortable, then one
    // tail bin holding the rest of the distribution.
    std::vector<double> expected;
    std::vector<double> observed;
    double tail_prob = 1.0;
    std::uint64_t j = 1;
    for (;;) {
        double pj = p * std::pow(1.0 - p, static_cast<double>(j - 1));
        if (n * pj < min_expected || n * (tail_prob - pj) < min_expected) break;
        auto it = histogram.find(j);
        observed.push_back(it == histogram.end() ? 0.0 : static_cast<double>(it->second));
        expected.push_back(n * pj);
        tail_prob -= pj;
        ++j;
    }
    if (expected.empty()) throw std::invalid_argument("chi_square_geometric: too few trials");
    double tail_observed = 0.0;
    for (const auto& [attempts, count] : histogram) {
        if (attempts >= j) tail_observed += static_cast<double>(count);
    }
    observed.push_back(tail_observed);
    expected.push_back(n * tail_prob);

    ChiSquareResult result;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        double diff = observed[i] - expected[i];
        result.statistic += diff * diff / expected[i];
    }
    result.dof = static_cast<int>(expected.size()) - 1;
    boost::math::chi_squared dist(result.dof);
    result.critical_1pct = boost::math::quantile(dist, 0.99);
    result.pass = result.statistic <= result.critical_1pct;
    return result;
}

}  // namespace rydrep
