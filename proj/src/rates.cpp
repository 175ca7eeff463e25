#include "rydrep/rates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rydrep {

void EfficiencyParams::validate() const {
    auto check_prob = [](double p, const char* name) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
        }
    };
    check_prob(P_R, "P_R");
    check_prob(P_gamma, "P_gamma");
    check_prob(P_B, "P_B");
    if (t_o < 0.0 || d < 0.0) throw std::invalid_argument("times and distances must be >= 0");
    if (c_fiber <= 0.0) throw std::invalid_argument("c_fiber must be positive");
    if (n_G < 1 || n_T < 1 || n_S < 1) throw std::invalid_argument("step counts must be >= 1");
}

double EfficiencyParams::t_G() const { return (n_G - 1) * t_o + 2.0 * d / c_fiber; }
double EfficiencyParams::t_T() const { return n_T * t_o + 2.0 * d / c_fiber; }
double EfficiencyParams::t_S() const { return n_S * t_o + 2.0 * d / c_fiber; }

double EfficiencyParams::P_G() const {
    double single = std::pow(P_R, n_G) * P_gamma * P_gamma;
    return single * single * P_B;
}

double EfficiencyParams::P_T() const { return std::pow(P_R, n_T); }

double EfficiencyParams::P_S() const {
    double single = std::pow(P_R, n_S) * P_gamma * P_gamma;
    return single * single * P_B;
}

ParameterPreset conservative_preset() {
    EfficiencyParams p;
    p.P_R = 0.79;
    p.P_gamma = 0.3;
    p.OD = 3.0;  // p_gamma_from_od(3) = 0.3486, rounded down to the 0.3 used here
    return {"conservative", p};
}

ParameterPreset optimistic_preset() {
    EfficiencyParams p;
    p.P_R = 0.9;
    p.P_gamma = 0.8;
    return {"optimistic", p};
}

ParameterPreset preset_by_name(const std::string& name) {
    if (name == "conservative") return conservative_preset();
    if (name == "optimistic") return optimistic_preset();
    throw std::invalid_argument("unknown preset: " + name);
}

PGammaResult p_gamma_from_od(double od) {
    if (od <= 0.0) throw std::invalid_argument("p_gamma_from_od: OD must be positive");
    double value = 1.0 - std::sqrt(4.0 / std::numbers::pi) / std::sqrt(od);
    if (value <= 0.0) return {0.0, true};
    return {value, false};
}

namespace {

RateResult make_result(double attempt_time, double success_probability, double mean_time) {
    return {attempt_time, success_probability, mean_time, 1.0 / mean_time};
}

}  // namespace

RateResult two_node_generation(const EfficiencyParams& params) {
    params.validate();
    return make_result(params.t_G(), params.P_G(), params.t_G() / params.P_G());
}

double max_rep_rate(const EfficiencyParams& params) {
    params.validate();
    return 1.0 / (params.n_G * params.t_o + 2.0 * params.d / params.c_fiber);
}

double light_limited_rate(const EfficiencyParams& params) {
    params.validate();
    if (params.d <= 0.0) throw std::invalid_argument("light_limited_rate: d must be positive");
    return params.c_fiber / (2.0 * params.d);
}

RateResult two_node_teleportation(const EfficiencyParams& params) {
    params.validate();
    double mean = (two_node_generation(params).mean_time + params.t_T()) / params.P_T();
    return make_result(params.t_T(), params.P_T(), mean);
}

RateResult multi_node_generation(const EfficiencyParams& params, int n, SolveMethod method) {
    params.validate();
    if (n < 1) throw std::invalid_argument("multi_node_generation: n must be >= 1");
    if (method == SolveMethod::closed_form) {
        double pg = params.P_G();
        double mean = params.t_G() / (std::pow(pg, n) * (1.0 - pg));
        return make_result(params.t_G(), pg, mean);
    }
    double mean = two_node_generation(params).mean_time;
    for (int step = 2; step <= n; ++step) {
        mean = (mean + params.t_S()) / params.P_S();
    }
    return make_result(params.t_G(), params.P_G(), mean);
}

RateResult deterministic_swap_generation(const EfficiencyParams& params, int k) {
    params.validate();
    if (k < 0) throw std::invalid_argument("deterministic_swap_generation: k must be >= 0");
    double mean = std::pow(1.5, k) * params.t_G() / params.P_G();
    return make_result(params.t_G(), params.P_G(), mean);
}

RateResult chain_teleportation(const EfficiencyParams& params, int n, SolveMethod method) {
    params.validate();
    if (n < 1) throw std::invalid_argument("chain_teleportation: n must be >= 1");
    double pg = params.P_G();
    double pt = params.P_T();
    if (method == SolveMethod::closed_form) {
        double pgt = pg * pt;
        double mean = params.t_G() / (std::pow(pgt, n) * (1.0 - pgt));
        return make_result(params.t_G(), pgt, mean);
    }
    double mean = two_node_teleportation(params).mean_time;
    for (int step = 2; step <= n; ++step) {
        mean = (mean + params.t_G()) / (pt * pg) + params.t_T() / pt;
    }
    return make_result(params.t_G(), pg * pt, mean);
}

RateResult end_to_end_teleportation(const EfficiencyParams& params, int n, SolveMethod method) {
    params.validate();
    if (n < 1) throw std::invalid_argument("end_to_end_teleportation: n must be >= 1");
    double pg = params.P_G();
    double pt = params.P_T();
    if (method == SolveMethod::closed_form) {
        double mean = params.t_G() / (std::pow(pg, n) * pt * (1.0 - pg));
        return make_result(params.t_G(), pg * pt, mean);
    }
    double chain = multi_node_generation(params, n, SolveMethod::recursion).mean_time;
    return make_result(params.t_G(), pg * pt, (chain + params.t_T()) / pt);
}

double twelve_step_rate_ratio(const EfficiencyParams& params) {
    params.validate();
    EfficiencyParams ours = params;
    ours.n_G = 7;
    EfficiencyParams theirs = params;
    theirs.n_G = 12;
    return two_node_generation(ours).rate / two_node_generation(theirs).rate;
}

}  // namespace rydrep
