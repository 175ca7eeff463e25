#pragma once

#include <optional>
#include <string>

namespace rydrep {

/// Efficiency and timing parameters of the repeater protocols.
struct EfficiencyParams {
    double P_R = 0.79;     // success probability of one Rydberg transition
    double P_gamma = 0.3;  // photon collection probability
    double P_B = 0.5;      // useful-outcome probability of the Bell analyzer
    double t_o = 1e-6;     // seconds per elementary operation
    double d = 0.0;        // node separation, meters
    double c_fiber = 2e8;  // light speed in fiber, m/s
    int n_G = 7;           // operations per entanglement-generation attempt
    int n_T = 7;           // operations per teleportation attempt
    int n_S = 7;           // operations per entanglement-extension attempt
    std::optional<double> OD;  // optical depth, informational

    void validate() const;

    double t_G() const;  // (n_G - 1) t_o + 2 d / c  (simultaneous readout)
    double t_T() const;  // n_T t_o + 2 d / c
    double t_S() const;  // n_S t_o + 2 d / c
    double P_G() const;  // (P_R^n_G P_gamma^2)^2 P_B
    double P_T() const;  // P_R^n_T
    double P_S() const;  // (P_R^n_S P_gamma^2)^2 P_B
};

struct ParameterPreset {
    std::string name;
    EfficiencyParams values;
};

ParameterPreset conservative_preset();  // P_R = 0.79, P_gamma = 0.3
ParameterPreset optimistic_preset();    // P_R = 0.90, P_gamma = 0.8
ParameterPreset preset_by_name(const std::string& name);

struct RateResult {
    double attempt_time = 0.0;         // seconds per attempt at the base level
    double success_probability = 0.0;  // per-attempt probability at that level
    double mean_time = 0.0;            // seconds
    double rate = 0.0;                 // Hz, 1 / mean_time
};

struct PGammaResult {
    double value = 0.0;
    bool clamped = false;  // formula went nonpositive and was clamped to 0
};

/// Photon retrieval efficiency 1 - sqrt(4/pi)/sqrt(OD) for a given optical
/// depth, clamped to [0, 1).
PGammaResult p_gamma_from_od(double od);

/// Mean time and rate of heralded two-node entanglement generation:
/// T_G = t_G / P_G.
RateResult two_node_generation(const EfficiencyParams& params);

/// 1 / (n_G t_o + 2 d / c): ceiling set by the atomic sequence plus light
/// travel, with nothing lost.
double max_rep_rate(const EfficiencyParams& params);

/// 1 / (2 d / c): the pure round-trip light limit.
double light_limited_rate(const EfficiencyParams& params);

/// T_T = (T_G + t_T) / P_T for a single teleportation hop.
RateResult two_node_teleportation(const EfficiencyParams& params);

enum class SolveMethod { recursion, closed_form };

/// Entanglement over n links (n = nodes - 1) by photonic swapping.
/// recursion:   T[n] = (T[n-1] + t_S) / P_S, T[1] = T_G
/// closed_form: t_G / (P_G^n (1 - P_G))
RateResult multi_node_generation(const EfficiencyParams& params, int n, SolveMethod method);

/// (3/2)^k t_G / P_G with n = 2^k links and deterministic swapping.
RateResult deterministic_swap_generation(const EfficiencyParams& params, int k);

/// Hop-by-hop teleportation over n links.
/// recursion:   T_T[n] = (T_T[n-1] + t_G) / (P_T P_G) + t_T / P_T
/// closed_form: t_G / ((P_G P_T)^n (1 - P_G P_T))
RateResult chain_teleportation(const EfficiencyParams& params, int n, SolveMethod method);

/// Entanglement distributed end to end first, then one teleportation.
/// closed_form: t_G / (P_G^n P_T (1 - P_G))
/// recursion:   (T_G[n] + t_T) / P_T with the recursive T_G[n]; the attempt
/// cost of the final teleportation is kept so stochastic simulation can be
/// checked against it exactly.
RateResult end_to_end_teleportation(const EfficiencyParams& params, int n,
                                    SolveMethod method = SolveMethod::closed_form);

/// Generation-rate ratio between a 7-operation preparation and the
/// 12-operation variant it simplifies: rate(n_G = 7) / rate(n_G = 12).
double twelve_step_rate_ratio(const EfficiencyParams& params);

}  // namespace rydrep
