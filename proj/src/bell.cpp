#include "rydrep/bell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace rydrep {

const char* to_string(Detector d) {
    switch (d) {
        case Detector::d1: return "D1";
        case Detector::d2: return "D2";
        case Detector::d3: return "D3";
        case Detector::d4: return "D4";
    }
    throw std::invalid_argument("unknown detector");
}

DetectorPair::DetectorPair(Detector a, Detector b) {
    first = std::min(a, b);
    second = std::max(a, b);
}

std::string DetectorPair::to_string() const {
    return std::string(rydrep::to_string(first)) + "&" + rydrep::to_string(second);
}

const char* to_string(Herald h) {
    switch (h) {
        case Herald::phi_plus: return "phi_plus";
        case Herald::phi_minus: return "phi_minus";
        case Herald::lost: return "lost";
    }
    throw std::invalid_argument("unknown herald");
}

Herald classify_coincidence(DetectorPair p) {
    if (p.same_detector()) return Herald::lost;
    auto is = [&](Detector a, Detector b) { return p == DetectorPair(a, b); };
    if (is(Detector::d1, Detector::d4) || is(Detector::d2, Detector::d3)) return Herald::phi_plus;
    if (is(Detector::d1, Detector::d3) || is(Detector::d2, Detector::d4)) return Herald::phi_minus;
    return Herald::lost;  // both detectors on one output arm
}

Eigen::Matrix4cd analyzer_matrix(const AnalyzerConfig& config) {
    // Arm-local half-wave plate at angle beta: H -> cos(2b) H + sin(2b) V,
    // V -> sin(2b) H - cos(2b) V. At 22.5 degrees this is the 45-degree
    // rotation used by the analyzer.
    double two_beta = 2.0 * config.hwp_angle_deg * std::numbers::pi / 180.0;
    double c = std::cos(two_beta);
    double s = std::sin(two_beta);

    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    // Input modes: 0 = (A,H), 1 = (A,V), 2 = (B,H), 3 = (B,V).
    // Arm 1 ports: D1 (H), D2 (V); arm 2 ports: D3 (H), D4 (V).
    // A:H transmits into arm 1.
    m(0, 0) = c;
    m(1, 0) = s;
    // A:V reflects into arm 2 with a -1 reflection phase.
    m(2, 1) = -s;
    m(3, 1) = c;
    // B:H transmits into arm 2.
    m(2, 2) = c;
    m(3, 2) = s;
    // B:V reflects into arm 1.
    m(0, 3) = s;
    m(1, 3) = -c;
    return m;
}

namespace {

int input_mode_index(bool port_a, Polarization pol) {
    int base = port_a ? 0 : 2;
    switch (pol) {
        case Polarization::H: return base;
        case Polarization::V: return base + 1;
        default:
            throw protocol_error("analyze: photons must be in the H/V basis (apply the waveplate first)");
    }
}

}  // namespace

std::vector<AnalyzerBranch> analyze(const StateVector& joint, const AnalyzerConfig& config) {
    // Identify the two source nodes from the first term; every ket must agree.
    if (joint.terms().empty()) throw std::invalid_argument("analyze: empty state");
    const auto& first_photons = joint.terms().begin()->first.photons();
    if (first_photons.size() != 2) {
        throw std::invalid_argument("analyze: state must carry exactly 2 photons");
    }
    int node_a = std::min(first_photons[0].source_node, first_photons[1].source_node);
    int node_b = std::max(first_photons[0].source_node, first_photons[1].source_node);
    if (node_a == node_b) throw std::invalid_argument("analyze: photons must come from two distinct nodes");

    Eigen::Matrix4cd m = analyzer_matrix(config);

    std::map<DetectorPair, StateVector> branches;
    for (const auto& [ket, amp] : joint.terms()) {
        const auto& photons = ket.photons();
        if (photons.size() != 2) throw std::invalid_argument("analyze: state must carry exactly 2 photons");
        const PhotonRecord* pa = nullptr;
        const PhotonRecord* pb = nullptr;
        for (const auto& p : photons) {
            if (p.source_node == node_a) pa = &p;
            else if (p.source_node == node_b) pb = &p;
        }
        if (!pa || !pb) throw std::invalid_argument("analyze: kets disagree on photon source nodes");

        Eigen::Vector4cd va = m.col(input_mode_index(true, pa->polarization));
        Eigen::Vector4cd vb = m.col(input_mode_index(false, pb->polarization));
        BasisKet memory = ket.without_photons_from(node_a).without_photons_from(node_b);

        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                // Bosonic two-photon amplitude: permanent for distinct
                // detectors, sqrt(2) enhancement for a doubly hit one.
                Complex branch_amp = (i == j) ? std::numbers::sqrt2 * va(i) * vb(i)
                                              : va(i) * vb(j) + va(j) * vb(i);
                if (std::abs(branch_amp) < 1e-15) continue;
                DetectorPair pair(static_cast<Detector>(i + 1), static_cast<Detector>(j + 1));
                auto [it, inserted] = branches.try_emplace(
                    pair, StateVector::from_terms(joint.num_nodes(), {}, joint.prune_epsilon()));
                it->second.add_term(memory, amp * branch_amp);
            }
        }
    }

    std::vector<AnalyzerBranch> out;
    for (auto& [pair, state] : branches) {
        state.prune();
        double probability = state.norm_squared();
        if (probability < 1e-15) continue;
        state.renormalize();
        state.set_next_photon_slot(joint.next_photon_slot());
        out.push_back({{classify_coincidence(pair), pair, probability}, std::move(state)});
    }
    return out;
}

}  // namespace rydrep
