#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rydrep/state.hpp"

namespace rydrep {

enum class Detector : int { d1 = 1, d2 = 2, d3 = 3, d4 = 4 };

const char* to_string(Detector d);

/// Unordered detector pair; first <= second, equal members mean both photons
/// hit one detector.
struct DetectorPair {
    Detector first = Detector::d1;
    Detector second = Detector::d1;

    DetectorPair() = default;
    DetectorPair(Detector a, Detector b);
    bool same_detector() const { return first == second; }
    std::string to_string() const;

    friend auto operator<=>(const DetectorPair&, const DetectorPair&) = default;
};

enum class Herald { phi_plus, phi_minus, lost };

const char* to_string(Herald h);

/// (D1,D4) and (D2,D3) herald the +phase Bell projection, (D1,D3) and
/// (D2,D4) the -phase one. Pairs on a single output arm, and both photons on
/// one detector, carry no usable herald.
Herald classify_coincidence(DetectorPair detectors);

struct BellOutcome {
    Herald kind = Herald::lost;
    DetectorPair detectors;
    double probability = 0.0;
};

/// Fig-layout analyzer: input PBS with H transmitting and V reflecting, a
/// half-wave plate on each output arm, a second PBS per arm, detectors
/// D1/D2 on the H/V ports of arm 1 and D3/D4 on the H/V ports of arm 2.
struct AnalyzerConfig {
    double hwp_angle_deg = 22.5;  // rotates polarization by 45 degrees
};

/// Column j of the returned matrix is the detector-amplitude vector of input
/// mode j, modes ordered (portA:H, portA:V, portB:H, portB:V) and rows
/// ordered D1..D4. The V reflection toward arm 2 carries a -1 phase; that
/// choice pins the coincidence classification above.
Eigen::Matrix4cd analyzer_matrix(const AnalyzerConfig& config = {});

struct AnalyzerBranch {
    BellOutcome outcome;
    StateVector projected;  // renormalized memory state, analyzed photons removed
};

/// Propagates the two photons of every basis ket through the analyzer and
/// returns all detector-pattern branches with nonzero probability. Each ket
/// must carry exactly one photon from each of the same two distinct nodes;
/// the lower-indexed node enters port A.
std::vector<AnalyzerBranch> analyze(const StateVector& joint, const AnalyzerConfig& config = {});

}  // namespace rydrep
