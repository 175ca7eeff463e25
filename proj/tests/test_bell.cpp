#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rydrep/pulse.hpp"

using namespace rydrep;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

StateVector two_photon_state(Polarization a, Polarization b) {
    BasisKet ket(2);
    ket = ket.with_photon({0, a, 0}).with_photon({1, b, 1});
    return StateVector::from_terms(2, {{ket, 1.0}});
}

}  // namespace

TEST_CASE("coincidence classification") {
    CHECK(classify_coincidence(DetectorPair(Detector::d1, Detector::d4)) == Herald::phi_plus);
    CHECK(classify_coincidence(DetectorPair(Detector::d2, Detector::d3)) == Herald::phi_plus);
    CHECK(classify_coincidence(DetectorPair(Detector::d1, Detector::d3)) == Herald::phi_minus);
    CHECK(classify_coincidence(DetectorPair(Detector::d2, Detector::d4)) == Herald::phi_minus);
    CHECK(classify_coincidence(DetectorPair(Detector::d1, Detector::d2)) == Herald::lost);
    CHECK(classify_coincidence(DetectorPair(Detector::d3, Detector::d4)) == Herald::lost);
    CHECK(classify_coincidence(DetectorPair(Detector::d2, Detector::d2)) == Herald::lost);
}

TEST_CASE("analyzer transformation is unitary") {
    Eigen::Matrix4cd m = analyzer_matrix();
    Eigen::Matrix4cd product = m * m.adjoint();
    CHECK((product - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("probability conservation for random two-photon inputs") {
    Rng rng(55);
    Polarization pols[] = {Polarization::H, Polarization::V};
    for (int repeat = 0; repeat < 25; ++repeat) {
        // random superposition over the four polarization pairs
        std::vector<std::pair<BasisKet, Complex>> terms;
        double norm_sq = 0.0;
        for (Polarization pa : pols) {
            for (Polarization pb : pols) {
                Complex amp(rng.next_double() * 2 - 1, rng.next_double() * 2 - 1);
                norm_sq += std::norm(amp);
                BasisKet ket(2);
                ket = ket.with_photon({0, pa, 0}).with_photon({1, pb, 1});
                terms.emplace_back(ket, amp);
            }
        }
        for (auto& [ket, amp] : terms) amp /= std::sqrt(norm_sq);
        StateVector input = StateVector::from_terms(2, std::move(terms));

        double total = 0.0;
        for (const auto& branch : analyze(input)) total += branch.outcome.probability;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("HH input never produces a same-arm loss") {
    auto branches = analyze(two_photon_state(Polarization::H, Polarization::H));
    double total = 0.0;
    for (const auto& branch : branches) {
        CHECK(branch.outcome.kind != Herald::lost);
        total += branch.outcome.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthogonal pair into one arm bunches onto one detector") {
    // H from port A and V from port B both leave through arm 1; two-photon
    // interference cancels the cross-detector coincidence.
    auto branches = analyze(two_photon_state(Polarization::H, Polarization::V));
    double same_detector = 0.0;
    for (const auto& branch : branches) {
        CHECK(branch.outcome.detectors.same_detector());
        same_detector += branch.outcome.probability;
    }
    CHECK(same_detector == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("herald table for the joint flying-qubit state") {
    StateVector joint = make_joint_table1(2, 0, 1, Convention::table);
    auto branches = analyze(joint);

    StateVector bell_plus = StateVector::from_terms(
        2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), kInvSqrt2},
            {BasisKet(2).with(0, Mode::d).with(1, Mode::d), kInvSqrt2}});
    StateVector bell_minus = StateVector::from_terms(
        2, {{BasisKet(2).with(0, Mode::u).with(1, Mode::u), kInvSqrt2},
            {BasisKet(2).with(0, Mode::d).with(1, Mode::d), -kInvSqrt2}});

    int useful = 0;
    for (const auto& branch : branches) {
        if (branch.outcome.kind == Herald::lost) continue;
        ++useful;
        CHECK(branch.outcome.probability == doctest::Approx(0.125).epsilon(1e-12));
        const StateVector& expected =
            branch.outcome.kind == Herald::phi_plus ? bell_plus : bell_minus;
        CHECK(std::abs(fidelity(expected, branch.projected) - 1.0) < 1e-9);
    }
    CHECK(useful == 4);
}

TEST_CASE("analyze validates its input") {
    CHECK_THROWS_AS(analyze(make_vacuum(2)), std::invalid_argument);

    BasisKet one_photon(2);
    one_photon = one_photon.with_photon({0, Polarization::H, 0});
    CHECK_THROWS_AS(analyze(StateVector::from_terms(2, {{one_photon, 1.0}})),
                    std::invalid_argument);

    BasisKet same_node(2);
    same_node = same_node.with_photon({0, Polarization::H, 0})
                    .with_photon({0, Polarization::V, 1});
    CHECK_THROWS_AS(analyze(StateVector::from_terms(2, {{same_node, 1.0}})),
                    std::invalid_argument);
}
