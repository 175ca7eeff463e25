#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rydrep/state.hpp"

using namespace rydrep;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

StateVector single(int num_nodes, const BasisKet& ket) {
    return StateVector::from_terms(num_nodes, {{ket, 1.0}});
}

}  // namespace

TEST_CASE("vacuum construction") {
    StateVector one = make_vacuum(1);
    CHECK(one.size() == 1);
    CHECK(one.amplitude(BasisKet(1)) == Complex(1.0, 0.0));

    StateVector two = make_vacuum(2);
    CHECK(two.size() == 1);
    CHECK(two.norm() == doctest::Approx(1.0));

    CHECK(make_vacuum(4).norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_vacuum(0), std::invalid_argument);
}

TEST_CASE("pi pulse from the reservoir creates a collective excitation") {
    StateVector state = apply_single_mode_rotation(make_vacuum(1), 0, Mode::g, Mode::r_d, kPi,
                                                   Convention::table);
    CHECK(state.size() == 1);
    CHECK(state.amplitude(BasisKet(1).with(0, Mode::r_d)).real() == doctest::Approx(1.0));

    // and back again
    StateVector back =
        apply_single_mode_rotation(state, 0, Mode::g, Mode::r_d, kPi, Convention::table);
    CHECK(back.amplitude(BasisKet(1)).real() == doctest::Approx(1.0));
}

TEST_CASE("half-pi pulse splits an excitation") {
    // |d, R_u>  ->  |d>(|u> + |R_u>)/sqrt(2)
    StateVector input = single(1, BasisKet(1).with(0, Mode::d).with(0, Mode::r_u));
    StateVector out = apply_single_mode_rotation(input, 0, Mode::r_u, Mode::u, kPi / 2.0,
                                                 Convention::table);
    CHECK(out.size() == 2);
    CHECK(out.amplitude(BasisKet(1).with(0, Mode::d).with(0, Mode::u)).real() ==
          doctest::Approx(kInvSqrt2));
    CHECK(out.amplitude(BasisKet(1).with(0, Mode::d).with(0, Mode::r_u)).real() ==
          doctest::Approx(kInvSqrt2));
}

TEST_CASE("two-pi pulse flips the sign of resonant kets only") {
    StateVector occupied = single(1, BasisKet(1).with(0, Mode::u));
    StateVector flipped =
        apply_single_mode_rotation(occupied, 0, Mode::u, Mode::r_u, 2.0 * kPi, Convention::table);
    CHECK(flipped.amplitude(BasisKet(1).with(0, Mode::u)).real() == doctest::Approx(-1.0));
    CHECK(flipped.norm() == doctest::Approx(1.0));

    StateVector dark = single(1, BasisKet(1).with(0, Mode::d));
    StateVector unchanged =
        apply_single_mode_rotation(dark, 0, Mode::u, Mode::r_u, 2.0 * kPi, Convention::table);
    CHECK(unchanged.amplitude(BasisKet(1).with(0, Mode::d)).real() == doctest::Approx(1.0));
}

TEST_CASE("rotation conventions compose as expected") {
    // table convention: the half-pi map is an involution, so applying it
    // twice returns the identity on the doublet.
    auto u = single(1, BasisKet(1).with(0, Mode::u));
    auto once = apply_single_mode_rotation(u, 0, Mode::u, Mode::d, kPi / 2.0, Convention::table);
    auto twice =
        apply_single_mode_rotation(once, 0, Mode::u, Mode::d, kPi / 2.0, Convention::table);
    CHECK(std::abs(twice.amplitude(BasisKet(1).with(0, Mode::u)) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(twice.amplitude(BasisKet(1).with(0, Mode::d))) < 1e-12);

    // rabi convention: rotations compose, half-pi twice equals pi. Assert the
    // 2x2 matrix identity column by column.
    for (Mode start : {Mode::u, Mode::d}) {
        auto in = single(1, BasisKet(1).with(0, start));
        auto two_quarters = apply_single_mode_rotation(
            apply_single_mode_rotation(in, 0, Mode::u, Mode::d, kPi / 2.0, Convention::rabi), 0,
            Mode::u, Mode::d, kPi / 2.0, Convention::rabi);
        auto one_pi = apply_single_mode_rotation(in, 0, Mode::u, Mode::d, kPi, Convention::rabi);
        for (Mode probe : {Mode::u, Mode::d}) {
            BasisKet ket = BasisKet(1).with(0, probe);
            CHECK(std::abs(two_quarters.amplitude(ket) - one_pi.amplitude(ket)) < 1e-12);
        }
    }
}

TEST_CASE("norm is preserved through random pulse sequences") {
    Rng rng(7);
    for (int repeat = 0; repeat < 20; ++repeat) {
        StateVector state = make_vacuum(2);
        state = apply_single_mode_rotation(state, 0, Mode::g, Mode::u, kPi, Convention::table);
        for (int step = 0; step < 30; ++step) {
            Mode pool[] = {Mode::u, Mode::d, Mode::u_t, Mode::d_t};
            Mode a = pool[rng.next_u64() % 4];
            Mode b = pool[rng.next_u64() % 4];
            if (a == b) continue;
            double theta = rng.next_double() * 2.0 * kPi;
            double phi = rng.next_double() * 2.0 * kPi;
            Convention conv = rng.bernoulli(0.5) ? Convention::table : Convention::rabi;
            int node = static_cast<int>(rng.next_u64() % 2);
            state = apply_single_mode_rotation(state, node, a, b, theta, conv, phi);
            CHECK(std::abs(state.norm_squared() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("inner product") {
    StateVector vac = make_vacuum(1);
    CHECK(std::abs(inner_product(vac, vac) - Complex(1.0, 0.0)) < 1e-12);

    StateVector excited =
        apply_single_mode_rotation(vac, 0, Mode::g, Mode::r_d, kPi, Convention::table);
    CHECK(std::abs(inner_product(vac, excited)) < 1e-12);

    // conjugate-linear in the first argument
    StateVector scaled = excited;
    scaled.scale(Complex(0.0, 1.0));
    CHECK(std::abs(inner_product(scaled, excited) - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(inner_product(excited, scaled) - Complex(0.0, 1.0)) < 1e-12);

    CHECK_THROWS_AS(inner_product(make_vacuum(1), make_vacuum(2)), std::invalid_argument);
}

TEST_CASE("measurement of a symmetric superposition") {
    StateVector state = StateVector::from_terms(
        1, {{BasisKet(1).with(0, Mode::u), kInvSqrt2}, {BasisKet(1).with(0, Mode::d), kInvSqrt2}});

    auto u_branch = project_modes(state, 0, {Mode::u, Mode::d}, Mode::u);
    auto d_branch = project_modes(state, 0, {Mode::u, Mode::d}, Mode::d);
    CHECK(u_branch.probability == doctest::Approx(0.5));
    CHECK(d_branch.probability == doctest::Approx(0.5));
    CHECK(u_branch.probability + d_branch.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u_branch.collapsed.norm() == doctest::Approx(1.0));

    // sampled measurement hits both branches across seeds
    int u_count = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        Rng rng(seed);
        auto result = measure_modes(state, 0, {Mode::u, Mode::d}, rng);
        if (result.outcome == Mode::u) ++u_count;
    }
    CHECK(u_count > 10);
    CHECK(u_count < 54);
}

TEST_CASE("measurement of a definite state") {
    StateVector state = single(1, BasisKet(1).with(0, Mode::u));
    Rng rng(3);
    auto result = measure_modes(state, 0, {Mode::u, Mode::d}, rng);
    CHECK(result.outcome == Mode::u);
    CHECK(result.probability == doctest::Approx(1.0));
}

TEST_CASE("measurement requires exactly one of the two modes") {
    StateVector bad = make_vacuum(1);
    CHECK_THROWS_AS(project_modes(bad, 0, {Mode::u, Mode::d}, Mode::u), protocol_error);

    StateVector both = single(1, BasisKet(1).with(0, Mode::u).with(0, Mode::d));
    CHECK_THROWS_AS(project_modes(both, 0, {Mode::u, Mode::d}, Mode::u), protocol_error);
}

TEST_CASE("rotation rejects bad arguments") {
    StateVector vac = make_vacuum(1);
    CHECK_THROWS_AS(
        apply_single_mode_rotation(vac, 0, Mode::u, Mode::u, kPi, Convention::table),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_single_mode_rotation(vac, 0, Mode::u, Mode::g, kPi, Convention::table),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_single_mode_rotation(vac, 2, Mode::u, Mode::d, kPi, Convention::table),
        std::invalid_argument);
}

TEST_CASE("ket canonicalization round-trips through text") {
    Rng rng(11);
    for (int repeat = 0; repeat < 50; ++repeat) {
        int nodes = 1 + static_cast<int>(rng.next_u64() % 3);
        BasisKet ket(nodes);
        for (int node = 0; node < nodes; ++node) {
            Mode pool[] = {Mode::u, Mode::d, Mode::u_t, Mode::d_t,
                           Mode::r_u, Mode::r_d, Mode::e_u, Mode::e_d};
            for (Mode m : pool) {
                if (rng.bernoulli(0.3)) ket = ket.with(node, m);
            }
        }
        int slot = 0;
        for (int node = 0; node < nodes; ++node) {
            if (rng.bernoulli(0.5)) {
                Polarization pol = static_cast<Polarization>(rng.next_u64() % 4);
                ket = ket.with_photon({node, pol, slot++});
            }
        }
        CHECK(BasisKet::parse(ket.to_string()) == ket);
    }
}

TEST_CASE("debug serialization is deterministic and sorted") {
    StateVector state = StateVector::from_terms(
        2, {{BasisKet(2).with(0, Mode::d), kInvSqrt2}, {BasisKet(2).with(0, Mode::u), kInvSqrt2}});
    std::string expected =
        "0.707106781187 0 | node0:{u} node1:{} | photons:[]\n"
        "0.707106781187 0 | node0:{d} node1:{} | photons:[]\n";
    CHECK(state.to_debug_string() == expected);
}

TEST_CASE("waveplate mapping is the fixed bijection") {
    CHECK(waveplate_map(Polarization::sigma_minus) == Polarization::H);
    CHECK(waveplate_map(Polarization::sigma_plus) == Polarization::V);
    CHECK(waveplate_map(Polarization::H) == Polarization::sigma_minus);
    CHECK(waveplate_map(Polarization::V) == Polarization::sigma_plus);
}

TEST_CASE("photon slots must be unique within a ket") {
    BasisKet ket(1);
    ket = ket.with_photon({0, Polarization::H, 0});
    CHECK_THROWS_AS(ket.with_photon({0, Polarization::V, 0}), protocol_error);
}
