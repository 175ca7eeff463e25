#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rydrep/phase_match.hpp"

using namespace rydrep;

TEST_CASE("cloud sampling") {
    AtomCloud cloud = sample_cloud(2000, 10e-6, 42);
    CHECK(cloud.count() == 2000);
    double max_r = 0.0;
    for (const auto& r : cloud.positions) max_r = std::max(max_r, r.norm());
    CHECK(max_r <= 10e-6);

    AtomCloud again = sample_cloud(2000, 10e-6, 42);
    for (int i = 0; i < cloud.count(); ++i) {
        CHECK(cloud.positions[i] == again.positions[i]);
    }

    CHECK_THROWS_AS(sample_cloud(0, 10e-6, 1), std::invalid_argument);
}

TEST_CASE("phase-matched direction gives exactly N") {
    WaveVectorSet kset = default_wave_vector_set();
    for (int atoms : {1, 100, 2000}) {
        AtomCloud cloud = sample_cloud(atoms, 10e-6, 7);
        WaveVectorSet matched = kset;
        matched.k_e = kset.k_tot();
        CHECK(emission_amplitude(cloud, matched) ==
              doctest::Approx(static_cast<double>(atoms)).epsilon(1e-9));
    }
}

TEST_CASE("single atom emits isotropically") {
    AtomCloud cloud = sample_cloud(1, 10e-6, 3);
    WaveVectorSet kset = default_wave_vector_set();
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        WaveVectorSet probe = kset;
        probe.k_e = random_emission_direction(kset, rng);
        CHECK(emission_amplitude(cloud, probe) == doctest::Approx(1.0).epsilon(1e-9));
    }
    auto result = enhancement_ratio(cloud, kset, 100, 5);
    CHECK(result.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("amplitude is bounded by N and invariant under rigid translation") {
    WaveVectorSet kset = default_wave_vector_set();
    AtomCloud cloud = sample_cloud(500, 10e-6, 11);
    AtomCloud shifted = cloud;
    Eigen::Vector3d offset(3.2e-6, -1.1e-6, 0.7e-6);
    for (auto& r : shifted.positions) r += offset;

    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        WaveVectorSet probe = kset;
        probe.k_e = random_emission_direction(kset, rng);
        double amp = emission_amplitude(cloud, probe);
        CHECK(amp >= 0.0);
        CHECK(amp <= 500.0 + 1e-9);
        CHECK(emission_amplitude(shifted, probe) == doctest::Approx(amp).epsilon(1e-9));
    }
}

TEST_CASE("random directions average to about 1") {
    AtomCloud cloud = sample_cloud(2000, 10e-6, 21);
    auto result = enhancement_ratio(cloud, default_wave_vector_set(), 1000, 22);
    // mean of an exponential-ish distribution with mean 1 over 1000 samples
    CHECK(result.mean_random_amplitude > 0.8);
    CHECK(result.mean_random_amplitude < 1.2);
    CHECK(result.matched_amplitude == doctest::Approx(2000.0).epsilon(1e-9));
    CHECK(result.ratio > 1000.0);
    CHECK(result.ratio < 4000.0);
}

TEST_CASE("enhancement grows linearly with atom number") {
    WaveVectorSet kset = default_wave_vector_set();
    double log_n[3];
    double log_ratio[3];
    int atoms[] = {100, 500, 2000};
    for (int i = 0; i < 3; ++i) {
        AtomCloud cloud = sample_cloud(atoms[i], 10e-6, 31);
        auto result = enhancement_ratio(cloud, kset, 1000, 32);
        log_n[i] = std::log(static_cast<double>(atoms[i]));
        log_ratio[i] = std::log(result.ratio);
    }
    // least-squares slope in log-log space
    double mean_x = (log_n[0] + log_n[1] + log_n[2]) / 3.0;
    double mean_y = (log_ratio[0] + log_ratio[1] + log_ratio[2]) / 3.0;
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < 3; ++i) {
        num += (log_n[i] - mean_x) * (log_ratio[i] - mean_y);
        den += (log_n[i] - mean_x) * (log_n[i] - mean_x);
    }
    double slope = num / den;
    CHECK(slope > 0.8);
    CHECK(slope < 1.2);
}

TEST_CASE("default wave vectors have the declared magnitudes") {
    WaveVectorSet kset = default_wave_vector_set();
    REQUIRE(kset.k_vectors.size() == 7);
    for (const auto& k : kset.k_vectors) {
        double wavelength = 2.0 * std::numbers::pi / k.norm();
        bool red = std::abs(wavelength - kRedWavelength) < 1e-15;
        bool blue = std::abs(wavelength - kBlueWavelength) < 1e-15;
        CHECK((red || blue));
    }
    // the sequence sums to one red-photon wave vector, so phase matching is
    // physically attainable for the emitted light
    CHECK(kset.k_tot().norm() ==
          doctest::Approx(2.0 * std::numbers::pi / kRedWavelength).epsilon(1e-12));
}
