#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rydrep/rng.hpp"

namespace rydrep {

/// Atom positions inside one blockade sphere.
struct AtomCloud {
    std::vector<Eigen::Vector3d> positions;  // meters, centered on the origin
    double radius = 10e-6;

    int count() const { return static_cast<int>(positions.size()); }
};

/// Wave vectors of the pulse sequence plus a candidate emission direction.
/// The default geometry keeps every beam on one axis with 780 nm / 480 nm
/// wavelengths arranged so the sequence sum equals one 780 nm wave vector.
struct WaveVectorSet {
    std::vector<Eigen::Vector3d> k_vectors;  // rad/m
    Eigen::Vector3d k_e = Eigen::Vector3d::Zero();

    Eigen::Vector3d k_tot() const;
};

constexpr double kRedWavelength = 780e-9;
constexpr double kBlueWavelength = 480e-9;

WaveVectorSet default_wave_vector_set();

/// N uniform positions in the blockade sphere; identical seeds give
/// identical clouds.
AtomCloud sample_cloud(int count, double radius, std::uint64_t seed);

/// (1/N) |sum_j exp(-i (k_tot - k_e) . r_j)|^2. Equals N exactly on the
/// phase-matched direction and averages to 1 for arbitrary directions.
double emission_amplitude(const AtomCloud& cloud, const WaveVectorSet& kset);

/// Uniform direction on the sphere with the magnitude of k_tot.
Eigen::Vector3d random_emission_direction(const WaveVectorSet& kset, Rng& rng);

struct EnhancementSample {
    double cos_angle = 0.0;  // against k_tot
    double amplitude = 0.0;
};

struct EnhancementResult {
    double matched_amplitude = 0.0;
    double mean_random_amplitude = 0.0;
    double ratio = 0.0;
    std::vector<EnhancementSample> samples;
};

/// Phase-matched amplitude divided by the mean over random directions;
/// approaches the atom number for a dense cloud.
EnhancementResult enhancement_ratio(const AtomCloud& cloud, const WaveVectorSet& kset,
                                    int num_random_directions, std::uint64_t seed);

}  // namespace rydrep
