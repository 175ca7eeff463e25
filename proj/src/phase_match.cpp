#include "rydrep/phase_match.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace rydrep {

Eigen::Vector3d WaveVectorSet::k_tot() const {
    Eigen::Vector3d total = Eigen::Vector3d::Zero();
    for (const auto& k : k_vectors) total += k;
    return total;
}

WaveVectorSet default_wave_vector_set() {
    const double k_red = 2.0 * std::numbers::pi / kRedWavelength;
    const double k_blue = 2.0 * std::numbers::pi / kBlueWavelength;
    const Eigen::Vector3d z(0.0, 0.0, 1.0);
    // Collinear sequence 780/480/480/780/780/480/480 with signs chosen so
    // the sum is a single forward 780 nm wave vector, i.e. the emitted
    // photon can be phase matched on the beam axis.
    WaveVectorSet kset;
    kset.k_vectors = {k_red * z,  k_blue * z, -k_blue * z, -k_red * z,
                      k_red * z,  k_blue * z, -k_blue * z};
    kset.k_e = kset.k_tot();
    return kset;
}

AtomCloud sample_cloud(int count, double radius, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_cloud: count must be >= 1");
    if (radius <= 0.0) throw std::invalid_argument("sample_cloud: radius must be positive");
    Rng rng(seed);
    AtomCloud cloud;
    cloud.radius = radius;
    cloud.positions.reserve(count);
    for (int i = 0; i < count; ++i) {
        double z = 2.0 * rng.next_double() - 1.0;
        double azimuth = 2.0 * std::numbers::pi * rng.next_double();
        double r = radius * std::cbrt(rng.next_double());
        double s = std::sqrt(1.0 - z * z);
        cloud.positions.emplace_back(r * s * std::cos(azimuth), r * s * std::sin(azimuth), r * z);
    }
    return cloud;
}

double emission_amplitude(const AtomCloud& cloud, const WaveVectorSet& kset) {
    if (cloud.positions.empty()) throw std::invalid_argument("emission_amplitude: empty cloud");
    Eigen::Vector3d dk = kset.k_tot() - kset.k_e;
    std::complex<double> sum(0.0, 0.0);
    for (const auto& r : cloud.positions) {
        sum += std::polar(1.0, -dk.dot(r));
    }
    return std::norm(sum) / static_cast<double>(cloud.positions.size());
}

Eigen::Vector3d random_emission_direction(const WaveVectorSet& kset, Rng& rng) {
    double z = 2.0 * rng.next_double() - 1.0;
    double azimuth = 2.0 * std::numbers::pi * rng.next_double();
    double s = std::sqrt(1.0 - z * z);
    Eigen::Vector3d direction(s * std::cos(azimuth), s * std::sin(azimuth), z);
    return kset.k_tot().norm() * direction;
}

EnhancementResult enhancement_ratio(const AtomCloud& cloud, const WaveVectorSet& kset,
                                    int num_random_directions, std::uint64_t seed) {
    if (num_random_directions < 1) {
        throw std::invalid_argument("enhancement_ratio: need at least one direction");
    }
    EnhancementResult result;
    WaveVectorSet matched = kset;
    matched.k_e = kset.k_tot();
    result.matched_amplitude = emission_amplitude(cloud, matched);

    Rng rng(seed);
    Eigen::Vector3d axis = kset.k_tot().normalized();
    result.samples.reserve(num_random_directions);
    double total = 0.0;
    for (int i = 0; i < num_random_directions; ++i) {
        WaveVectorSet probe = kset;
        probe.k_e = random_emission_direction(kset, rng);
        double amplitude = emission_amplitude(cloud, probe);
        total += amplitude;
        result.samples.push_back({axis.dot(probe.k_e.normalized()), amplitude});
    }
    result.mean_random_amplitude = total / num_random_directions;
    result.ratio = result.matched_amplitude / result.mean_random_amplitude;
    return result;
}

}  // namespace rydrep
