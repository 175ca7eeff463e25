#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rydrep/rng.hpp"

namespace rydrep {

using Complex = std::complex<double>;

/// Raised when a state does not satisfy the precondition of a protocol step
/// (as opposed to a plain bad argument).
struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Collective single-excitation modes of one ensemble. `g` is the reservoir:
/// it is never stored in a ket, absence of an excitation means the population
/// sits in g. `u_t`/`d_t` hold the qubit to be teleported; `r_u`/`r_d` are the
/// Rydberg levels; `e_u`/`e_d` the intermediate excited levels (kept for
/// completeness, the pulse sequences never populate them).
enum class Mode : std::uint8_t { g = 0, u, d, u_t, d_t, r_u, r_d, e_u, e_d };

constexpr int kNumStoredModes = 8;  // everything except g

constexpr bool is_rydberg(Mode m) { return m == Mode::r_u || m == Mode::r_d; }
constexpr bool is_intermediate(Mode m) { return m == Mode::e_u || m == Mode::e_d; }

const char* to_string(Mode m);
Mode mode_from_string(const std::string& name);

enum class Polarization : std::uint8_t { sigma_plus, sigma_minus, H, V };

const char* to_string(Polarization p);
Polarization polarization_from_string(const std::string& name);

/// Quarter-wave-plate mapping between circular and linear polarization:
/// sigma_minus <-> H, sigma_plus <-> V.
Polarization waveplate_map(Polarization p);

struct PhotonRecord {
    int source_node = 0;
    Polarization polarization = Polarization::H;
    int slot = 0;

    friend auto operator<=>(const PhotonRecord&, const PhotonRecord&) = default;
};

/// One classical configuration: per-node occupation of the stored modes plus
/// the ordered list of emitted photons. Photons are kept sorted by slot so
/// equal configurations compare equal.
class BasisKet {
public:
    explicit BasisKet(int num_nodes);

    int num_nodes() const { return static_cast<int>(occ_.size()); }

    bool occupied(int node, Mode m) const;
    /// True if any Rydberg mode of `node` other than `excluding` is occupied.
    bool rydberg_blocked(int node, std::optional<Mode> excluding = std::nullopt) const;
    int occupation_count(int node) const;
    std::vector<Mode> modes(int node) const;

    BasisKet with(int node, Mode m) const;
    BasisKet without(int node, Mode m) const;

    const std::vector<PhotonRecord>& photons() const { return photons_; }
    BasisKet with_photon(PhotonRecord photon) const;
    BasisKet without_photons_from(int node) const;
    BasisKet without_all_photons() const;

    friend auto operator<=>(const BasisKet&, const BasisKet&) = default;

    /// `node0:{u,R_u} node1:{} | photons:[n0:H@0]`
    std::string to_string() const;
    static BasisKet parse(const std::string& text);

private:
    void check(int node, Mode m) const;

    std::vector<std::uint8_t> occ_;  // bit (mode-1) set = mode occupied
    std::vector<PhotonRecord> photons_;
};

/// Sparse superposition over BasisKets. Values are immutable once built by an
/// operation; all operations below are pure functions returning new states.
class StateVector {
public:
    static constexpr double kDefaultPruneEpsilon = 1e-12;

    static StateVector vacuum(int num_nodes);
    static StateVector from_terms(int num_nodes,
                                  std::vector<std::pair<BasisKet, Complex>> terms,
                                  double prune_epsilon = kDefaultPruneEpsilon);

    int num_nodes() const { return num_nodes_; }
    const std::map<BasisKet, Complex>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    double prune_epsilon() const { return prune_epsilon_; }

    Complex amplitude(const BasisKet& ket) const;
    double norm_squared() const;
    double norm() const;

    /// Next free photon slot id; advanced by readout operations.
    int next_photon_slot() const { return next_photon_slot_; }
    void set_next_photon_slot(int slot) { next_photon_slot_ = slot; }

    void add_term(const BasisKet& ket, Complex amp);
    void prune();
    void scale(Complex factor);
    void renormalize();

    /// Deterministic sorted listing, one term per line:
    /// `amplitude_re amplitude_im | node0:{modes} node1:{modes} | photons:[...]`
    std::string to_debug_string() const;

private:
    explicit StateVector(int num_nodes);

    int num_nodes_ = 0;
    std::map<BasisKet, Complex> terms_;
    double prune_epsilon_ = kDefaultPruneEpsilon;
    int next_photon_slot_ = 0;
};

StateVector make_vacuum(int num_nodes);

/// Phase conventions for the two-level rotations.
///   table: real, phase-free maps (pi swaps with +1, pi/2 is the
///          (a+b)/(a-b) half-sum map); a 2*pi pulse contributes -1 on every
///          ket where the a<->b transition is resonant.
///   rabi:  standard two-level rotation matrix with -i off-diagonals.
enum class Convention { table, rabi };

const char* to_string(Convention c);
Convention convention_from_string(const std::string& name);

/// Optional per-ket participation filter. Kets mapped to false are passed
/// through unchanged; blockade filtering by the pulse layer uses this hook.
using KetFilter = std::function<bool(const BasisKet&)>;

/// Two-level rotation by `theta` (with azimuthal phase `phi`) on the mode
/// pair (a, b) of `node`. `a` may be the reservoir g, in which case every
/// participating ket belongs to a {no excitation, b occupied} doublet.
/// theta == 2*pi is the resonant sign flip in both conventions.
StateVector apply_single_mode_rotation(const StateVector& state, int node, Mode a, Mode b,
                                       double theta, Convention convention,
                                       double phi = 0.0, const KetFilter& participates = {});

Complex inner_product(const StateVector& a, const StateVector& b);
double fidelity(const StateVector& a, const StateVector& b);

struct MeasureResult {
    Mode outcome;
    StateVector collapsed;
    double probability = 0.0;
};

/// Projects onto `forced` of the qubit pair (first, second) at `node` and
/// renormalizes. Every ket must occupy exactly one of the two modes. The
/// measured excitation is consumed (field-ionization style readout), so the
/// collapsed state no longer occupies either mode of the pair.
MeasureResult project_modes(const StateVector& state, int node,
                            std::pair<Mode, Mode> qubit, Mode forced);

/// Samples one of the two modes with the Born probability.
MeasureResult measure_modes(const StateVector& state, int node,
                            std::pair<Mode, Mode> qubit, Rng& rng);

}  // namespace rydrep
