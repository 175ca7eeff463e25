#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rydrep/bell.hpp"
#include "rydrep/rng.hpp"
#include "rydrep/state.hpp"

namespace rydrep {

enum class PulseKind { pi, half_pi, two_pi, raman, readout };

const char* to_string(PulseKind k);
PulseKind pulse_kind_from_string(const std::string& name);

/// One blockade-aware pulse on a mode pair of one ensemble. `collective`
/// marks collectively enhanced rotations (timing bookkeeping only). Readout
/// pulses map an occupied Rydberg mode onto an emitted photon; the
/// intermediate excited state is never materialized, its decay is folded
/// into the operation.
struct PulseOp {
    PulseKind kind = PulseKind::pi;
    int node = 0;
    Mode from = Mode::g;
    Mode to = Mode::g;  // unused for readout
    bool collective = false;
    double theta = 0.0;  // raman only
    double phi = 0.0;    // raman only
    /// The pulse closes a 2*pi loop on its mode pair (the excitation returns
    /// to a level it was driven out of earlier in the sequence), so the
    /// rotated doublet picks up a -1.
    bool loop_sign = false;

    bool blockade_sensitive() const;
    std::string to_script_line() const;
};

PulseOp make_pi(int node, Mode from, Mode to, bool collective = false, bool loop_sign = false);
PulseOp make_half_pi(int node, Mode from, Mode to);
PulseOp make_two_pi(int node, Mode from, Mode to);
PulseOp make_raman(int node, Mode from, Mode to, double theta, double phi = 0.0);
PulseOp make_readout(int node, Mode rydberg_mode);

/// Polarization of the photon emitted when reading out a Rydberg mode:
/// R_d decays through e_d to sigma-minus, R_u through e_u to sigma-plus.
Polarization readout_polarization(Mode rydberg_mode);

/// Applies one pulse. Blockade-sensitive pulses act as the identity on every
/// basis ket that already holds an occupied Rydberg mode at the pulse's node
/// other than the pulse's own from-mode.
StateVector apply_pulse(const StateVector& state, const PulseOp& op, Convention convention);

/// Quarter-wave plate on all photons emitted by `node`.
StateVector apply_waveplate(const StateVector& state, int node);

struct WaveplateStep {
    int node = 0;
};
struct GlobalPhaseStep {
    double sign = -1.0;
};
using ScriptStep = std::variant<PulseOp, WaveplateStep, GlobalPhaseStep>;

StateVector apply_step(const StateVector& state, const ScriptStep& step, Convention convention);

/// Ordered pulse program with optional per-step reference states for
/// verification (reference states assume the table convention).
struct ProtocolScript {
    std::string name;
    std::vector<ScriptStep> steps;
    std::vector<std::optional<StateVector>> expected;  // parallel to steps when present

    std::string to_text() const;
};

ProtocolScript parse_script(const std::string& text, const std::string& name = "script");
ProtocolScript load_script_file(const std::string& path);

struct ScriptRunResult {
    StateVector state;
    int first_mismatch = -1;  // step index, -1 when all reference states matched
    std::vector<StateVector> trace;
};

/// Runs a script step by step. When `verify` is set and the script carries
/// reference states they are compared amplitude-by-amplitude at `tol`.
ScriptRunResult run_script(const StateVector& initial, const ProtocolScript& script,
                           Convention convention, bool verify = false, bool collect_trace = false,
                           double tol = 1e-9);

bool states_equal(const StateVector& a, const StateVector& b, double tol = 1e-9);

/// Flying-qubit preparation for one node (script `table1`): two collective
/// excitations, a blockade-protected entangling pulse, two readouts and the
/// output wave plate. `first_photon_slot` must match the slot counter of the
/// state the script will run on for the reference states to apply.
ProtocolScript table1_script(int node, int first_photon_slot = 0);

struct Table1Run {
    StateVector state;
    int first_mismatch = -1;
    std::vector<StateVector> trace;
};

/// Runs `table1` on a fresh vacuum and (in table convention) checks every
/// intermediate state against the script's reference rows.
Table1Run run_table1(int num_nodes, int node, Convention convention = Convention::table);

/// Applies the table1 pulses to `node` of an existing state, no verification.
StateVector prepare_flying_qubit(const StateVector& state, int node, Convention convention);

/// Amplitudes of the qubit to teleport.
struct TargetQubit {
    Complex alpha;
    Complex beta;

    TargetQubit(Complex a, Complex b);
};

enum class QubitLabel { u, d };
const char* to_string(QubitLabel l);

/// (target-qubit result, communication-qubit result) of the two measurements
/// at the sending node.
using OutcomePair = std::pair<QubitLabel, QubitLabel>;

std::optional<OutcomePair> outcome_from_string(const std::string& text);
std::string to_string(OutcomePair outcome);

/// Conditional single-qubit rotation at the receiving node, per measurement
/// outcome. The pulses depend on the rotation convention because the
/// convention changes the phases accumulated through the gate sequence.
std::vector<PulseOp> correction_for_outcome(OutcomePair outcome, int node_b,
                                            Convention convention = Convention::table);

/// CNOT-style gate sequence between the target qubit and the communication
/// qubit at `node_a` (script `table2`), with reference rows built for the
/// prepared target amplitudes.
ProtocolScript table2_script(int num_nodes, int node_a, int node_b, Complex alpha, Complex beta);

struct HeraldResult {
    bool success = false;
    BellOutcome outcome;
    StateVector state = StateVector::vacuum(1);
};

/// Joint state of two freshly prepared flying qubits.
StateVector make_joint_table1(int num_nodes, int node_a, int node_b, Convention convention);

/// Feeds the two photons to the Bell analyzer. On a useful coincidence the
/// heralded memory state is rotated to (|u u> + |d d>)/sqrt(2); lost
/// patterns report failure.
HeraldResult run_remote_generation(const StateVector& joint, int node_a, int node_b,
                                   Convention convention, DetectorPair forced);
HeraldResult run_remote_generation(const StateVector& joint, int node_a, int node_b,
                                   Convention convention, Rng& rng);

/// Repeats remote generation with fresh states until heralded.
StateVector generate_entangled_pair(int num_nodes, int node_a, int node_b,
                                    Convention convention, Rng& rng);

/// Reads out the memory at `node_prev` (entangled with node 0), prepares a
/// fresh flying qubit at `node_new` and Bell-measures the two photons,
/// extending node-0 entanglement to `node_new` on success.
HeraldResult extend_entanglement(const StateVector& chain, int node_prev, int node_new,
                                 Convention convention, DetectorPair forced);
HeraldResult extend_entanglement(const StateVector& chain, int node_prev, int node_new,
                                 Convention convention, Rng& rng);

/// Entangles node 0 with node num_nodes-1 through successive photonic swaps,
/// restarting from scratch whenever a herald fails.
StateVector run_swap_chain(int num_nodes, Convention convention, Rng& rng);

struct TeleportRecord {
    OutcomePair outcome;
    double probability = 0.0;  // joint Born probability of the outcome pair
    StateVector state = StateVector::vacuum(1);  // post-correction state
    double fidelity_to_target = 0.0;
    int first_mismatch = -1;             // reference-row check (table convention only)
    std::vector<StateVector> gate_trace;  // per-step states, when requested
};

/// Full teleportation: prepares the target at `node_a` with a Raman rotation,
/// runs table2 plus the final half-pi, measures both qubits at `node_a`
/// (forced or sampled) and applies the outcome correction at `node_b`.
TeleportRecord run_table2_teleport(const StateVector& entangled, int node_a, int node_b,
                                   const TargetQubit& target, Convention convention,
                                   std::optional<OutcomePair> forced, Rng* rng,
                                   bool verify_rows = false, bool collect_trace = false);

/// Two-node convenience wrapper (nodes 0 and 1, sampled outcomes).
TeleportRecord run_table2_teleport(const StateVector& entangled, const TargetQubit& target,
                                   std::uint64_t rng_seed,
                                   Convention convention = Convention::table);

}  // namespace rydrep
