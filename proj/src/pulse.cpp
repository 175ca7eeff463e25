#include "rydrep/pulse.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rydrep {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

const char* to_string(PulseKind k) {
    switch (k) {
        case PulseKind::pi: return "pi";
        case PulseKind::half_pi: return "half_pi";
        case PulseKind::two_pi: return "two_pi";
        case PulseKind::raman: return "raman";
        case PulseKind::readout: return "readout";
    }
    throw std::invalid_argument("unknown pulse kind");
}

PulseKind pulse_kind_from_string(const std::string& name) {
    if (name == "pi") return PulseKind::pi;
    if (name == "half_pi") return PulseKind::half_pi;
    if (name == "two_pi") return PulseKind::two_pi;
    if (name == "raman") return PulseKind::raman;
    if (name == "readout") return PulseKind::readout;
    throw std::invalid_argument("unknown pulse kind: " + name);
}

bool PulseOp::blockade_sensitive() const {
    if (kind == PulseKind::readout) return false;
    if (is_rydberg(to)) return true;
    return kind == PulseKind::two_pi && is_rydberg(from);
}

std::string PulseOp::to_script_line() const {
    std::ostringstream out;
    out << to_string(kind) << ' ' << node << ' ' << rydrep::to_string(from) << ' '
        << (kind == PulseKind::readout ? "-" : rydrep::to_string(to));
    if (collective) out << " collective";
    if (loop_sign) out << " loop";
    if (kind == PulseKind::raman) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " theta=%.17g phi=%.17g", theta, phi);
        out << buf;
    }
    return out.str();
}

PulseOp make_pi(int node, Mode from, Mode to, bool collective, bool loop_sign) {
    return {PulseKind::pi, node, from, to, collective, 0.0, 0.0, loop_sign};
}
PulseOp make_half_pi(int node, Mode from, Mode to) {
    return {PulseKind::half_pi, node, from, to};
}
PulseOp make_two_pi(int node, Mode from, Mode to) {
    return {PulseKind::two_pi, node, from, to};
}
PulseOp make_raman(int node, Mode from, Mode to, double theta, double phi) {
    return {PulseKind::raman, node, from, to, false, theta, phi};
}
PulseOp make_readout(int node, Mode rydberg_mode) {
    return {PulseKind::readout, node, rydberg_mode, Mode::g};
}

Polarization readout_polarization(Mode rydberg_mode) {
    if (rydberg_mode == Mode::r_d) return Polarization::sigma_minus;
    if (rydberg_mode == Mode::r_u) return Polarization::sigma_plus;
    throw std::invalid_argument("readout_polarization: not a Rydberg mode");
}

namespace {

StateVector apply_readout(const StateVector& state, const PulseOp& op) {
    if (!is_rydberg(op.from)) {
        throw std::invalid_argument("readout: from-mode must be a Rydberg mode");
    }
    Polarization pol = readout_polarization(op.from);
    int slot = state.next_photon_slot();

    StateVector out = StateVector::from_terms(state.num_nodes(), {}, state.prune_epsilon());
    bool any_emitted = false;
    for (const auto& [ket, amp] : state.terms()) {
        if (ket.occupied(op.node, op.from)) {
            out.add_term(ket.without(op.node, op.from)
                             .with_photon({op.node, pol, slot}),
                         amp);
            any_emitted = true;
        } else {
            out.add_term(ket, amp);
        }
    }
    if (!any_emitted) {
        throw protocol_error("readout: Rydberg mode unoccupied in every basis ket");
    }
    out.set_next_photon_slot(slot + 1);
    out.prune();
    return out;
}

void check_blockade_invariant(const StateVector& state, int node) {
    for (const auto& [ket, amp] : state.terms()) {
        if (ket.occupied(node, Mode::r_u) && ket.occupied(node, Mode::r_d)) {
            throw protocol_error("blockade invariant violated: two Rydberg excitations in one node");
        }
    }
}

}  // namespace

StateVector apply_pulse(const StateVector& state, const PulseOp& op, Convention convention) {
    double norm_before = state.norm();
    StateVector out = StateVector::vacuum(1);
    if (op.kind == PulseKind::readout) {
        out = apply_readout(state, op);
    } else {
        if (op.from == op.to) throw std::invalid_argument("apply_pulse: modes must differ");
        double theta = 0.0;
        switch (op.kind) {
            case PulseKind::pi: theta = kPi; break;
            case PulseKind::half_pi: theta = kPi / 2.0; break;
            case PulseKind::two_pi: theta = 2.0 * kPi; break;
            case PulseKind::raman: theta = op.theta; break;
            default: break;
        }
        if (op.loop_sign) {
            if (op.kind != PulseKind::pi) {
                throw std::invalid_argument("apply_pulse: loop flag is only meaningful for pi pulses");
            }
            // A -pi rotation is a pi transfer with the extra loop-closing -1.
            theta = -kPi;
        }
        KetFilter filter;
        if (op.blockade_sensitive()) {
            filter = [node = op.node, from = op.from](const BasisKet& ket) {
                return !ket.rydberg_blocked(node, from);
            };
        }
        out = apply_single_mode_rotation(state, op.node, op.from, op.to, theta, convention,
                                         op.phi, filter);
    }
    if (std::abs(out.norm() - norm_before) > 1e-9) {
        throw std::logic_error("apply_pulse: norm not preserved");
    }
    if (op.blockade_sensitive()) check_blockade_invariant(out, op.node);
    return out;
}

StateVector apply_waveplate(const StateVector& state, int node) {
    StateVector out = StateVector::from_terms(state.num_nodes(), {}, state.prune_epsilon());
    out.set_next_photon_slot(state.next_photon_slot());
    for (const auto& [ket, amp] : state.terms()) {
        BasisKet mapped = ket.without_photons_from(node);
        for (const auto& photon : ket.photons()) {
            if (photon.source_node != node) continue;
            mapped = mapped.with_photon({node, waveplate_map(photon.polarization), photon.slot});
        }
        out.add_term(mapped, amp);
    }
    return out;
}

StateVector apply_step(const StateVector& state, const ScriptStep& step, Convention convention) {
    if (const auto* op = std::get_if<PulseOp>(&step)) return apply_pulse(state, *op, convention);
    if (const auto* wp = std::get_if<WaveplateStep>(&step)) return apply_waveplate(state, wp->node);
    const auto& gp = std::get<GlobalPhaseStep>(step);
    StateVector out = state;
    out.scale(Complex(gp.sign, 0.0));
    return out;
}

std::string ProtocolScript::to_text() const {
    std::ostringstream out;
    out << "# script: " << name << '\n';
    for (const auto& step : steps) {
        if (const auto* op = std::get_if<PulseOp>(&step)) {
            out << op->to_script_line() << '\n';
        } else if (const auto* wp = std::get_if<WaveplateStep>(&step)) {
            out << "waveplate " << wp->node << " - -\n";
        } else {
            const auto& gp = std::get<GlobalPhaseStep>(step);
            out << "gphase 0 - -" << (gp.sign < 0 ? " neg" : " pos") << '\n';
        }
    }
    return out.str();
}

ProtocolScript parse_script(const std::string& text, const std::string& name) {
    ProtocolScript script;
    script.name = name;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream tokens(line);
        std::string kind, from, to;
        int node = 0;
        if (!(tokens >> kind)) continue;  // blank / comment line
        if (!(tokens >> node >> from >> to)) {
            throw std::invalid_argument("parse_script: expected `kind node from to`: " + line);
        }

        if (kind == "waveplate") {
            script.steps.emplace_back(WaveplateStep{node});
            continue;
        }
        if (kind == "gphase") {
            GlobalPhaseStep gp;
            std::string flag;
            if (tokens >> flag) gp.sign = (flag == "pos") ? 1.0 : -1.0;
            script.steps.emplace_back(gp);
            continue;
        }

        PulseOp op;
        op.kind = pulse_kind_from_string(kind);
        op.node = node;
        op.from = mode_from_string(from);
        op.to = (to == "-") ? Mode::g : mode_from_string(to);
        std::string flag;
        while (tokens >> flag) {
            if (flag == "collective") {
                op.collective = true;
            } else if (flag == "loop") {
                op.loop_sign = true;
            } else if (flag.rfind("theta=", 0) == 0) {
                op.theta = std::stod(flag.substr(6));
            } else if (flag.rfind("phi=", 0) == 0) {
                op.phi = std::stod(flag.substr(4));
            } else {
                throw std::invalid_argument("parse_script: unknown flag: " + flag);
            }
        }
        script.steps.emplace_back(op);
    }
    return script;
}

ProtocolScript load_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open script file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_script(buffer.str(), path);
}

bool states_equal(const StateVector& a, const StateVector& b, double tol) {
    if (a.num_nodes() != b.num_nodes()) return false;
    for (const auto& [ket, amp] : a.terms()) {
        if (std::abs(amp - b.amplitude(ket)) > tol) return false;
    }
    for (const auto& [ket, amp] : b.terms()) {
        if (std::abs(amp - a.amplitude(ket)) > tol) return false;
    }
    return true;
}

ScriptRunResult run_script(const StateVector& initial, const ProtocolScript& script,
                           Convention convention, bool verify, bool collect_trace, double tol) {
    ScriptRunResult result{initial, -1, {}};
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        result.state = apply_step(result.state, script.steps[i], convention);
        if (collect_trace) result.trace.push_back(result.state);
        if (verify && result.first_mismatch < 0 && i < script.expected.size() &&
            script.expected[i]) {
            if (!states_equal(result.state, *script.expected[i], tol)) {
                result.first_mismatch = static_cast<int>(i);
            }
        }
    }
    return result;
}

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

BasisKet ket_with(int num_nodes, int node, std::initializer_list<Mode> modes) {
    BasisKet ket(num_nodes);
    for (Mode m : modes) ket = ket.with(node, m);
    return ket;
}

}  // namespace

ProtocolScript table1_script(int node, int first_photon_slot) {
    ProtocolScript script;
    script.name = "table1";
    script.steps = {
        make_pi(node, Mode::g, Mode::r_d, /*collective=*/true),
        make_pi(node, Mode::r_d, Mode::d),
        make_pi(node, Mode::g, Mode::r_u, /*collective=*/true),
        make_half_pi(node, Mode::r_u, Mode::u),
        make_pi(node, Mode::d, Mode::r_d),
        make_readout(node, Mode::r_d),
        make_readout(node, Mode::r_u),
        WaveplateStep{node},
    };

    // Reference rows (table convention). Only single-node scripts starting
    // from vacuum get reference states; embedding nodes skip verification.
    const int n = node + 1;
    auto K = [&](std::initializer_list<Mode> modes) { return ket_with(n, node, modes); };
    const int s0 = first_photon_slot;
    const int s1 = first_photon_slot + 1;
    PhotonRecord minus{node, Polarization::sigma_minus, s0};
    PhotonRecord plus{node, Polarization::sigma_plus, s1};
    PhotonRecord h{node, Polarization::H, s0};
    PhotonRecord v{node, Polarization::V, s1};

    auto sv = [&](std::vector<std::pair<BasisKet, Complex>> terms) {
        return StateVector::from_terms(n, std::move(terms));
    };
    script.expected = {
        sv({{K({Mode::r_d}), 1.0}}),
        sv({{K({Mode::d}), 1.0}}),
        sv({{K({Mode::d, Mode::r_u}), 1.0}}),
        sv({{K({Mode::d, Mode::u}), kInvSqrt2}, {K({Mode::d, Mode::r_u}), kInvSqrt2}}),
        sv({{K({Mode::u, Mode::r_d}), kInvSqrt2}, {K({Mode::d, Mode::r_u}), kInvSqrt2}}),
        sv({{K({Mode::u}).with_photon(minus), kInvSqrt2}, {K({Mode::d, Mode::r_u}), kInvSqrt2}}),
        sv({{K({Mode::u}).with_photon(minus), kInvSqrt2}, {K({Mode::d}).with_photon(plus), kInvSqrt2}}),
        sv({{K({Mode::u}).with_photon(h), kInvSqrt2}, {K({Mode::d}).with_photon(v), kInvSqrt2}}),
    };
    return script;
}

Table1Run run_table1(int num_nodes, int node, Convention convention) {
    if (node < 0 || node >= num_nodes) throw std::invalid_argument("run_table1: node out of range");
    ProtocolScript script = table1_script(node);
    bool verify = (convention == Convention::table) && (num_nodes == node + 1);
    auto run = run_script(make_vacuum(num_nodes), script, convention, verify, true);
    return {run.state, run.first_mismatch, std::move(run.trace)};
}

StateVector prepare_flying_qubit(const StateVector& state, int node, Convention convention) {
    ProtocolScript script = table1_script(node);
    return run_script(state, script, convention).state;
}

TargetQubit::TargetQubit(Complex a, Complex b) : alpha(a), beta(b) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) {
        throw std::invalid_argument("TargetQubit: amplitudes must be normalized");
    }
}

const char* to_string(QubitLabel l) { return l == QubitLabel::u ? "u" : "d"; }

std::optional<OutcomePair> outcome_from_string(const std::string& text) {
    if (text.size() != 2) return std::nullopt;
    auto label = [](char c) -> std::optional<QubitLabel> {
        if (c == 'u') return QubitLabel::u;
        if (c == 'd') return QubitLabel::d;
        return std::nullopt;
    };
    auto a = label(text[0]);
    auto b = label(text[1]);
    if (!a || !b) return std::nullopt;
    return OutcomePair{*a, *b};
}

std::string to_string(OutcomePair outcome) {
    return std::string(to_string(outcome.first)) + to_string(outcome.second);
}

std::vector<PulseOp> correction_for_outcome(OutcomePair outcome, int node_b,
                                            Convention convention) {
    // swap: u <-> d as a Raman pi rotation. phase flip: a blockade-free 2*pi
    // excursion d -> R_d -> d, i.e. -1 exactly on the d component.
    PulseOp swap_ud = make_raman(node_b, Mode::u, Mode::d, kPi);
    PulseOp flip_d = make_two_pi(node_b, Mode::d, Mode::r_d);

    bool target_u = outcome.first == QubitLabel::u;
    bool comm_u = outcome.second == QubitLabel::u;
    if (convention == Convention::table) {
        if (target_u && comm_u) return {};
        if (!target_u && comm_u) return {flip_d};
        if (target_u && !comm_u) return {swap_ud};
        return {swap_ud, flip_d};
    }
    // The rabi-convention gate sequence routes the outcomes differently; the
    // pulses were derived from the same measurement algebra.
    if (target_u && comm_u) return {swap_ud, flip_d};
    if (target_u && !comm_u) return {};
    if (!target_u && comm_u) return {swap_ud};
    return {flip_d};
}

namespace {

StateVector table2_row_state(int num_nodes, int node_a, int node_b, Complex alpha, Complex beta,
                             int row) {
    // Kets are (target, A-qubit, B-qubit); target and A-qubit modes live in
    // node_a. Rows follow the documented gate sequence in the table
    // convention, the pre-phase-removal row carries the loop pulse's -1.
    auto ket3 = [&](Mode target, Mode qa, Mode qb) {
        BasisKet ket(num_nodes);
        if (target != Mode::g) ket = ket.with(node_a, target);
        ket = ket.with(node_a, qa).with(node_b, qb);
        return ket;
    };
    const Complex a2 = alpha * 0.5;
    const Complex b2 = beta * 0.5;
    const Complex as = alpha * kInvSqrt2;
    const Complex bs = beta * kInvSqrt2;
    using M = Mode;
    switch (row) {
        case 0:  // after pi(u_t -> R_d)
            return StateVector::from_terms(
                num_nodes, {{ket3(M::r_d, M::u, M::u), as},
                            {ket3(M::r_d, M::d, M::d), as},
                            {ket3(M::d_t, M::u, M::u), bs},
                            {ket3(M::d_t, M::d, M::d), bs}});
        case 1:  // after half_pi(u_A -> d_A)
            return StateVector::from_terms(
                num_nodes, {{ket3(M::r_d, M::u, M::u), a2},
                            {ket3(M::r_d, M::d, M::u), a2},
                            {ket3(M::r_d, M::u, M::d), a2},
                            {ket3(M::r_d, M::d, M::d), -a2},
                            {ket3(M::d_t, M::u, M::u), b2},
                            {ket3(M::d_t, M::d, M::u), b2},
                            {ket3(M::d_t, M::u, M::d), b2},
                            {ket3(M::d_t, M::d, M::d), -b2}});
        case 2:  // after the blockaded two_pi(u_A -> R_u)
            return StateVector::from_terms(
                num_nodes, {{ket3(M::r_d, M::u, M::u), a2},
                            {ket3(M::r_d, M::d, M::u), a2},
                            {ket3(M::r_d, M::u, M::d), a2},
                            {ket3(M::r_d, M::d, M::d), -a2},
                            {ket3(M::d_t, M::u, M::u), -b2},
                            {ket3(M::d_t, M::d, M::u), b2},
                            {ket3(M::d_t, M::u, M::d), -b2},
                            {ket3(M::d_t, M::d, M::d), -b2}});
        case 3:  // after the second half_pi(u_A -> d_A)
            return StateVector::from_terms(
                num_nodes, {{ket3(M::r_d, M::u, M::u), as},
                            {ket3(M::r_d, M::d, M::d), as},
                            {ket3(M::d_t, M::d, M::u), -bs},
                            {ket3(M::d_t, M::u, M::d), -bs}});
        case 4:  // after the loop-closing pi(R_d -> u_t), overall -1 pending
            return StateVector::from_terms(
                num_nodes, {{ket3(M::u_t, M::u, M::u), -as},
                            {ket3(M::u_t, M::d, M::d), -as},
                            {ket3(M::d_t, M::d, M::u), -bs},
                            {ket3(M::d_t, M::u, M::d), -bs}});
        case 5:  // after removing the overall pi phase
            return StateVector::from_terms(
                num_nodes, {{ket3(M::u_t, M::u, M::u), as},
                            {ket3(M::u_t, M::d, M::d), as},
                            {ket3(M::d_t, M::d, M::u), bs},
                            {ket3(M::d_t, M::u, M::d), bs}});
        default:
            throw std::logic_error("table2_row_state: bad row");
    }
}

}  // namespace

ProtocolScript table2_script(int num_nodes, int node_a, int node_b, Complex alpha, Complex beta) {
    ProtocolScript script;
    script.name = "table2";
    script.steps = {
        make_pi(node_a, Mode::u_t, Mode::r_d),
        make_half_pi(node_a, Mode::u, Mode::d),
        make_two_pi(node_a, Mode::u, Mode::r_u),
        make_half_pi(node_a, Mode::u, Mode::d),
        make_pi(node_a, Mode::r_d, Mode::u_t, /*collective=*/false, /*loop_sign=*/true),
        GlobalPhaseStep{-1.0},
    };
    for (int row = 0; row < 6; ++row) {
        script.expected.emplace_back(table2_row_state(num_nodes, node_a, node_b, alpha, beta, row));
    }
    return script;
}

StateVector make_joint_table1(int num_nodes, int node_a, int node_b, Convention convention) {
    StateVector state = make_vacuum(num_nodes);
    state = prepare_flying_qubit(state, node_a, convention);
    state = prepare_flying_qubit(state, node_b, convention);
    return state;
}

namespace {

HeraldResult heralded_branch(const std::vector<AnalyzerBranch>& branches, std::size_t index,
                             int correction_node, Convention convention, bool swap_step) {
    const AnalyzerBranch& branch = branches[index];
    HeraldResult result;
    result.outcome = branch.outcome;
    result.state = branch.projected;
    if (branch.outcome.kind == Herald::lost) {
        result.success = false;
        return result;
    }
    result.success = true;

    // Conditional local rotation bringing the heralded state to the
    // (|uu> + |dd>)/sqrt(2) form. A swap-type Bell measurement reads the
    // inner memory out through the opposite-polarization channel, so it
    // additionally needs the bit flip at the fresh node.
    bool plus = branch.outcome.kind == Herald::phi_plus;
    std::vector<PulseOp> ops;
    PulseOp swap_ud = make_raman(correction_node, Mode::u, Mode::d, kPi);
    PulseOp flip_d = make_two_pi(correction_node, Mode::d, Mode::r_d);
    if (!swap_step) {
        if (!plus) ops = {flip_d};
    } else if (convention == Convention::table) {
        ops = plus ? std::vector<PulseOp>{swap_ud} : std::vector<PulseOp>{swap_ud, flip_d};
    } else {
        ops = plus ? std::vector<PulseOp>{swap_ud, flip_d} : std::vector<PulseOp>{swap_ud};
    }
    for (const auto& op : ops) result.state = apply_pulse(result.state, op, convention);
    return result;
}

std::size_t find_branch(const std::vector<AnalyzerBranch>& branches, DetectorPair forced) {
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (branches[i].outcome.detectors == forced) return i;
    }
    throw std::invalid_argument("forced detector pattern has zero probability");
}

std::size_t sample_branch(const std::vector<AnalyzerBranch>& branches, Rng& rng) {
    double u = rng.next_double();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        cumulative += branches[i].outcome.probability;
        if (u < cumulative) return i;
    }
    return branches.size() - 1;
}

}  // namespace

namespace {

void check_node_pair(const StateVector& state, int node_a, int node_b) {
    if (node_a == node_b || node_a < 0 || node_b < 0 || node_a >= state.num_nodes() ||
        node_b >= state.num_nodes()) {
        throw std::invalid_argument("remote generation: invalid node pair");
    }
}

}  // namespace

HeraldResult run_remote_generation(const StateVector& joint, int node_a, int node_b,
                                   Convention convention, DetectorPair forced) {
    check_node_pair(joint, node_a, node_b);
    auto branches = analyze(joint);
    return heralded_branch(branches, find_branch(branches, forced), node_b, convention, false);
}

HeraldResult run_remote_generation(const StateVector& joint, int node_a, int node_b,
                                   Convention convention, Rng& rng) {
    check_node_pair(joint, node_a, node_b);
    auto branches = analyze(joint);
    return heralded_branch(branches, sample_branch(branches, rng), node_b, convention, false);
}

StateVector generate_entangled_pair(int num_nodes, int node_a, int node_b,
                                    Convention convention, Rng& rng) {
    for (;;) {
        StateVector joint = make_joint_table1(num_nodes, node_a, node_b, convention);
        HeraldResult result = run_remote_generation(joint, node_a, node_b, convention, rng);
        if (result.success) return result.state;
    }
}

namespace {

StateVector read_out_memory(const StateVector& state, int node, Convention convention) {
    StateVector out = state;
    out = apply_pulse(out, make_pi(node, Mode::u, Mode::r_u), convention);
    out = apply_pulse(out, make_readout(node, Mode::r_u), convention);
    out = apply_pulse(out, make_pi(node, Mode::d, Mode::r_d), convention);
    out = apply_pulse(out, make_readout(node, Mode::r_d), convention);
    return apply_waveplate(out, node);
}

HeraldResult extend_impl(const StateVector& chain, int node_prev, int node_new,
                         Convention convention, std::optional<DetectorPair> forced, Rng* rng) {
    StateVector joint = read_out_memory(chain, node_prev, convention);
    joint = prepare_flying_qubit(joint, node_new, convention);
    auto branches = analyze(joint);
    std::size_t index = forced ? find_branch(branches, *forced) : sample_branch(branches, *rng);
    return heralded_branch(branches, index, node_new, convention, true);
}

}  // namespace

HeraldResult extend_entanglement(const StateVector& chain, int node_prev, int node_new,
                                 Convention convention, DetectorPair forced) {
    return extend_impl(chain, node_prev, node_new, convention, forced, nullptr);
}

HeraldResult extend_entanglement(const StateVector& chain, int node_prev, int node_new,
                                 Convention convention, Rng& rng) {
    return extend_impl(chain, node_prev, node_new, convention, std::nullopt, &rng);
}

StateVector run_swap_chain(int num_nodes, Convention convention, Rng& rng) {
    if (num_nodes < 2) throw std::invalid_argument("run_swap_chain: need at least 2 nodes");
    for (;;) {
        StateVector joint = make_joint_table1(num_nodes, 0, 1, convention);
        HeraldResult link = run_remote_generation(joint, 0, 1, convention, rng);
        if (!link.success) continue;
        StateVector chain = link.state;
        bool failed = false;
        for (int node = 2; node < num_nodes; ++node) {
            HeraldResult extended = extend_entanglement(chain, node - 1, node, convention, rng);
            if (!extended.success) {
                failed = true;
                break;
            }
            chain = extended.state;
        }
        if (!failed) return chain;
    }
}

namespace {

void validate_canonical_pair(const StateVector& state, int node_a, int node_b) {
    if (state.size() != 2) throw protocol_error("teleport: entangled input must have two terms");
    BasisKet uu =
        BasisKet(state.num_nodes()).with(node_a, Mode::u).with(node_b, Mode::u);
    BasisKet dd =
        BasisKet(state.num_nodes()).with(node_a, Mode::d).with(node_b, Mode::d);
    Complex amp_uu = state.amplitude(uu);
    Complex amp_dd = state.amplitude(dd);
    if (std::abs(std::abs(amp_uu) - kInvSqrt2) > 1e-6 ||
        std::abs(std::abs(amp_dd) - kInvSqrt2) > 1e-6 ||
        std::abs(amp_uu - amp_dd) > 1e-6) {
        throw protocol_error("teleport: input is not the canonical (|uu> + |dd>)/sqrt(2) pair");
    }
}

QubitLabel label_of(Mode measured) {
    return (measured == Mode::u || measured == Mode::u_t) ? QubitLabel::u : QubitLabel::d;
}

}  // namespace

TeleportRecord run_table2_teleport(const StateVector& entangled, int node_a, int node_b,
                                   const TargetQubit& target, Convention convention,
                                   std::optional<OutcomePair> forced, Rng* rng,
                                   bool verify_rows, bool collect_trace) {
    validate_canonical_pair(entangled, node_a, node_b);
    if (!forced && !rng) throw std::invalid_argument("teleport: need forced outcome or rng");

    // Target preparation: collective excitation shelved into u_t, then a
    // Raman rotation to the requested amplitudes. The rotation reaches
    // (alpha, beta) up to the global phase exp(-i arg alpha).
    double theta = 2.0 * std::atan2(std::abs(target.beta), std::abs(target.alpha));
    double rel_phase = std::arg(target.beta) - std::arg(target.alpha);
    double phi = (convention == Convention::table) ? rel_phase : rel_phase + kPi / 2.0;
    Complex prep_alpha = std::abs(target.alpha);
    Complex prep_beta = std::polar(std::abs(target.beta), rel_phase);

    StateVector state = entangled;
    state = apply_pulse(state, make_pi(node_a, Mode::g, Mode::r_d, true), convention);
    state = apply_pulse(state, make_pi(node_a, Mode::r_d, Mode::u_t), convention);
    if (theta != 0.0) {
        state = apply_pulse(state, make_raman(node_a, Mode::u_t, Mode::d_t, theta, phi), convention);
    }

    ProtocolScript script =
        table2_script(state.num_nodes(), node_a, node_b, prep_alpha, prep_beta);
    bool verify = verify_rows && convention == Convention::table;
    auto run = run_script(state, script, convention, verify, collect_trace);
    state = run.state;

    state = apply_pulse(state, make_half_pi(node_a, Mode::u_t, Mode::d_t), convention);

    MeasureResult target_meas =
        forced ? project_modes(state, node_a, {Mode::u_t, Mode::d_t},
                               forced->first == QubitLabel::u ? Mode::u_t : Mode::d_t)
               : measure_modes(state, node_a, {Mode::u_t, Mode::d_t}, *rng);
    MeasureResult comm_meas =
        forced ? project_modes(target_meas.collapsed, node_a, {Mode::u, Mode::d},
                               forced->second == QubitLabel::u ? Mode::u : Mode::d)
               : measure_modes(target_meas.collapsed, node_a, {Mode::u, Mode::d}, *rng);

    TeleportRecord record;
    record.outcome = {label_of(target_meas.outcome), label_of(comm_meas.outcome)};
    record.probability = target_meas.probability * comm_meas.probability;
    record.first_mismatch = run.first_mismatch;
    record.gate_trace = std::move(run.trace);

    StateVector corrected = comm_meas.collapsed;
    for (const auto& op : correction_for_outcome(record.outcome, node_b, convention)) {
        corrected = apply_pulse(corrected, op, convention);
    }
    record.state = corrected;

    StateVector reference = StateVector::from_terms(
        entangled.num_nodes(),
        {{BasisKet(entangled.num_nodes()).with(node_b, Mode::u), target.alpha},
         {BasisKet(entangled.num_nodes()).with(node_b, Mode::d), target.beta}});
    record.fidelity_to_target = fidelity(reference, corrected);
    return record;
}

TeleportRecord run_table2_teleport(const StateVector& entangled, const TargetQubit& target,
                                   std::uint64_t rng_seed, Convention convention) {
    Rng rng(rng_seed);
    return run_table2_teleport(entangled, 0, 1, target, convention, std::nullopt, &rng, false);
}

}  // namespace rydrep
