#include "rydrep/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rydrep {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int mode_bit(Mode m) { return static_cast<int>(m) - 1; }

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) < tol; }

std::string format_amplitude(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::g: return "g";
        case Mode::u: return "u";
        case Mode::d: return "d";
        case Mode::u_t: return "u_t";
        case Mode::d_t: return "d_t";
        case Mode::r_u: return "R_u";
        case Mode::r_d: return "R_d";
        case Mode::e_u: return "e_u";
        case Mode::e_d: return "e_d";
    }
    throw std::invalid_argument("unknown mode");
}

Mode mode_from_string(const std::string& name) {
    static const std::map<std::string, Mode> lookup = {
        {"g", Mode::g},     {"u", Mode::u},     {"d", Mode::d},
        {"u_t", Mode::u_t}, {"d_t", Mode::d_t}, {"R_u", Mode::r_u},
        {"R_d", Mode::r_d}, {"e_u", Mode::e_u}, {"e_d", Mode::e_d},
    };
    auto it = lookup.find(name);
    if (it == lookup.end()) throw std::invalid_argument("unknown mode name: " + name);
    return it->second;
}

const char* to_string(Polarization p) {
    switch (p) {
        case Polarization::sigma_plus: return "s+";
        case Polarization::sigma_minus: return "s-";
        case Polarization::H: return "H";
        case Polarization::V: return "V";
    }
    throw std::invalid_argument("unknown polarization");
}

Polarization polarization_from_string(const std::string& name) {
    if (name == "s+") return Polarization::sigma_plus;
    if (name == "s-") return Polarization::sigma_minus;
    if (name == "H") return Polarization::H;
    if (name == "V") return Polarization::V;
    throw std::invalid_argument("unknown polarization name: " + name);
}

Polarization waveplate_map(Polarization p) {
    switch (p) {
        case Polarization::sigma_minus: return Polarization::H;
        case Polarization::sigma_plus: return Polarization::V;
        case Polarization::H: return Polarization::sigma_minus;
        case Polarization::V: return Polarization::sigma_plus;
    }
    throw std::invalid_argument("unknown polarization");
}

BasisKet::BasisKet(int num_nodes) {
    if (num_nodes < 1) throw std::invalid_argument("BasisKet: num_nodes must be >= 1");
    occ_.assign(static_cast<std::size_t>(num_nodes), 0);
}

void BasisKet::check(int node, Mode m) const {
    if (node < 0 || node >= num_nodes()) throw std::invalid_argument("BasisKet: node out of range");
    if (m == Mode::g) throw std::invalid_argument("BasisKet: the reservoir g is implicit, never stored");
}

bool BasisKet::occupied(int node, Mode m) const {
    check(node, m);
    return (occ_[node] >> mode_bit(m)) & 1u;
}

bool BasisKet::rydberg_blocked(int node, std::optional<Mode> excluding) const {
    for (Mode m : {Mode::r_u, Mode::r_d}) {
        if (excluding && *excluding == m) continue;
        if (occupied(node, m)) return true;
    }
    return false;
}

int BasisKet::occupation_count(int node) const {
    if (node < 0 || node >= num_nodes()) throw std::invalid_argument("BasisKet: node out of range");
    return std::popcount(static_cast<unsigned>(occ_[node]));
}

std::vector<Mode> BasisKet::modes(int node) const {
    std::vector<Mode> out;
    for (int bit = 0; bit < kNumStoredModes; ++bit) {
        if ((occ_[node] >> bit) & 1u) out.push_back(static_cast<Mode>(bit + 1));
    }
    return out;
}

BasisKet BasisKet::with(int node, Mode m) const {
    check(node, m);
    if (occupied(node, m)) throw protocol_error("BasisKet: mode already occupied");
    BasisKet copy = *this;
    copy.occ_[node] |= static_cast<std::uint8_t>(1u << mode_bit(m));
    return copy;
}

BasisKet BasisKet::without(int node, Mode m) const {
    check(node, m);
    if (!occupied(node, m)) throw protocol_error("BasisKet: mode not occupied");
    BasisKet copy = *this;
    copy.occ_[node] &= static_cast<std::uint8_t>(~(1u << mode_bit(m)));
    return copy;
}

BasisKet BasisKet::with_photon(PhotonRecord photon) const {
    if (photon.source_node < 0 || photon.source_node >= num_nodes()) {
        throw std::invalid_argument("BasisKet: photon source node out of range");
    }
    BasisKet copy = *this;
    for (const auto& existing : copy.photons_) {
        if (existing.slot == photon.slot) throw protocol_error("BasisKet: duplicate photon slot");
    }
    copy.photons_.push_back(photon);
    std::sort(copy.photons_.begin(), copy.photons_.end());
    return copy;
}

BasisKet BasisKet::without_photons_from(int node) const {
    BasisKet copy = *this;
    std::erase_if(copy.photons_, [node](const PhotonRecord& p) { return p.source_node == node; });
    return copy;
}

BasisKet BasisKet::without_all_photons() const {
    BasisKet copy = *this;
    copy.photons_.clear();
    return copy;
}

std::string BasisKet::to_string() const {
    std::ostringstream out;
    for (int node = 0; node < num_nodes(); ++node) {
        if (node > 0) out << ' ';
        out << "node" << node << ":{";
        bool first = true;
        for (Mode m : modes(node)) {
            if (!first) out << ',';
            out << rydrep::to_string(m);
            first = false;
        }
        out << '}';
    }
    out << " | photons:[";
    bool first = true;
    for (const auto& p : photons_) {
        if (!first) out << ',';
        out << 'n' << p.source_node << ':' << rydrep::to_string(p.polarization) << '@' << p.slot;
        first = false;
    }
    out << ']';
    return out.str();
}

BasisKet BasisKet::parse(const std::string& text) {
    auto bar = text.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("BasisKet::parse: missing '|'");
    std::string nodes_part = text.substr(0, bar);
    std::string photons_part = text.substr(bar + 1);

    std::vector<std::pair<int, std::vector<Mode>>> node_modes;
    std::istringstream in(nodes_part);
    std::string token;
    while (in >> token) {
        if (token.rfind("node", 0) != 0) throw std::invalid_argument("BasisKet::parse: expected nodeN:{...}");
        auto brace = token.find(":{");
        if (brace == std::string::npos || token.back() != '}') {
            throw std::invalid_argument("BasisKet::parse: malformed node token");
        }
        int node = std::stoi(token.substr(4, brace - 4));
        std::string body = token.substr(brace + 2, token.size() - brace - 3);
        std::vector<Mode> modes;
        std::size_t pos = 0;
        while (pos < body.size()) {
            auto comma = body.find(',', pos);
            if (comma == std::string::npos) comma = body.size();
            modes.push_back(mode_from_string(body.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        node_modes.emplace_back(node, std::move(modes));
    }
    if (node_modes.empty()) throw std::invalid_argument("BasisKet::parse: no nodes");

    BasisKet ket(static_cast<int>(node_modes.size()));
    for (const auto& [node, modes] : node_modes) {
        for (Mode m : modes) ket = ket.with(node, m);
    }

    auto lb = photons_part.find('[');
    auto rb = photons_part.rfind(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
        throw std::invalid_argument("BasisKet::parse: malformed photon list");
    }
    std::string body = photons_part.substr(lb + 1, rb - lb - 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto comma = body.find(',', pos);
        if (comma == std::string::npos) comma = body.size();
        std::string item = body.substr(pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) continue;
        if (item[0] != 'n') throw std::invalid_argument("BasisKet::parse: malformed photon");
        auto colon = item.find(':');
        auto at = item.find('@');
        if (colon == std::string::npos || at == std::string::npos || at < colon) {
            throw std::invalid_argument("BasisKet::parse: malformed photon");
        }
        PhotonRecord photon;
        photon.source_node = std::stoi(item.substr(1, colon - 1));
        photon.polarization = polarization_from_string(item.substr(colon + 1, at - colon - 1));
        photon.slot = std::stoi(item.substr(at + 1));
        ket = ket.with_photon(photon);
    }
    return ket;
}

StateVector::StateVector(int num_nodes) : num_nodes_(num_nodes) {}

StateVector StateVector::vacuum(int num_nodes) {
    if (num_nodes < 1) throw std::invalid_argument("StateVector: num_nodes must be >= 1");
    StateVector state(num_nodes);
    state.terms_.emplace(BasisKet(num_nodes), Complex(1.0, 0.0));
    return state;
}

StateVector StateVector::from_terms(int num_nodes,
                                    std::vector<std::pair<BasisKet, Complex>> terms,
                                    double prune_epsilon) {
    if (num_nodes < 1) throw std::invalid_argument("StateVector: num_nodes must be >= 1");
    StateVector state(num_nodes);
    state.prune_epsilon_ = prune_epsilon;
    int max_slot = -1;
    for (auto& [ket, amp] : terms) {
        if (ket.num_nodes() != num_nodes) {
            throw std::invalid_argument("StateVector: ket node count mismatch");
        }
        state.add_term(ket, amp);
        for (const auto& p : ket.photons()) max_slot = std::max(max_slot, p.slot);
    }
    state.prune();
    state.next_photon_slot_ = max_slot + 1;
    return state;
}

Complex StateVector::amplitude(const BasisKet& ket) const {
    auto it = terms_.find(ket);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

double StateVector::norm_squared() const {
    double total = 0.0;
    for (const auto& [ket, amp] : terms_) total += std::norm(amp);
    return total;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

void StateVector::add_term(const BasisKet& ket, Complex amp) {
    auto [it, inserted] = terms_.emplace(ket, amp);
    if (!inserted) it->second += amp;
}

void StateVector::prune() {
    std::erase_if(terms_, [this](const auto& kv) { return std::abs(kv.second) < prune_epsilon_; });
}

void StateVector::scale(Complex factor) {
    for (auto& [ket, amp] : terms_) amp *= factor;
}

void StateVector::renormalize() {
    double n = norm();
    if (n <= 0.0) throw protocol_error("StateVector: cannot renormalize a zero state");
    scale(Complex(1.0 / n, 0.0));
}

std::string StateVector::to_debug_string() const {
    std::ostringstream out;
    for (const auto& [ket, amp] : terms_) {
        out << format_amplitude(amp.real()) << ' ' << format_amplitude(amp.imag()) << " | "
            << ket.to_string() << '\n';
    }
    return out.str();
}

StateVector make_vacuum(int num_nodes) { return StateVector::vacuum(num_nodes); }

const char* to_string(Convention c) {
    return c == Convention::table ? "table" : "rabi";
}

Convention convention_from_string(const std::string& name) {
    if (name == "table") return Convention::table;
    if (name == "rabi") return Convention::rabi;
    throw std::invalid_argument("unknown convention: " + name);
}

namespace {

struct RotationMatrix {
    // |a> -> aa|a> + ba|b>,  |b> -> ab|a> + bb|b>
    Complex aa, ab, ba, bb;
};

RotationMatrix rotation_matrix(double theta, double phi, Convention convention) {
    double c = std::cos(theta / 2.0);
    double s = std::sin(theta / 2.0);
    Complex eip = std::polar(1.0, phi);
    Complex eim = std::polar(1.0, -phi);
    if (convention == Convention::table) {
        return {c, eim * s, eip * s, -c};
    }
    const Complex mi(0.0, -1.0);
    return {c, mi * eim * s, mi * eip * s, c};
}

}  // namespace

namespace {

// The other member of a ket's rotation doublet (precondition: not dark).
BasisKet doublet_partner(const BasisKet& ket, int node, Mode a, Mode b, bool occ_a) {
    if (a == Mode::g) return occ_a ? ket.with(node, b) : ket.without(node, b);
    return occ_a ? ket.without(node, a).with(node, b) : ket.without(node, b).with(node, a);
}

}  // namespace

StateVector apply_single_mode_rotation(const StateVector& state, int node, Mode a, Mode b,
                                       double theta, Convention convention, double phi,
                                       const KetFilter& participates) {
    if (a == b) throw std::invalid_argument("rotation: modes must differ");
    if (b == Mode::g) throw std::invalid_argument("rotation: b must be a stored mode");
    if (node < 0 || node >= state.num_nodes()) throw std::invalid_argument("rotation: node out of range");

    const bool from_reservoir = (a == Mode::g);
    const bool is_two_pi = close(theta, kTwoPi, 1e-9);
    RotationMatrix m = rotation_matrix(theta, phi, convention);

    StateVector out = StateVector::from_terms(state.num_nodes(), {}, state.prune_epsilon());
    out.set_next_photon_slot(state.next_photon_slot());

    auto emit = [&](const BasisKet& target, Complex coeff) {
        if (std::abs(coeff) < 1e-15) return;
        if (is_rydberg(a) || is_rydberg(b)) {
            if (target.occupied(node, Mode::r_u) && target.occupied(node, Mode::r_d)) {
                throw protocol_error(
                    "rotation would create a second Rydberg excitation in one node");
            }
        }
        out.add_term(target, coeff);
    };

    for (const auto& [ket, amp] : state.terms()) {
        if (participates && !participates(ket)) {
            out.add_term(ket, amp);
            continue;
        }
        bool occ_b = ket.occupied(node, b);
        bool occ_a = from_reservoir ? !occ_b : ket.occupied(node, a);

        if (!from_reservoir && occ_a && occ_b) {
            throw protocol_error("rotation: both modes of the pair occupied");
        }
        if (!from_reservoir && !occ_a && !occ_b) {
            out.add_term(ket, amp);  // dark ket, transition not resonant
            continue;
        }

        if (is_two_pi) {
            // Full Rabi cycle: -1 on the resonant doublet, identity elsewhere.
            out.add_term(ket, -amp);
            continue;
        }

        // A participating ket whose doublet partner sits behind the filter
        // cannot be rotated consistently; the state is outside the model.
        if (participates) {
            BasisKet partner = doublet_partner(ket, node, a, b, occ_a);
            if (state.terms().contains(partner) && !participates(partner)) {
                throw protocol_error("rotation doublet split by the blockade filter");
            }
        }

        BasisKet ket_a = occ_a ? ket : (from_reservoir ? ket.without(node, b) : ket.without(node, b).with(node, a));
        BasisKet ket_b = occ_b ? ket : (from_reservoir ? ket.with(node, b) : ket.without(node, a).with(node, b));
        if (occ_a) {
            emit(ket_a, amp * m.aa);
            emit(ket_b, amp * m.ba);
        } else {
            emit(ket_a, amp * m.ab);
            emit(ket_b, amp * m.bb);
        }
    }
    out.prune();
    return out;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_nodes() != b.num_nodes()) {
        throw std::invalid_argument("inner_product: node counts differ");
    }
    Complex total(0.0, 0.0);
    for (const auto& [ket, amp] : a.terms()) {
        total += std::conj(amp) * b.amplitude(ket);
    }
    return total;
}

double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

namespace {

MeasureResult project_impl(const StateVector& state, int node, std::pair<Mode, Mode> qubit,
                           Mode outcome) {
    StateVector collapsed = StateVector::from_terms(state.num_nodes(), {}, state.prune_epsilon());
    collapsed.set_next_photon_slot(state.next_photon_slot());
    double weight = 0.0;
    for (const auto& [ket, amp] : state.terms()) {
        bool first = ket.occupied(node, qubit.first);
        bool second = ket.occupied(node, qubit.second);
        if (first == second) {
            throw protocol_error("measure_modes: ket occupies neither or both qubit modes");
        }
        Mode found = first ? qubit.first : qubit.second;
        if (found == outcome) {
            weight += std::norm(amp);
            collapsed.add_term(ket.without(node, outcome), amp);
        }
    }
    if (weight > 0.0) collapsed.renormalize();
    return {outcome, collapsed, weight};
}

}  // namespace

MeasureResult project_modes(const StateVector& state, int node, std::pair<Mode, Mode> qubit,
                            Mode forced) {
    if (forced != qubit.first && forced != qubit.second) {
        throw std::invalid_argument("project_modes: forced outcome not in qubit pair");
    }
    MeasureResult result = project_impl(state, node, qubit, forced);
    if (result.probability <= 0.0) {
        throw protocol_error("project_modes: forced outcome has zero probability");
    }
    return result;
}

MeasureResult measure_modes(const StateVector& state, int node, std::pair<Mode, Mode> qubit,
                            Rng& rng) {
    MeasureResult first = project_impl(state, node, qubit, qubit.first);
    double p_first = first.probability;
    if (rng.next_double() < p_first) return first;
    return project_impl(state, node, qubit, qubit.second);
}

}  // namespace rydrep
