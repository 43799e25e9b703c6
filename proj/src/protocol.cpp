// SPDX-License-Identifier: Apache-2.0
#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "adversary.hpp"

namespace qsdc {

const char* photon_name(PhotonRole r) {
    switch (r) {
    case PhotonRole::A: return "A";
    case PhotonRole::B: return "B";
    case PhotonRole::C: return "C";
    }
    return "?";
}

const char* check_name(CheckKind k) {
    switch (k) {
    case CheckKind::AbTransit: return "ab-transit";
    case CheckKind::CTransit:  return "c-transit";
    case CheckKind::BTransit:  return "b-transit";
    case CheckKind::ATransit:  return "a-transit";
    }
    return "?";
}

std::string party_sender() { return "sender"; }
std::string party_receiver() { return "receiver"; }
std::string party_controller(int index) {
    return "controller" + std::to_string(index);
}

int published_h_parity(std::span<const ControllerOp> c_chain) {
    int parity = 0;
    for (const auto& op : c_chain) parity ^= op.hadamard ? 1 : 0;
    return parity;
}

StateVector reference_state(const PublishedOps& pub) {
    StateVector s = ghz_state(1);
    s = s.apply(pauli_gate(pub.owner_b), 1);
    for (const auto& op : pub.c_chain) s = s.apply(op.matrix(), 2);
    if (pub.encoding) {
        s = s.apply(pauli_gate(pub.encoding->on_a), 0);
        s = s.apply(pauli_gate(pub.encoding->on_b), 1);
    }
    if (pub.receiver_h & 1) s = s.apply(Gate1::Hadamard, 2);
    return s;
}

MeasurementSpec check_spec(CheckKind kind, int coin, int h_parity) {
    const MeasureFactor za{BasisKind::Z, {0}};
    const MeasureFactor zb{BasisKind::Z, {1}};
    const MeasureFactor zc{BasisKind::Z, {2}};
    const MeasureFactor xa{BasisKind::X, {0}};
    const MeasureFactor xc{BasisKind::X, {2}};
    const MeasureFactor bell_ab{BasisKind::Bell, {0, 1}};
    const MeasureFactor bell_bc{BasisKind::Bell, {1, 2}};

    MeasurementSpec s;
    switch (kind) {
    case CheckKind::AbTransit:
    case CheckKind::CTransit: {
        // coin picks the C basis; the A,B pairing follows the published
        // Hadamard parity so that the joint support stays two outcomes.
        const bool c_is_x = coin == 1;
        const bool sender_bell = c_is_x != ((h_parity & 1) == 1);
        if (sender_bell) {
            s.factors = {bell_ab};
        } else {
            s.factors = {za, zb};
        }
        s.factors.push_back(c_is_x ? xc : zc);
        return s;
    }
    case CheckKind::BTransit:
        if (coin == 0) {
            s.factors = {za, zb, zc};
        } else {
            s.factors = {xa, bell_bc};
        }
        return s;
    case CheckKind::ATransit:
        s.factors = {MeasureFactor{BasisKind::Ghz, {0, 1, 2}}};
        return s;
    }
    throw std::logic_error("unknown check kind");
}

MeasurementSpec remap_spec(const MeasurementSpec& spec,
                           const std::array<int, 3>& photon_qubit) {
    MeasurementSpec out = spec;
    for (auto& f : out.factors) {
        for (auto& q : f.qubits) q = photon_qubit[q];
    }
    return out;
}

bool outcome_allowed(const StateVector& reference, const MeasurementSpec& spec,
                     const std::vector<int>& labels) {
    for (const auto& o : outcome_distribution(reference, spec)) {
        if (o.labels == labels) return o.probability > kZeroProbability;
    }
    throw std::invalid_argument("labels do not match the measurement spec");
}

std::vector<ControllerOp> controller_op_domain(bool hadamard_enabled) {
    std::vector<ControllerOp> out;
    for (Pauli p : kAllPaulis) out.push_back({false, p});
    if (hadamard_enabled) {
        for (Pauli p : kAllPaulis) out.push_back({true, p});
    }
    return out;
}

Mat2 known_inverse(std::span<const std::optional<ControllerOp>> c_ops) {
    Mat2 m;  // identity
    for (const auto& op : c_ops) {
        if (op) m = op->matrix() * m;
    }
    return m.dagger();
}

DecodedPair receiver_decode(const StateVector& triple_state, Pauli owner_b,
                            std::span<const ControllerOp> c_ops) {
    Mat2 m;  // product of the published composites, application order
    for (const auto& op : c_ops) m = op.matrix() * m;

    const PauliFrame owner{Pauli::I, owner_b, Pauli::I};
    DecodedPair out;

    const StateVector full = triple_state.apply(m.dagger(), 2);
    out.measured_index = ghz_index_of(full);
    if (out.measured_index == 0) {
        throw std::invalid_argument(
            "state is not a basis state after the exact inverse");
    }
    out.full = decode(out.measured_index, std::span<const PauliFrame>(&owner, 1));

    const CompositeClass cls = classify_composite(m);
    StateVector shortcut = triple_state;
    if (cls.h_parity) shortcut = shortcut.apply(Gate1::Hadamard, 2);
    const int short_index = ghz_index_of(shortcut);
    if (short_index == 0) {
        throw std::invalid_argument(
            "state is not a basis state after the parity shortcut");
    }
    const std::array<PauliFrame, 2> frames{
        owner, PauliFrame{Pauli::I, Pauli::I, cls.post_pauli}};
    out.shortcut = decode(short_index, frames);
    return out;
}

MessagePosterior decode_posterior(
    int measured_index, std::optional<Pauli> owner_b,
    std::span<const std::optional<ControllerOp>> c_ops, bool hadamard_enabled) {
    if (measured_index < 1 || measured_index > 8) {
        throw std::invalid_argument("measured index must be 1..8");
    }
    const Mat2 v = known_inverse(c_ops);
    const auto domain = controller_op_domain(hadamard_enabled);

    std::vector<std::size_t> unknown;
    for (std::size_t i = 0; i < c_ops.size(); ++i) {
        if (!c_ops[i]) unknown.push_back(i);
    }
    const std::size_t b_count = owner_b ? 1 : kAllPaulis.size();
    double assignments = static_cast<double>(b_count);
    for (std::size_t i = 0; i < unknown.size(); ++i) assignments *= domain.size();
    if (assignments > 32768.0) {
        throw std::invalid_argument(
            "posterior enumeration over this many withheld operations is not "
            "supported (limit: 32768 assignments)");
    }

    // Candidate states for each (B operation, message), C chain not yet
    // applied; the chain and the receiver's inverse commute with these.
    const StateVector base = ghz_state(1);
    std::vector<StateVector> prepared;  // [b * 8 + msg]
    prepared.reserve(b_count * 8);
    for (std::size_t bi = 0; bi < b_count; ++bi) {
        const Pauli b = owner_b ? *owner_b : kAllPaulis[bi];
        const StateVector with_b = base.apply(pauli_gate(b), 1);
        for (int msg = 0; msg < 8; ++msg) {
            const TwoQubitEncoding enc = encode(Message3{msg});
            prepared.push_back(
                with_b.apply(pauli_gate(enc.on_a), 0).apply(pauli_gate(enc.on_b), 1));
        }
    }

    const StateVector target = ghz_state(measured_index);
    std::array<double, 8> weight{};
    std::vector<std::size_t> odo(unknown.size(), 0);
    while (true) {
        // Full C-chain matrix under this assignment, receiver inverse folded in.
        Mat2 chain;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < c_ops.size(); ++i) {
            const Mat2 op = c_ops[i] ? c_ops[i]->matrix()
                                     : domain[odo[slot]].matrix();
            if (!c_ops[i]) ++slot;
            chain = op * chain;
        }
        chain = v * chain;

        for (std::size_t bi = 0; bi < b_count; ++bi) {
            for (int msg = 0; msg < 8; ++msg) {
                const StateVector s = prepared[bi * 8 + msg].apply(chain, 2);
                weight[msg] += std::norm(target.inner(s));
            }
        }

        std::size_t k = 0;
        while (k < odo.size() && ++odo[k] == domain.size()) odo[k++] = 0;
        if (k == odo.size()) break;
    }

    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (total <= kZeroProbability) {
        throw std::invalid_argument(
            "the measured outcome is impossible under every assignment");
    }
    MessagePosterior post;
    for (int msg = 0; msg < 8; ++msg) {
        const double p = weight[msg] / total;
        post.probability[msg] = p;
        if (p > post.max_probability) {
            post.max_probability = p;
            post.best_message = msg;
        }
        if (p > 0) post.entropy_bits -= p * std::log2(p);
    }
    if (post.entropy_bits < 0) post.entropy_bits = 0;  // clamp -0.0
    return post;
}

// ---------------------------------------------------------------------------
// The protocol engine.
// ---------------------------------------------------------------------------

namespace {

// Stream tags; every random decision comes from a named child stream so that
// unrelated features never shift each other's draws.
enum StreamTag : std::uint64_t {
    kTagMessage = 1,   // auto-generated message blocks
    kTagPrep = 2,      // preparer's B operation and all controller C operations
    kTagEncode = 3,    // camouflage operations on check triples
    kTagSample = 4,    // check subset positions
    kTagCoin = 5,      // per-sample basis coins
    kTagAnnounce = 6,  // who announces first in each publication round
    kTagMeasure = 7,   // Born-rule sampling
    kTagAttack = 8,    // all adversary decisions and measurements
    kTagNoise = 9,     // channel noise
};

const std::array<Pauli, 3> kNoisePaulis = {Pauli::Z, Pauli::X, Pauli::IY};

struct Engine {
    const Config& cfg;
    const int n;
    const std::vector<ControllerOp> domain;

    RandomStream message_rng, prep_rng, encode_rng, sample_rng, coin_rng,
        announce_rng, measure_rng, attack_rng, noise_rng;

    std::vector<TripleBlock> blocks;
    std::vector<Pauli> owner_b;                            // per triple
    std::vector<std::vector<ControllerOp>> c_ops;          // [triple][controller-1]
    std::vector<std::optional<TwoQubitEncoding>> applied;  // sender's op per triple
    std::array<std::vector<int>, 4> subset;                // per check kind
    std::vector<bool> reserved;                            // claimed by some subset

    std::unique_ptr<Adversary> eve;
    RunResult res;

    explicit Engine(const Config& config)
        : cfg(config),
          n(config.num_controllers),
          domain(controller_op_domain(config.hadamard_enabled)),
          message_rng(derive_seed(config.seed, kTagMessage)),
          prep_rng(derive_seed(config.seed, kTagPrep)),
          encode_rng(derive_seed(config.seed, kTagEncode)),
          sample_rng(derive_seed(config.seed, kTagSample)),
          coin_rng(derive_seed(config.seed, kTagCoin)),
          announce_rng(derive_seed(config.seed, kTagAnnounce)),
          measure_rng(derive_seed(config.seed, kTagMeasure)),
          attack_rng(derive_seed(config.seed, kTagAttack)),
          noise_rng(derive_seed(config.seed, kTagNoise)),
          eve(make_adversary(config.attack, config.hadamard_enabled)) {}

    Transcript& log() { return res.transcript; }

    // ---- custody ---------------------------------------------------------

    static int role_index(PhotonRole r) { return static_cast<int>(r); }

    void apply_op(TripleBlock& b, PhotonRole role, const Mat2& m,
                  const std::string& actor) {
        if (b.holder[role_index(role)] != actor) {
            throw std::logic_error("custody violation: " + actor +
                                   " does not hold photon " + photon_name(role) +
                                   " of triple " + std::to_string(b.id));
        }
        b.state = b.state.apply(m, b.qubit(role));
    }

    // Measures `role_spec` (factors over photon roles 0..2) on the block,
    // collapsing it; `actor` must hold every measured photon.
    Outcome measure_roles(TripleBlock& b, const MeasurementSpec& role_spec,
                          const std::string& actor) {
        for (const auto& f : role_spec.factors) {
            for (int role : f.qubits) {
                if (b.holder[role] != actor) {
                    throw std::logic_error(
                        "custody violation: " + actor + " cannot measure photon " +
                        photon_name(static_cast<PhotonRole>(role)) + " of triple " +
                        std::to_string(b.id));
                }
            }
        }
        auto [outcome, post] =
            measure(b.state, remap_spec(role_spec, b.photon_qubit), measure_rng);
        b.state = std::move(post);
        return outcome;
    }

    // ---- transmission ----------------------------------------------------

    int live_count() const {
        int c = 0;
        for (const auto& b : blocks) c += b.consumed ? 0 : 1;
        return c;
    }

    void transit(HopTarget edge, int hop, PhotonRole role,
                 const std::string& from, const std::string& to) {
        log().append("transmit", from, -1,
                     std::string("seq=") + photon_name(role) + " to=" + to +
                         " count=" + std::to_string(live_count()));
        const TransitContext ctx{edge, hop, role};
        for (auto& b : blocks) {
            if (b.consumed) continue;
            if (eve) eve->on_transit(b, ctx, attack_rng);
            if (cfg.noise_p > 0 && noise_rng.bernoulli(cfg.noise_p)) {
                const Pauli flip =
                    kNoisePaulis[noise_rng.uniform_below(kNoisePaulis.size())];
                b.state = b.state.apply(pauli_gate(flip), b.qubit(role));
            }
            b.holder[role_index(role)] = to;
        }
        log().append("receipt-ack", to, -1, std::string("seq=") + photon_name(role));
    }

    // ---- publication -----------------------------------------------------

    std::string op_payload(int triple_controller, int t) const {
        const ControllerOp& op = c_ops[t][triple_controller - 1];
        return std::string("photon=C h=") + (op.hadamard ? "1" : "0") +
               " op=" + pauli_name(op.pauli);
    }

    // All listed controllers publish their C operation on triple t, starting
    // from a randomly drawn announcer; the preparer also re-publishes his B
    // operation when his turn comes.
    void publish_round(int t, const std::vector<int>& announcers) {
        if (announcers.empty()) return;
        const std::size_t first = announce_rng.uniform_below(announcers.size());
        for (std::size_t i = 0; i < announcers.size(); ++i) {
            const int c =
                announcers[(first + i) % announcers.size()];
            if (c == 1) {
                log().append("op-publication", party_controller(1), t,
                             std::string("photon=B op=") + pauli_name(owner_b[t]));
            }
            log().append("op-publication", party_controller(c), t, op_payload(c, t));
        }
    }

    std::vector<int> all_controllers() const {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 1);
        return v;
    }

    std::vector<int> permitted_controllers() const {
        std::vector<int> v;
        for (int c = 1; c <= n; ++c) {
            if (cfg.permissions[c - 1]) v.push_back(c);
        }
        return v;
    }

    // ---- check subsets ----------------------------------------------------

    // Draws `count` distinct positions among the triples not consumed and not
    // already claimed by another subset (the last two subsets are both drawn
    // before their samples are measured).
    std::vector<int> draw_subset(int count) {
        std::vector<int> avail;
        for (const auto& b : blocks) {
            if (!b.consumed && !reserved[b.id]) avail.push_back(b.id);
        }
        if (count > static_cast<int>(avail.size())) {
            throw std::logic_error("not enough live triples for a check subset");
        }
        std::vector<int> picked;
        picked.reserve(count);
        for (int i = 0; i < count; ++i) {
            const std::size_t k = sample_rng.uniform_below(avail.size());
            picked.push_back(avail[k]);
            reserved[avail[k]] = true;
            avail[k] = avail.back();
            avail.pop_back();
        }
        std::sort(picked.begin(), picked.end());
        return picked;
    }

    // ---- protocol steps ----------------------------------------------------

    void prepare_and_send_ab() {
        log().append("run-start", party_controller(1), -1,
                     std::string("protocol=") + protocol_name(cfg.protocol) +
                         " controllers=" + std::to_string(n) +
                         " triples=" + std::to_string(cfg.num_triples) +
                         " hadamard=" + (cfg.hadamard_enabled ? "on" : "off"));
        blocks.resize(cfg.num_triples);
        owner_b.resize(cfg.num_triples);
        c_ops.assign(cfg.num_triples, {});
        applied.assign(cfg.num_triples, std::nullopt);
        reserved.assign(cfg.num_triples, false);
        for (int t = 0; t < cfg.num_triples; ++t) {
            TripleBlock& b = blocks[t];
            b.id = t;
            b.state = ghz_state(1);
            b.holder = {party_controller(1), party_controller(1), party_controller(1)};
            owner_b[t] =
                kAllPaulis[prep_rng.uniform_below(kAllPaulis.size())];
            apply_op(b, PhotonRole::B, pauli_matrix(owner_b[t]), party_controller(1));
        }
        transit(HopTarget::AbHop, 0, PhotonRole::A, party_controller(1), party_sender());
        transit(HopTarget::AbHop, 0, PhotonRole::B, party_controller(1), party_sender());
    }

    void chain_and_send_c() {
        for (int c = 1; c <= n; ++c) {
            for (auto& b : blocks) {
                if (b.consumed) continue;
                const ControllerOp op = domain[prep_rng.uniform_below(domain.size())];
                c_ops[b.id].push_back(op);
                apply_op(b, PhotonRole::C, op.matrix(), party_controller(c));
            }
            const std::string to =
                c == n ? party_receiver() : party_controller(c + 1);
            transit(HopTarget::CHop, c, PhotonRole::C, party_controller(c), to);
        }
    }

    void encode_and_send() {
        subset[2] = draw_subset(cfg.check_samples());
        subset[3] = draw_subset(cfg.check_samples());
        std::vector<int> camouflage = subset[2];
        camouflage.insert(camouflage.end(), subset[3].begin(), subset[3].end());
        std::sort(camouflage.begin(), camouflage.end());
        for (int t : camouflage) {
            const TwoQubitEncoding enc =
                encode(Message3{static_cast<int>(encode_rng.uniform_below(8))});
            applied[t] = enc;
            apply_op(blocks[t], PhotonRole::A, pauli_matrix(enc.on_a), party_sender());
            apply_op(blocks[t], PhotonRole::B, pauli_matrix(enc.on_b), party_sender());
        }

        std::string sent;
        int pos = 0;
        for (auto& b : blocks) {
            if (b.consumed || reserved[b.id]) continue;
            Message3 m{0};
            if (cfg.message) {
                m = Message3::from_bits(cfg.message->substr(3 * pos, 3));
            } else {
                m.value = static_cast<int>(message_rng.uniform_below(8));
            }
            ++pos;
            sent += m.bits();
            const TwoQubitEncoding enc = encode(m);
            applied[b.id] = enc;
            apply_op(b, PhotonRole::A, pauli_matrix(enc.on_a), party_sender());
            apply_op(b, PhotonRole::B, pauli_matrix(enc.on_b), party_sender());
        }
        res.sent_bits = sent;

        transit(HopTarget::BHop, 0, PhotonRole::B, party_sender(), party_receiver());
    }

    void send_a() {
        transit(HopTarget::AHop, 0, PhotonRole::A, party_sender(), party_receiver());
    }

    // ---- checks ------------------------------------------------------------

    struct SampleOutcome {
        std::vector<int> labels;  // canonical check_spec order
        int coin = 0;
        int parity = 0;
    };

    // Runs one check sample on triple t, producing transcript events in the
    // order the parties act.  The triple is consumed.
    SampleOutcome run_sample(CheckKind kind, int t) {
        TripleBlock& b = blocks[t];
        SampleOutcome out;
        log().append("sample-position", party_sender(), t,
                     std::string("check=") + check_name(kind));

        switch (kind) {
        case CheckKind::AbTransit: {
            // The preparer reveals his B operation, the sender measures A,B,
            // then the preparer measures his retained C photon.
            log().append("op-publication", party_controller(1), t,
                         std::string("photon=B op=") + pauli_name(owner_b[t]));
            out.coin = coin_rng.coin();
            const MeasurementSpec spec = check_spec(kind, out.coin, 0);
            MeasurementSpec sender_part{{spec.factors.begin(), spec.factors.end() - 1}};
            MeasurementSpec c_part{{spec.factors.back()}};
            log().append("basis-choice", party_sender(), t,
                         std::string("basis=") + (out.coin ? "bell" : "zz"));
            const Outcome sender_o = measure_roles(b, sender_part, party_sender());
            log().append("outcome", party_sender(), t,
                         "labels=" + sender_o.to_string(sender_part));
            log().append("basis-choice", party_controller(1), t,
                         std::string("basis=") + (out.coin ? "x" : "z"));
            const Outcome c_o = measure_roles(b, c_part, party_controller(1));
            log().append("outcome", party_controller(1), t,
                         "labels=" + c_o.to_string(c_part));
            out.labels = sender_o.labels;
            out.labels.insert(out.labels.end(), c_o.labels.begin(), c_o.labels.end());
            break;
        }
        case CheckKind::CTransit: {
            // The receiver measures C first and announces; only then do the
            // controllers publish, and the sender measures the paired basis.
            out.coin = coin_rng.coin();
            log().append("basis-choice", party_receiver(), t,
                         std::string("basis=") + (out.coin ? "x" : "z"));
            const MeasurementSpec probe_c{{check_spec(kind, out.coin, 0).factors.back()}};
            const Outcome c_o = measure_roles(b, probe_c, party_receiver());
            log().append("outcome", party_receiver(), t,
                         "labels=" + c_o.to_string(probe_c));
            publish_round(t, all_controllers());
            out.parity = published_h_parity(c_ops[t]);
            const MeasurementSpec spec = check_spec(kind, out.coin, out.parity);
            MeasurementSpec sender_part{{spec.factors.begin(), spec.factors.end() - 1}};
            log().append("basis-choice", party_sender(), t,
                         std::string("basis=") +
                             (sender_part.factors[0].kind == BasisKind::Bell ? "bell"
                                                                             : "zz"));
            const Outcome sender_o = measure_roles(b, sender_part, party_sender());
            log().append("outcome", party_sender(), t,
                         "labels=" + sender_o.to_string(sender_part));
            out.labels = sender_o.labels;
            out.labels.insert(out.labels.end(), c_o.labels.begin(), c_o.labels.end());
            break;
        }
        case CheckKind::BTransit: {
            // The sender reveals her camouflage operation and measures A; the
            // receiver measures B,C in the paired basis; the controllers
            // publish afterwards.
            const TwoQubitEncoding enc = *applied[t];
            log().append("op-publication", party_sender(), t,
                         std::string("photon=A op=") + pauli_name(enc.on_a));
            log().append("op-publication", party_sender(), t,
                         std::string("photon=B op=") + pauli_name(enc.on_b));
            out.coin = coin_rng.coin();
            const MeasurementSpec spec = check_spec(kind, out.coin, 0);
            MeasurementSpec sender_part{{spec.factors.front()}};
            MeasurementSpec rcv_part{{spec.factors.begin() + 1, spec.factors.end()}};
            log().append("basis-choice", party_sender(), t,
                         std::string("basis=") + (out.coin ? "x" : "z"));
            const Outcome sender_o = measure_roles(b, sender_part, party_sender());
            log().append("outcome", party_sender(), t,
                         "labels=" + sender_o.to_string(sender_part));
            log().append("basis-choice", party_receiver(), t,
                         std::string("basis=") + (out.coin ? "bell" : "zz"));
            const Outcome rcv_o = measure_roles(b, rcv_part, party_receiver());
            log().append("outcome", party_receiver(), t,
                         "labels=" + rcv_o.to_string(rcv_part));
            publish_round(t, all_controllers());
            out.parity = published_h_parity(c_ops[t]);
            out.labels = sender_o.labels;
            out.labels.insert(out.labels.end(), rcv_o.labels.begin(), rcv_o.labels.end());
            break;
        }
        case CheckKind::ATransit: {
            // The controllers publish first: the receiver needs the Hadamard
            // parity to undo it before his full-basis measurement.
            const TwoQubitEncoding enc = *applied[t];
            log().append("op-publication", party_sender(), t,
                         std::string("photon=A op=") + pauli_name(enc.on_a));
            log().append("op-publication", party_sender(), t,
                         std::string("photon=B op=") + pauli_name(enc.on_b));
            publish_round(t, all_controllers());
            out.parity = published_h_parity(c_ops[t]);
            log().append("basis-choice", party_receiver(), t,
                         std::string("basis=ghz h=") + std::to_string(out.parity));
            if (out.parity & 1) {
                apply_op(b, PhotonRole::C, gate_matrix(Gate1::Hadamard),
                         party_receiver());
            }
            const MeasurementSpec spec = check_spec(kind, 0, out.parity);
            const Outcome o = measure_roles(b, spec, party_receiver());
            log().append("outcome", party_receiver(), t, "labels=" + o.to_string(spec));
            out.labels = o.labels;
            break;
        }
        }
        b.consumed = true;
        return out;
    }

    PublishedOps published_for(CheckKind kind, int t, int parity) const {
        PublishedOps pub;
        pub.owner_b = owner_b[t];
        if (kind != CheckKind::AbTransit) pub.c_chain = c_ops[t];
        if (kind == CheckKind::BTransit || kind == CheckKind::ATransit) {
            pub.encoding = applied[t];
        }
        if (kind == CheckKind::ATransit) pub.receiver_h = parity;
        return pub;
    }

    // Runs one full check round; returns true when the run aborts.
    bool run_check(CheckKind kind) {
        const int ki = static_cast<int>(kind);
        if (subset[ki].empty()) subset[ki] = draw_subset(cfg.check_samples());
        CheckResult& cr = res.checks[ki];
        cr.kind = kind;
        cr.performed = true;
        cr.samples = static_cast<int>(subset[ki].size());
        cr.threshold = cfg.error_threshold;
        log().append("check-start", party_sender(), -1,
                     std::string("check=") + check_name(kind) +
                         " samples=" + std::to_string(cr.samples));
        for (int t : subset[ki]) {
            const SampleOutcome s = run_sample(kind, t);
            const bool ok = outcome_allowed(
                reference_state(published_for(kind, t, s.parity)),
                check_spec(kind, s.coin, s.parity), s.labels);
            if (!ok) ++cr.errors;
            log().append("sample-verdict", party_sender(), t,
                         std::string("check=") + check_name(kind) +
                             " result=" + (ok ? "pass" : "fail"));
        }
        cr.error_rate = static_cast<double>(cr.errors) / cr.samples;
        cr.passed = cr.error_rate <= cfg.error_threshold;
        log().append("check-verdict", party_sender(), -1,
                     std::string("check=") + check_name(kind) +
                         " samples=" + std::to_string(cr.samples) +
                         " errors=" + std::to_string(cr.errors) +
                         " result=" + (cr.passed ? "pass" : "fail"));
        if (!cr.passed) {
            res.aborted = true;
            res.abort_check = kind;
            log().append("abort", party_sender(), -1,
                         std::string("check=") + check_name(kind));
        }
        return !cr.passed;
    }

    // ---- decoding ----------------------------------------------------------

    void decode_and_deliver() {
        for (int c = 1; c <= n; ++c) {
            log().append("permission", party_controller(c), -1,
                         std::string("granted=") +
                             (cfg.permissions[c - 1] ? "yes" : "no"));
        }
        const bool full = cfg.all_permitted();
        const std::vector<int> announcers = permitted_controllers();

        std::string delivered;
        bool paths_agree = true;
        int decoded_triples = 0;
        PosteriorStats ps;
        ps.min_entropy_bits = std::numeric_limits<double>::infinity();

        for (auto& b : blocks) {
            if (b.consumed) continue;
            const int t = b.id;
            publish_round(t, announcers);

            if (full) {
                Mat2 m;
                for (const auto& op : c_ops[t]) m = op.matrix() * m;
                apply_op(b, PhotonRole::C, m.dagger(), party_receiver());
                const MeasurementSpec spec{{MeasureFactor{BasisKind::Ghz, {0, 1, 2}}}};
                const Outcome o = measure_roles(b, spec, party_receiver());
                log().append("outcome", party_receiver(), t,
                             "labels=" + o.to_string(spec));
                const int measured = o.labels[0] + 1;
                const PauliFrame owner{Pauli::I, owner_b[t], Pauli::I};
                const Message3 got =
                    decode(measured, std::span<const PauliFrame>(&owner, 1));

                // Cross-check against the parity-shortcut path: applying only
                // H^parity instead of the exact inverse permutes the outcome
                // by the residual Pauli, which the classical frame undoes.
                const CompositeClass cls = classify_composite(m);
                const PauliFrame residual{Pauli::I, Pauli::I, cls.post_pauli};
                const int short_index = pauli_action(residual, measured);
                const std::array<PauliFrame, 2> frames{owner, residual};
                const Message3 shortcut = decode(short_index, frames);
                if (!(shortcut == got)) paths_agree = false;

                delivered += got.bits();
            } else {
                std::vector<std::optional<ControllerOp>> known(n);
                for (int c = 1; c <= n; ++c) {
                    if (cfg.permissions[c - 1]) known[c - 1] = c_ops[t][c - 1];
                }
                apply_op(b, PhotonRole::C, known_inverse(known), party_receiver());
                const MeasurementSpec spec{{MeasureFactor{BasisKind::Ghz, {0, 1, 2}}}};
                const Outcome o = measure_roles(b, spec, party_receiver());
                log().append("outcome", party_receiver(), t,
                             "labels=" + o.to_string(spec));
                const std::optional<Pauli> b_known =
                    cfg.permissions[0] ? std::optional<Pauli>(owner_b[t])
                                       : std::nullopt;
                const MessagePosterior post = decode_posterior(
                    o.labels[0] + 1, b_known, known, cfg.hadamard_enabled);
                ps.mean_entropy_bits += post.entropy_bits;
                ps.min_entropy_bits = std::min(ps.min_entropy_bits, post.entropy_bits);
                ps.max_entropy_bits = std::max(ps.max_entropy_bits, post.entropy_bits);
                ps.max_probability = std::max(ps.max_probability, post.max_probability);
            }
            b.consumed = true;
            ++decoded_triples;
        }

        if (full) {
            res.delivered_bits = delivered;
            res.delivered_exact = delivered == res.sent_bits;
            if (decoded_triples > 0) res.decode_paths_agree = paths_agree;
            log().append("delivery", party_receiver(), -1,
                         "bits=" + (delivered.empty() ? "(none)" : delivered));
        } else {
            ps.triples = decoded_triples;
            if (decoded_triples > 0) {
                ps.mean_entropy_bits /= decoded_triples;
            } else {
                ps.min_entropy_bits = 0;
            }
            res.posterior = ps;
            log().append("delivery", party_receiver(), -1,
                         "result=withheld triples=" + std::to_string(decoded_triples));
        }
    }

    void finish_eve_stats() {
        if (!eve) return;
        EveStats es;
        es.interactions = eve->interactions();
        const auto records = eve->probe_records();
        if (cfg.attack.kind == AttackKind::EprProbe) {
            es.identification_applicable = true;
            const int probed = cfg.attack.position;
            int hits = 0;
            for (const auto& r : records) {
                if (static_cast<int>(c_ops[r.triple_id].size()) >= probed &&
                    r.guess == c_ops[r.triple_id][probed - 1]) {
                    ++hits;
                }
            }
            es.identified = hits;
            es.identification_rate =
                records.empty() ? 0.0
                                : static_cast<double>(hits) /
                                      static_cast<double>(records.size());
        }
        res.eve = es;
    }

    RunResult run() {
        for (int k = 0; k < 4; ++k) {
            res.checks[k].kind = static_cast<CheckKind>(k);
            res.checks[k].threshold = cfg.error_threshold;
        }
        prepare_and_send_ab();
        if (run_check(CheckKind::AbTransit)) { finish_eve_stats(); return std::move(res); }
        chain_and_send_c();
        if (run_check(CheckKind::CTransit)) { finish_eve_stats(); return std::move(res); }
        encode_and_send();
        if (run_check(CheckKind::BTransit)) { finish_eve_stats(); return std::move(res); }
        send_a();
        if (run_check(CheckKind::ATransit)) { finish_eve_stats(); return std::move(res); }
        decode_and_deliver();
        finish_eve_stats();
        return std::move(res);
    }
};

} // namespace

RunResult run_protocol(const Config& config) {
    config.validate();
    Engine engine(config);
    return engine.run();
}

} // namespace qsdc
