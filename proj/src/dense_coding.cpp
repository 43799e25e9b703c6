// SPDX-License-Identifier: Apache-2.0
#include "dense_coding.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace qsdc {

Pauli pauli_compose(Pauli first, Pauli second) {
    return static_cast<Pauli>(static_cast<int>(first) ^ static_cast<int>(second));
}

Pauli pauli_h_conjugate(Pauli p) {
    switch (p) {
    case Pauli::Z: return Pauli::X;
    case Pauli::X: return Pauli::Z;
    default: return p;
    }
}

Gate1 pauli_gate(Pauli p) {
    switch (p) {
    case Pauli::I:  return Gate1::Identity;
    case Pauli::Z:  return Gate1::PauliZ;
    case Pauli::X:  return Gate1::PauliX;
    case Pauli::IY: return Gate1::PauliIY;
    }
    throw std::invalid_argument("unknown pauli");
}

Mat2 pauli_matrix(Pauli p) { return gate_matrix(pauli_gate(p)); }

const char* pauli_name(Pauli p) { return gate_name(pauli_gate(p)); }

std::optional<Pauli> pauli_from_name(std::string_view name) {
    if (name == "I") return Pauli::I;
    if (name == "Z") return Pauli::Z;
    if (name == "X") return Pauli::X;
    if (name == "iY") return Pauli::IY;
    return std::nullopt;
}

std::string Message3::bits() const {
    std::string s(3, '0');
    for (int i = 0; i < 3; ++i) {
        if ((value >> (2 - i)) & 1) s[i] = '1';
    }
    return s;
}

Message3 Message3::from_bits(std::string_view bits) {
    if (bits.size() != 3) {
        throw std::invalid_argument("message block must be exactly 3 bits");
    }
    int v = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("message block contains a character other than 0/1");
        }
        v = (v << 1) | (ch - '0');
    }
    return Message3{v};
}

StateVector ghz_state(int k) {
    if (k < 1 || k > 8) {
        throw std::invalid_argument("basis state index must be 1..8, got " +
                                    std::to_string(k));
    }
    const auto vec = basis_vector(BasisKind::Ghz, k - 1);
    std::vector<Complex> amps(vec.begin(), vec.end());
    return StateVector::from_amplitudes(3, std::move(amps));
}

int ghz_index_of(const StateVector& s, double tol) {
    if (s.num_qubits() != 3) return 0;
    for (int k = 1; k <= 8; ++k) {
        if (s.equal_up_to_global_phase(ghz_state(k), tol)) return k;
    }
    return 0;
}

// The canonical encoding table: message m maps to the two-photon operation
// carrying basis state 1 to basis state m+1.
TwoQubitEncoding encode(Message3 m) {
    static const TwoQubitEncoding table[8] = {
        {Pauli::Z, Pauli::Z},   // -> 1
        {Pauli::I, Pauli::Z},   // -> 2
        {Pauli::IY, Pauli::Z},  // -> 3
        {Pauli::X, Pauli::Z},   // -> 4
        {Pauli::I, Pauli::X},   // -> 5
        {Pauli::Z, Pauli::X},   // -> 6
        {Pauli::X, Pauli::X},   // -> 7
        {Pauli::IY, Pauli::X},  // -> 8
    };
    if (m.value < 0 || m.value > 7) {
        throw std::invalid_argument("message block value out of range");
    }
    return table[m.value];
}

Message3 message_for_index(int ghz_index) {
    if (ghz_index < 1 || ghz_index > 8) {
        throw std::invalid_argument("basis state index must be 1..8");
    }
    return Message3{ghz_index - 1};
}

int index_for_message(Message3 m) { return m.value + 1; }

namespace {

// 64x8 action table, generated once from the statevector simulator: entry
// [frame][k-1] is the index reached from basis state k when the frame's
// Paulis act on photons A, B, C.
struct ActionTable {
    std::array<std::array<int, 8>, 64> to;

    ActionTable() {
        for (int fa = 0; fa < 4; ++fa) {
            for (int fb = 0; fb < 4; ++fb) {
                for (int fc = 0; fc < 4; ++fc) {
                    const int code = fa * 16 + fb * 4 + fc;
                    for (int k = 1; k <= 8; ++k) {
                        StateVector s = ghz_state(k)
                            .apply(pauli_matrix(static_cast<Pauli>(fa)), 0)
                            .apply(pauli_matrix(static_cast<Pauli>(fb)), 1)
                            .apply(pauli_matrix(static_cast<Pauli>(fc)), 2);
                        const int m = ghz_index_of(s);
                        if (m == 0) {
                            throw std::logic_error("pauli frame left the basis family");
                        }
                        to[code][k - 1] = m;
                    }
                }
            }
        }
    }
};

const ActionTable& action_table() {
    static const ActionTable table;
    return table;
}

int frame_code(const PauliFrame& f) {
    return static_cast<int>(f.a) * 16 + static_cast<int>(f.b) * 4 +
           static_cast<int>(f.c);
}

} // namespace

int transform_index(Pauli on_a, Pauli on_b) {
    return pauli_action(PauliFrame{on_a, on_b, Pauli::I}, 1);
}

int pauli_action(const PauliFrame& frame, int k) {
    if (k < 1 || k > 8) {
        throw std::invalid_argument("basis state index must be 1..8");
    }
    return action_table().to[frame_code(frame)][k - 1];
}

Message3 decode(int measured_index, std::span<const PauliFrame> published) {
    if (measured_index < 1 || measured_index > 8) {
        throw std::invalid_argument("measured index must be 1..8");
    }
    PauliFrame total;
    for (const auto& f : published) total = total.then(f);
    for (int v = 0; v < 8; ++v) {
        const Message3 m{v};
        const auto u = encode(m);
        const PauliFrame enc{u.on_a, u.on_b, Pauli::I};
        if (pauli_action(total, pauli_action(enc, 1)) == measured_index) {
            return m;
        }
    }
    throw std::runtime_error("no message is consistent with the published frames; "
                             "record set is corrupted");
}

MeasurementSpec partition_spec(Partition p) {
    switch (p) {
    case Partition::BellAB_XC:
        return MeasurementSpec{{{BasisKind::Bell, {0, 1}}, {BasisKind::X, {2}}}};
    case Partition::XA_BellBC:
        return MeasurementSpec{{{BasisKind::X, {0}}, {BasisKind::Bell, {1, 2}}}};
    case Partition::ZZZ:
        return MeasurementSpec{
            {{BasisKind::Z, {0}}, {BasisKind::Z, {1}}, {BasisKind::Z, {2}}}};
    }
    throw std::invalid_argument("unknown partition");
}

std::vector<std::vector<int>> correlation_support(int k, Partition p) {
    const auto spec = partition_spec(p);
    const auto dist = outcome_distribution(ghz_state(k), spec);
    std::vector<std::vector<int>> support;
    for (const auto& o : dist) {
        if (o.probability > kZeroProbability) support.push_back(o.labels);
    }
    return support;
}

Mat2 ControllerOp::matrix() const {
    Mat2 m = pauli_matrix(pauli);
    if (hadamard) m = m * gate_matrix(Gate1::Hadamard);
    return m;
}

CompositeClass classify_composite(const Mat2& m, double tol) {
    for (Pauli p : kAllPaulis) {
        if (proportional(m, pauli_matrix(p), nullptr, tol)) {
            return CompositeClass{0, p};
        }
    }
    const Mat2 hm = gate_matrix(Gate1::Hadamard) * m;
    for (Pauli p : kAllPaulis) {
        if (proportional(hm, pauli_matrix(p), nullptr, tol)) {
            return CompositeClass{1, p};
        }
    }
    throw std::invalid_argument("operation is not a Pauli/Hadamard composite");
}

} // namespace qsdc
