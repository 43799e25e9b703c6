// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "statevector.hpp"

namespace qsdc {

// The four single-photon operations the parties draw from: I, sigma_z,
// sigma_x and i*sigma_y.  Composition modulo global phase is the Klein
// four-group, encoded as two bits (z, x) with XOR as the group law.
enum class Pauli : int { I = 0, Z = 1, X = 2, IY = 3 };

inline constexpr std::array<Pauli, 4> kAllPaulis = {Pauli::I, Pauli::Z,
                                                    Pauli::X, Pauli::IY};

Pauli pauli_compose(Pauli first, Pauli second);  // "first then second", up to phase
Pauli pauli_h_conjugate(Pauli p);                // H p H: swaps Z and X
Mat2 pauli_matrix(Pauli p);
Gate1 pauli_gate(Pauli p);
const char* pauli_name(Pauli p);
std::optional<Pauli> pauli_from_name(std::string_view name);

// A 3-bit message block, value 0..7, rendered as bits "000".."111".
struct Message3 {
    int value = 0;

    std::string bits() const;
    static Message3 from_bits(std::string_view bits);  // throws on malformed input
    bool operator==(const Message3&) const = default;
};

// The two-photon operation the sender uses to encode one 3-bit block: a
// Pauli on photon A and a Pauli on photon B.
struct TwoQubitEncoding {
    Pauli on_a = Pauli::I;
    Pauli on_b = Pauli::I;
    bool operator==(const TwoQubitEncoding&) const = default;
};

// Per-photon Pauli labels for a whole triple.  Frames compose photon-wise
// (phase-blind), which is associative and commutative.
struct PauliFrame {
    Pauli a = Pauli::I;
    Pauli b = Pauli::I;
    Pauli c = Pauli::I;

    PauliFrame then(const PauliFrame& next) const {
        return PauliFrame{pauli_compose(a, next.a), pauli_compose(b, next.b),
                          pauli_compose(c, next.c)};
    }
    bool operator==(const PauliFrame&) const = default;
};

// Canonical three-photon entangled basis state k (1..8), photons A,B,C on
// qubits 0,1,2, with the exact phases of the basis table in statevector.cpp.
StateVector ghz_state(int k);

// Index 1..8 if `s` equals a canonical basis state up to global phase,
// otherwise 0.
int ghz_index_of(const StateVector& s, double tol = kNormTolerance);

// Dense-coding map: message m -> U_{m+1}, the canonical two-photon encoding
// carrying basis state 1 to basis state m+1.
TwoQubitEncoding encode(Message3 m);
Message3 message_for_index(int ghz_index);  // k -> bits of k-1
int index_for_message(Message3 m);          // inverse

// Index reached from basis state 1 by applying `on_a` to photon A and
// `on_b` to photon B (the 16-entry two-photon transform table).
int transform_index(Pauli on_a, Pauli on_b);

// Index reached from basis state k under a full per-photon frame.  Backed by
// a 64x8 table generated from the statevector simulator at first use; a
// group action: frame composition matches map composition, identity fixes
// every index, each frame permutes 1..8.
int pauli_action(const PauliFrame& frame, int k);

// Recovers the sender's message from a measured index, given every published
// frame (composed in publication order).  Throws if no message is consistent,
// which would mean a corrupted record set.
Message3 decode(int measured_index, std::span<const PauliFrame> published);

// The three ways a check splits a triple into commuting factors.
enum class Partition { BellAB_XC, XA_BellBC, ZZZ };

MeasurementSpec partition_spec(Partition p);

// Joint outcome labels with nonzero probability when basis state k is
// measured under the partition; each listed outcome has probability 1/2.
std::vector<std::vector<int>> correlation_support(int k, Partition p);

// ---------------------------------------------------------------------------
// Controller composites: an optional Hadamard followed by a Pauli.
// ---------------------------------------------------------------------------

struct ControllerOp {
    bool hadamard = false;
    Pauli pauli = Pauli::I;

    Mat2 matrix() const;  // pauli_matrix * (H if hadamard)
    bool operator==(const ControllerOp&) const = default;
};

// Every product of composites collapses, up to global phase, to
// (some Pauli) * H^parity.  classify_composite returns that parity together
// with the Pauli that remains after a receiver applies H^parity on top:
// H^parity * M is proportional to the returned Pauli.
struct CompositeClass {
    int h_parity = 0;     // 0 or 1
    Pauli post_pauli = Pauli::I;
};

CompositeClass classify_composite(const Mat2& m, double tol = 1e-9);

} // namespace qsdc
