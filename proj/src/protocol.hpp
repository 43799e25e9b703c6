// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "dense_coding.hpp"
#include "statevector.hpp"
#include "transcript.hpp"

namespace qsdc {

// Photon roles within one entangled triple.  In every block the sender ends
// up holding A last, the receiver collects B, then A, and the C photon walks
// the controller chain.
enum class PhotonRole { A = 0, B = 1, C = 2 };

const char* photon_name(PhotonRole r);

// The four eavesdropping checks, one per guarded transmission:
//   AbTransit: preparer -> sender (A and B photons)
//   CTransit:  the controller chain -> receiver (C photons)
//   BTransit:  sender -> receiver (B photons, after encoding)
//   ATransit:  sender -> receiver (A photons)
enum class CheckKind { AbTransit = 0, CTransit = 1, BTransit = 2, ATransit = 3 };

const char* check_name(CheckKind k);

// Party tokens used in transcripts and custody records.
std::string party_sender();
std::string party_receiver();
std::string party_controller(int index);  // 1-based

// One entangled triple in flight.  The state starts as 3 qubits (A,B,C on
// 0,1,2) and may grow if an adversary entangles ancillas with it;
// photon_qubit tracks where each protocol photon currently lives.
struct TripleBlock {
    int id = 0;
    StateVector state;
    std::array<int, 3> photon_qubit = {0, 1, 2};
    std::array<std::string, 3> holder;
    bool consumed = false;

    int qubit(PhotonRole r) const { return photon_qubit[static_cast<int>(r)]; }
};

// ---------------------------------------------------------------------------
// Check geometry, shared between the live engine and the exact oracle.
// ---------------------------------------------------------------------------

// Everything that has been published about one triple; enough to reconstruct
// the attack-free reference state.
struct PublishedOps {
    Pauli owner_b = Pauli::I;                  // preparer's B-photon operation
    std::vector<ControllerOp> c_chain;         // C-photon composites, application order
    std::optional<TwoQubitEncoding> encoding;  // sender's A,B operation, if any
    int receiver_h = 0;                        // receiver's H on C before a GHZ check
};

int published_h_parity(std::span<const ControllerOp> c_chain);

// Attack-free state of the triple implied by the published operations.
StateVector reference_state(const PublishedOps& pub);

// Joint measurement for one check sample, on reference qubits 0,1,2.
//
// coin semantics:
//   AbTransit / CTransit: the C-holder's basis (0: Z, 1: X).  The sender's
//     paired basis on A,B follows the published Hadamard parity: with even
//     parity Z pairs with Z(A)Z(B) and X with Bell(A,B); odd parity swaps
//     the pairing.
//   BTransit: the sender's basis on A (0: Z with Z(B)Z(C), 1: X with Bell(B,C)).
//   ATransit: ignored; the check is a full GHZ measurement.
// Factor order is canonical: A-side factors first, then the C factor, except
// the pure GHZ factor.
MeasurementSpec check_spec(CheckKind kind, int coin, int h_parity);

// Remaps a reference-frame spec onto a block whose photons may have moved.
MeasurementSpec remap_spec(const MeasurementSpec& spec,
                           const std::array<int, 3>& photon_qubit);

// True when the joint labels carry nonzero probability for the reference
// state (threshold 1e-9): the pass condition for one check sample.
bool outcome_allowed(const StateVector& reference, const MeasurementSpec& spec,
                     const std::vector<int>& labels);

// Uniform draw domain for a controller's C-photon operation.
std::vector<ControllerOp> controller_op_domain(bool hadamard_enabled);

// ---------------------------------------------------------------------------
// Receiver-side decoding.
// ---------------------------------------------------------------------------

// Inverse of the product of the known composites (withheld entries replaced
// by identity); what a receiver lacking full permission applies before
// measuring.
Mat2 known_inverse(std::span<const std::optional<ControllerOp>> c_ops);

// Decodes one clean triple along both paths:
//   full:     apply the exact inverse of the published C composite, measure.
//   shortcut: apply H^parity only, measure, then correct the residual Pauli
//             classically.
// The input state must be an exact basis state after either correction,
// which holds whenever the published records match what was applied.
struct DecodedPair {
    Message3 full;
    Message3 shortcut;
    int measured_index = 0;  // outcome of the full path
};

DecodedPair receiver_decode(const StateVector& triple_state, Pauli owner_b,
                            std::span<const ControllerOp> c_ops);

// Exact posterior over the eight messages given a GHZ outcome measured after
// applying known_inverse(c_ops) on C.  Withheld operations (nullopt; also
// owner_b when controller 1 withholds) are enumerated uniformly; the message
// prior is uniform.
struct MessagePosterior {
    std::array<double, 8> probability{};
    double entropy_bits = 0;
    int best_message = 0;
    double max_probability = 0;
};

MessagePosterior decode_posterior(int measured_index,
                                  std::optional<Pauli> owner_b,
                                  std::span<const std::optional<ControllerOp>> c_ops,
                                  bool hadamard_enabled);

// ---------------------------------------------------------------------------
// Full protocol runs.
// ---------------------------------------------------------------------------

struct CheckResult {
    CheckKind kind = CheckKind::AbTransit;
    bool performed = false;
    int samples = 0;
    int errors = 0;
    double error_rate = 0.0;
    double threshold = 0.0;
    bool passed = true;
};

struct EveStats {
    int interactions = 0;
    int identified = 0;            // probe guesses matching the real operation
    bool identification_applicable = false;
    double identification_rate = 0.0;
};

struct PosteriorStats {
    int triples = 0;
    double mean_entropy_bits = 0.0;
    double min_entropy_bits = 0.0;
    double max_entropy_bits = 0.0;
    double max_probability = 0.0;  // largest single-message posterior seen
};

struct RunResult {
    std::string sent_bits;
    std::string delivered_bits;    // empty when aborted or permission withheld
    bool delivered_exact = false;
    bool aborted = false;
    std::optional<CheckKind> abort_check;
    std::array<CheckResult, 4> checks;
    std::optional<bool> decode_paths_agree;  // set when a full decode happened
    std::optional<EveStats> eve;
    std::optional<PosteriorStats> posterior;
    Transcript transcript;
};

// Runs the configured protocol end to end (both the single-controller and the
// multi-controller variant) and returns the full result.  Deterministic in
// (config, seed).
RunResult run_protocol(const Config& config);

} // namespace qsdc
