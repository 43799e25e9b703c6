// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "config.hpp"
#include "dense_coding.hpp"
#include "protocol.hpp"
#include "rng.hpp"

namespace qsdc {

// Where a photon is when the adversary gets to touch it.
struct TransitContext {
    HopTarget edge = HopTarget::None;
    int hop = 0;  // C-chain hop index (1..n); 0 for the other edges
    PhotonRole role = PhotonRole::A;
};

// One entangled-probe interaction: Eve's Bell outcome on her ancilla pair and
// the operation she inferred from it.
struct ProbeRecord {
    int triple_id = 0;
    int bell_label = 0;
    ControllerOp guess;
};

class Adversary {
public:
    virtual ~Adversary() = default;

    // Called once per live triple each time a photon crosses a channel.  The
    // adversary may measure, entangle ancillas, or swap photons by editing
    // the block; `rng` is the dedicated attack stream.
    virtual void on_transit(TripleBlock& block, const TransitContext& ctx,
                            RandomStream& rng) = 0;

    // Number of photons the adversary actually touched.
    virtual int interactions() const = 0;

    virtual std::span<const ProbeRecord> probe_records() const { return {}; }
};

// Returns nullptr for AttackKind::None so that no adversary code runs at all
// on clean configurations.
std::unique_ptr<Adversary> make_adversary(const AttackSpec& spec,
                                          bool hadamard_enabled);

// Most likely controller operation given Eve's Bell outcome, under a uniform
// prior over the operation domain.  Ties cannot occur: with Hadamards enabled
// the plain Pauli consistent with an outcome is strictly more likely than
// either Hadamard composite.
ControllerOp probe_best_guess(int bell_label, bool hadamard_enabled);

// Exact joint distribution p(operation, Bell outcome) of the probe
// interaction, rows in controller_op_domain order, uniform prior included.
std::vector<std::array<double, 4>> probe_joint_distribution(bool hadamard_enabled);

} // namespace qsdc
