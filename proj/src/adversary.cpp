// SPDX-License-Identifier: Apache-2.0
#include "adversary.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace qsdc {

namespace {

StateVector fresh_pair() {
    static const std::pair<std::string, Complex> terms[] = {
        {"00", Complex{1, 0}}, {"11", Complex{1, 0}}};
    return StateVector::from_terms(
        2, std::span<const std::pair<std::string, Complex>>(terms, 2));
}

// Measures each matching photon in a fixed or random basis; the collapsed
// photon is what travels on.
class InterceptResend final : public Adversary {
public:
    InterceptResend(const AttackSpec& spec, bool random_basis)
        : spec_(spec), random_basis_(random_basis) {}

    void on_transit(TripleBlock& block, const TransitContext& ctx,
                    RandomStream& rng) override {
        if (ctx.edge != spec_.target) return;
        if (ctx.edge == HopTarget::CHop && ctx.hop != spec_.position) return;
        const BasisKind basis =
            (random_basis_ && rng.coin() == 1) ? BasisKind::X : BasisKind::Z;
        const MeasurementSpec spec{
            {MeasureFactor{basis, {block.qubit(ctx.role)}}}};
        auto [outcome, post] = measure(block.state, spec, rng);
        (void)outcome;
        block.state = std::move(post);
        ++interactions_;
    }

    int interactions() const override { return interactions_; }

private:
    AttackSpec spec_;
    bool random_basis_;
    int interactions_ = 0;
};

// Entangles a fresh pair with the probed controller's input: the controller
// unknowingly operates on Eve's fake photon, Eve Bell-measures her pair to
// infer the operation, then applies her best guess to the real photon and
// forwards it.
class EprProbe final : public Adversary {
public:
    EprProbe(int probed_controller, bool hadamard_enabled)
        : probed_(probed_controller), had_(hadamard_enabled) {}

    void on_transit(TripleBlock& block, const TransitContext& ctx,
                    RandomStream& rng) override {
        if (ctx.edge != HopTarget::CHop || ctx.role != PhotonRole::C) return;
        if (ctx.hop == probed_ - 1) {
            Pending p;
            p.true_c = block.qubit(PhotonRole::C);
            p.keep = block.state.num_qubits();
            p.fake = p.keep + 1;
            block.state = StateVector::tensor(block.state, fresh_pair());
            block.photon_qubit[static_cast<int>(PhotonRole::C)] = p.fake;
            pending_[block.id] = p;
            ++interactions_;
        } else if (ctx.hop == probed_) {
            const auto it = pending_.find(block.id);
            if (it == pending_.end()) return;
            const Pending p = it->second;
            pending_.erase(it);
            const MeasurementSpec bell{
                {MeasureFactor{BasisKind::Bell, {p.keep, p.fake}}}};
            auto [outcome, post] = measure(block.state, bell, rng);
            const ControllerOp guess = probe_best_guess(outcome.labels[0], had_);
            block.state = post.apply(guess.matrix(), p.true_c);
            block.photon_qubit[static_cast<int>(PhotonRole::C)] = p.true_c;
            records_.push_back({block.id, outcome.labels[0], guess});
        }
    }

    int interactions() const override { return interactions_; }

    std::span<const ProbeRecord> probe_records() const override {
        return records_;
    }

private:
    struct Pending {
        int true_c = 0;  // where the real C photon is parked
        int keep = 0;    // Eve's retained half
        int fake = 0;    // the half handed to the controller
    };

    int probed_;
    bool had_;
    int interactions_ = 0;
    std::map<int, Pending> pending_;
    std::vector<ProbeRecord> records_;
};

} // namespace

std::unique_ptr<Adversary> make_adversary(const AttackSpec& spec,
                                          bool hadamard_enabled) {
    switch (spec.kind) {
    case AttackKind::None:
        return nullptr;
    case AttackKind::InterceptResendZ:
        return std::make_unique<InterceptResend>(spec, false);
    case AttackKind::InterceptResendRandom:
        return std::make_unique<InterceptResend>(spec, true);
    case AttackKind::EprProbe:
        return std::make_unique<EprProbe>(spec.position, hadamard_enabled);
    }
    throw std::invalid_argument("unknown attack kind");
}

std::vector<std::array<double, 4>> probe_joint_distribution(bool hadamard_enabled) {
    const auto domain = controller_op_domain(hadamard_enabled);
    const StateVector pair = fresh_pair();
    const MeasurementSpec bell{{MeasureFactor{BasisKind::Bell, {0, 1}}}};
    std::vector<std::array<double, 4>> joint;
    joint.reserve(domain.size());
    for (const auto& op : domain) {
        const StateVector probed = pair.apply(op.matrix(), 1);
        std::array<double, 4> row{};
        for (const auto& o : outcome_distribution(probed, bell)) {
            row[o.labels[0]] = o.probability / static_cast<double>(domain.size());
        }
        joint.push_back(row);
    }
    return joint;
}

ControllerOp probe_best_guess(int bell_label, bool hadamard_enabled) {
    if (bell_label < 0 || bell_label > 3) {
        throw std::invalid_argument("Bell outcome label must be 0..3");
    }
    const auto domain = controller_op_domain(hadamard_enabled);
    const auto joint = probe_joint_distribution(hadamard_enabled);
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
        if (joint[i][bell_label] > best_p + 1e-12) {
            best_p = joint[i][bell_label];
            best = i;
        }
    }
    return domain[best];
}

} // namespace qsdc
