// SPDX-License-Identifier: Apache-2.0
#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "adversary.hpp"
#include "dense_coding.hpp"
#include "rng.hpp"

namespace qsdc {

WilsonInterval wilson_interval(long successes, long n, double z) {
    if (n <= 0) {
        throw std::invalid_argument("Wilson interval needs at least one sample");
    }
    if (successes < 0 || successes > n) {
        throw std::invalid_argument("successes must be between 0 and n");
    }
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    // At the extremes the bounds are algebraically exact; keep them so.
    const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = successes == n ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

EveInformation eve_information(bool hadamard_enabled,
                               std::span<const double> prior) {
    const auto domain = controller_op_domain(hadamard_enabled);
    const auto uniform_joint = probe_joint_distribution(hadamard_enabled);

    std::vector<std::array<double, 4>> joint;
    if (prior.empty()) {
        joint = uniform_joint;
    } else {
        if (prior.size() != domain.size()) {
            throw std::invalid_argument(
                "prior size does not match the operation domain");
        }
        double sum = 0;
        for (double p : prior) {
            if (p < 0) throw std::invalid_argument("prior entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("prior must sum to 1");
        }
        joint.resize(domain.size());
        for (std::size_t i = 0; i < domain.size(); ++i) {
            for (int l = 0; l < 4; ++l) {
                // uniform_joint folds in a 1/|domain| prior; undo and reweight.
                joint[i][l] =
                    prior[i] * uniform_joint[i][l] * static_cast<double>(domain.size());
            }
        }
    }

    EveInformation info;
    std::array<double, 4> p_label{};
    std::vector<double> p_op(domain.size(), 0.0);
    for (std::size_t i = 0; i < joint.size(); ++i) {
        for (int l = 0; l < 4; ++l) {
            p_label[l] += joint[i][l];
            p_op[i] += joint[i][l];
        }
    }
    for (int l = 0; l < 4; ++l) {
        double best = 0;
        for (std::size_t i = 0; i < joint.size(); ++i) {
            best = std::max(best, joint[i][l]);
        }
        info.identification += best;
    }
    for (std::size_t i = 0; i < joint.size(); ++i) {
        for (int l = 0; l < 4; ++l) {
            const double p = joint[i][l];
            if (p > 1e-15) {
                info.mutual_information_bits +=
                    p * std::log2(p / (p_op[i] * p_label[l]));
            }
        }
    }
    if (info.mutual_information_bits < 0) info.mutual_information_bits = 0;
    return info;
}

// ---------------------------------------------------------------------------
// Exact detection oracle.
// ---------------------------------------------------------------------------

namespace {

struct Branch {
    double p = 1.0;
    StateVector state;
    std::array<int, 3> pq{0, 1, 2};
    Pauli owner = Pauli::I;
    std::vector<ControllerOp> chain;
    std::optional<TwoQubitEncoding> enc;
};

CheckKind guarded_check(HopTarget target) {
    switch (target) {
    case HopTarget::AbHop: return CheckKind::AbTransit;
    case HopTarget::CHop:  return CheckKind::CTransit;
    case HopTarget::BHop:  return CheckKind::BTransit;
    case HopTarget::AHop:  return CheckKind::ATransit;
    case HopTarget::None:  break;
    }
    throw std::invalid_argument("the attack has no guarded transmission");
}

// Splits every branch over the outcomes of an intercept-resend measurement.
void intercept_photon(std::vector<Branch>& branches, PhotonRole role,
                      bool random_basis) {
    std::vector<Branch> next;
    for (const auto& b : branches) {
        const int bases = random_basis ? 2 : 1;
        for (int bi = 0; bi < bases; ++bi) {
            const BasisKind kind = bi == 0 ? BasisKind::Z : BasisKind::X;
            const MeasurementSpec spec{
                {MeasureFactor{kind, {b.pq[static_cast<int>(role)]}}}};
            for (const auto& o : outcome_distribution(b.state, spec)) {
                if (o.probability <= kZeroProbability) continue;
                auto [p, post] = project(b.state, spec, o.labels);
                Branch nb = b;
                nb.p = b.p * p / bases;
                nb.state = std::move(post);
                next.push_back(std::move(nb));
            }
        }
    }
    branches = std::move(next);
}

void probe_swap(std::vector<Branch>& branches) {
    static const std::pair<std::string, Complex> terms[] = {
        {"00", Complex{1, 0}}, {"11", Complex{1, 0}}};
    const StateVector pair = StateVector::from_terms(
        2, std::span<const std::pair<std::string, Complex>>(terms, 2));
    for (auto& b : branches) {
        b.state = StateVector::tensor(b.state, pair);
        b.pq[2] = b.state.num_qubits() - 1;  // the fake half
    }
}

void probe_capture(std::vector<Branch>& branches, bool hadamard_enabled) {
    std::vector<Branch> next;
    for (const auto& b : branches) {
        const int keep = b.state.num_qubits() - 2;
        const int fake = b.state.num_qubits() - 1;
        const MeasurementSpec bell{{MeasureFactor{BasisKind::Bell, {keep, fake}}}};
        for (const auto& o : outcome_distribution(b.state, bell)) {
            if (o.probability <= kZeroProbability) continue;
            auto [p, post] = project(b.state, bell, o.labels);
            const ControllerOp guess =
                probe_best_guess(o.labels[0], hadamard_enabled);
            Branch nb = b;
            nb.p = b.p * p;
            nb.state = post.apply(guess.matrix(), 2);  // the true C photon
            nb.pq[2] = 2;
            next.push_back(std::move(nb));
        }
    }
    branches = std::move(next);
}

void chain_stage(std::vector<Branch>& branches,
                 const std::vector<ControllerOp>& domain) {
    std::vector<Branch> next;
    next.reserve(branches.size() * domain.size());
    for (const auto& b : branches) {
        for (const auto& op : domain) {
            Branch nb = b;
            nb.p = b.p / static_cast<double>(domain.size());
            nb.chain.push_back(op);
            nb.state = nb.state.apply(op.matrix(), nb.pq[2]);
            next.push_back(std::move(nb));
        }
    }
    branches = std::move(next);
}

void camouflage_stage(std::vector<Branch>& branches) {
    std::vector<Branch> next;
    next.reserve(branches.size() * 8);
    for (const auto& b : branches) {
        for (int msg = 0; msg < 8; ++msg) {
            const TwoQubitEncoding enc = encode(Message3{msg});
            Branch nb = b;
            nb.p = b.p / 8.0;
            nb.enc = enc;
            nb.state = nb.state.apply(pauli_gate(enc.on_a), nb.pq[0])
                           .apply(pauli_gate(enc.on_b), nb.pq[1]);
            next.push_back(std::move(nb));
        }
    }
    branches = std::move(next);
}

double branch_detection(const Branch& b, CheckKind kind, int coin) {
    PublishedOps pub;
    pub.owner_b = b.owner;
    if (kind != CheckKind::AbTransit) pub.c_chain = b.chain;
    if (kind == CheckKind::BTransit || kind == CheckKind::ATransit) {
        pub.encoding = b.enc;
    }
    const int parity =
        published_h_parity(std::span<const ControllerOp>(pub.c_chain));
    StateVector actual = b.state;
    if (kind == CheckKind::ATransit) {
        pub.receiver_h = parity;
        if (parity & 1) actual = actual.apply(Gate1::Hadamard, b.pq[2]);
    }

    const MeasurementSpec spec = check_spec(kind, coin, parity);
    const StateVector reference = reference_state(pub);
    const auto ref_dist = outcome_distribution(reference, spec);
    const auto actual_dist =
        outcome_distribution(actual, remap_spec(spec, b.pq));

    double detect = 0;
    for (std::size_t i = 0; i < actual_dist.size(); ++i) {
        if (ref_dist[i].probability <= kZeroProbability) {
            detect += actual_dist[i].probability;
        }
    }
    return detect;
}

} // namespace

double detection_probability_oracle(const Config& config) {
    config.validate();
    if (config.attack.kind == AttackKind::None) return 0.0;
    if (config.noise_p != 0.0) {
        throw std::invalid_argument(
            "the detection oracle covers noiseless attack configurations");
    }
    const CheckKind kind = guarded_check(config.attack.target);
    const auto domain = controller_op_domain(config.hadamard_enabled);
    const bool needs_chain = kind != CheckKind::AbTransit;

    double size = 4.0;
    if (needs_chain) {
        size *= std::pow(static_cast<double>(domain.size()),
                         config.num_controllers);
    }
    if (size > 2e6) {
        throw std::invalid_argument(
            "oracle enumeration is too large for this configuration");
    }

    const bool random_basis =
        config.attack.kind == AttackKind::InterceptResendRandom;
    const bool intercept = config.attack.kind == AttackKind::InterceptResendZ ||
                           config.attack.kind == AttackKind::InterceptResendRandom;

    std::vector<Branch> branches;
    for (Pauli owner : kAllPaulis) {
        Branch b;
        b.p = 0.25;
        b.owner = owner;
        b.state = ghz_state(1).apply(pauli_gate(owner), 1);
        branches.push_back(std::move(b));
    }

    if (config.attack.target == HopTarget::AbHop) {
        intercept_photon(branches, PhotonRole::A, random_basis);
        intercept_photon(branches, PhotonRole::B, random_basis);
    }

    if (needs_chain) {
        for (int c = 1; c <= config.num_controllers; ++c) {
            if (config.attack.kind == AttackKind::EprProbe &&
                c == config.attack.position) {
                probe_swap(branches);  // just before controller c operates
            }
            chain_stage(branches, domain);
            if (intercept && config.attack.target == HopTarget::CHop &&
                config.attack.position == c) {
                intercept_photon(branches, PhotonRole::C, random_basis);
            }
            if (config.attack.kind == AttackKind::EprProbe &&
                c == config.attack.position) {
                probe_capture(branches, config.hadamard_enabled);
            }
        }
    }

    if (kind == CheckKind::BTransit || kind == CheckKind::ATransit) {
        camouflage_stage(branches);
        if (config.attack.target == HopTarget::BHop) {
            intercept_photon(branches, PhotonRole::B, random_basis);
        }
        if (config.attack.target == HopTarget::AHop) {
            intercept_photon(branches, PhotonRole::A, random_basis);
        }
    }

    double detection = 0;
    const int coins = kind == CheckKind::ATransit ? 1 : 2;
    for (const auto& b : branches) {
        for (int coin = 0; coin < coins; ++coin) {
            detection += b.p * branch_detection(b, kind, coin) / coins;
        }
    }
    return detection;
}

// ---------------------------------------------------------------------------
// Drivers and aggregation.
// ---------------------------------------------------------------------------

RunReport run_and_report(const Config& config) {
    return RunReport{config, run_protocol(config)};
}

namespace {

Json comparable_config(const RunReport& r, const std::string& axis) {
    Json j = r.config.to_json();
    j.erase(axis);
    j.erase("seed");
    j.erase("message");
    if (axis == "controllers") {
        // These are resized or re-anchored along the controller axis.
        j.erase("permissions");
        j.erase("target");
    }
    return j;
}

} // namespace

std::vector<SweepPointStats> aggregate(std::span<const RunReport> reports,
                                       const std::string& axis) {
    if (reports.empty()) {
        throw std::invalid_argument("nothing to aggregate: no run reports");
    }
    const Json expected = comparable_config(reports.front(), axis);
    for (const auto& r : reports) {
        (void)r.axis_value(axis);  // validates the axis name
        if (comparable_config(r, axis) != expected) {
            throw std::invalid_argument(
                "run reports do not share a configuration besides the axis '" +
                axis + "'");
        }
    }

    std::vector<double> order;
    std::map<double, SweepPointStats> by_value;
    for (const auto& r : reports) {
        const double v = r.axis_value(axis);
        if (!by_value.count(v)) {
            order.push_back(v);
            by_value[v].axis_value = v;
        }
        SweepPointStats& s = by_value[v];
        s.runs += 1;
        s.delivered_exact += r.result.delivered_exact ? 1 : 0;
        s.aborted += r.result.aborted ? 1 : 0;
        for (const auto& c : r.result.checks) {
            if (!c.performed) continue;
            s.check_samples += c.samples;
            s.check_errors += c.errors;
        }
    }

    std::vector<SweepPointStats> out;
    out.reserve(order.size());
    for (double v : order) {
        SweepPointStats s = by_value[v];
        s.delivered_ci = wilson_interval(s.delivered_exact, s.runs);
        s.abort_ci = wilson_interval(s.aborted, s.runs);
        if (s.check_samples > 0) {
            s.error_rate = static_cast<double>(s.check_errors) /
                           static_cast<double>(s.check_samples);
            s.error_ci = wilson_interval(s.check_errors, s.check_samples);
        }
        out.push_back(s);
    }
    return out;
}

SweepReport run_sweep(const SweepConfig& sweep) {
    sweep.validate();
    std::vector<RunReport> reports;
    reports.reserve(sweep.points.size() * sweep.runs_per_point);
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const std::uint64_t point_seed = derive_seed(sweep.base.seed, i);
        for (int r = 0; r < sweep.runs_per_point; ++r) {
            const std::uint64_t run_seed = derive_seed(point_seed, r);
            reports.push_back(
                run_and_report(sweep.config_at(sweep.points[i], run_seed)));
        }
    }
    return SweepReport{sweep, aggregate(reports, sweep.axis)};
}

AttackEvalReport run_attack_eval(const AttackEvalConfig& config) {
    config.validate();
    AttackEvalReport rep;
    rep.config = config;
    if (config.attack == AttackKind::None) {
        return rep;  // nothing to leak, nothing to detect
    }

    // Detection probability in the guarding check, on the smallest
    // configuration that carries the attack.
    Config run_cfg;
    run_cfg.num_triples = 64;
    run_cfg.min_check_samples = 1;
    if (config.attack == AttackKind::EprProbe) {
        run_cfg.protocol = Protocol::Mcqsdc;
        run_cfg.num_controllers = 2;
        run_cfg.hadamard_enabled = config.hadamard_enabled;
        run_cfg.attack = {AttackKind::EprProbe, HopTarget::CHop, 2};
    } else {
        run_cfg.protocol = Protocol::Cqsdc;
        run_cfg.num_controllers = 1;
        run_cfg.hadamard_enabled = false;
        run_cfg.attack = {config.attack, HopTarget::CHop, 1};
    }
    run_cfg.permissions.assign(run_cfg.num_controllers, true);
    rep.detection_probability = detection_probability_oracle(run_cfg);

    if (config.attack != AttackKind::EprProbe) {
        return rep;  // intercept attacks learn nothing about controller ops
    }

    const EveInformation exact = eve_information(config.hadamard_enabled);
    rep.oracle_identification = exact.identification;
    rep.oracle_mi_bits = exact.mutual_information_bits;

    // Monte-Carlo over isolated probe interactions.
    const auto domain = controller_op_domain(config.hadamard_enabled);
    static const std::pair<std::string, Complex> terms[] = {
        {"00", Complex{1, 0}}, {"11", Complex{1, 0}}};
    const StateVector pair = StateVector::from_terms(
        2, std::span<const std::pair<std::string, Complex>>(terms, 2));
    const MeasurementSpec bell{{MeasureFactor{BasisKind::Bell, {0, 1}}}};

    RandomStream rng(derive_seed(config.seed, 101));
    std::vector<std::array<long, 4>> counts(domain.size(), {0, 0, 0, 0});
    long hits = 0;
    for (int t = 0; t < config.trials; ++t) {
        const std::size_t op_i = rng.uniform_below(domain.size());
        const StateVector probed = pair.apply(domain[op_i].matrix(), 1);
        auto [outcome, post] = measure(probed, bell, rng);
        (void)post;
        const int label = outcome.labels[0];
        counts[op_i][label] += 1;
        if (probe_best_guess(label, config.hadamard_enabled) == domain[op_i]) {
            ++hits;
        }
    }
    const double n = static_cast<double>(config.trials);
    rep.empirical_identification = static_cast<double>(hits) / n;

    std::vector<double> row_sum(domain.size(), 0.0);
    std::array<double, 4> col_sum{};
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (int l = 0; l < 4; ++l) {
            row_sum[i] += counts[i][l];
            col_sum[l] += counts[i][l];
        }
    }
    double mi = 0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (int l = 0; l < 4; ++l) {
            const double nij = static_cast<double>(counts[i][l]);
            if (nij <= 0) continue;
            mi += (nij / n) * std::log2((nij * n) / (row_sum[i] * col_sum[l]));
        }
    }
    rep.empirical_mi_bits = std::max(0.0, mi);
    return rep;
}

} // namespace qsdc
