// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "config.hpp"
#include "report.hpp"

namespace qsdc {

// Wilson score interval for a binomial proportion (default z: 95%).
// Throws std::invalid_argument when n == 0 or successes is out of range.
WilsonInterval wilson_interval(long successes, long n, double z = 1.96);

// What the entangled probe learns about one controller operation, computed
// exactly from the probe's joint distribution.
struct EveInformation {
    double identification = 0.0;          // max-posterior success probability
    double mutual_information_bits = 0.0;
};

// `prior` is over controller_op_domain(hadamard_enabled), uniform when empty.
EveInformation eve_information(bool hadamard_enabled,
                               std::span<const double> prior = {});

// Exact per-sample detection probability of the check guarding the attacked
// transmission, by full branch enumeration of the protocol step.  Returns 0
// for AttackKind::None.  Throws std::invalid_argument for noisy configs and
// for enumerations beyond the supported size.
double detection_probability_oracle(const Config& config);

// Runs the protocol once and wraps the result.
RunReport run_and_report(const Config& config);

// Pools run reports sharing a configuration (modulo the axis, seeds and
// auto-generated messages) into per-axis-value statistics.  Throws
// std::invalid_argument on an empty list, an unknown axis, or reports whose
// configurations differ beyond the axis.
std::vector<SweepPointStats> aggregate(std::span<const RunReport> reports,
                                       const std::string& axis);

// Runs the full sweep with derived per-point, per-run seeds:
//   point_seed = derive_seed(base_seed, point_index)
//   run_seed   = derive_seed(point_seed, run_index)
SweepReport run_sweep(const SweepConfig& sweep);

// Evaluates an attack in isolation: exact leakage, Monte-Carlo leakage over
// config.trials probe interactions, and the exact detection probability.
AttackEvalReport run_attack_eval(const AttackEvalConfig& config);

} // namespace qsdc
