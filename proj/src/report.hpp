// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "protocol.hpp"

namespace qsdc {

// Exit-code contract shared by the C API and the CLI:
//   0: the run completed as configured (exact delivery, or a permission
//      experiment that finished its posterior analysis)
//   1: usage or configuration errors (thrown before any run starts)
//   2: the protocol aborted on a failed check, or a tolerated-noise run
//      delivered corrupted bits
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDetected = 2 };

struct RunReport {
    Config config;
    RunResult result;

    Json to_json() const;
    std::string to_csv() const;   // header + one row
    std::string summary() const;  // short human-readable lines
    int exit_code() const;

    // Value of a sweepable numeric config field, for aggregation.
    double axis_value(const std::string& axis) const;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
};

struct SweepPointStats {
    double axis_value = 0.0;
    int runs = 0;
    int delivered_exact = 0;
    int aborted = 0;
    WilsonInterval delivered_ci;
    WilsonInterval abort_ci;
    long check_samples = 0;  // pooled over performed checks and runs
    long check_errors = 0;
    double error_rate = 0.0;
    WilsonInterval error_ci;
};

struct SweepReport {
    SweepConfig config;
    std::vector<SweepPointStats> points;

    Json to_json() const;
    std::string to_csv() const;  // header + one row per point
    std::string summary() const;
    int exit_code() const { return kExitOk; }
};

struct AttackEvalReport {
    AttackEvalConfig config;
    // Exact values for the probe interaction (zero for other attacks).
    double oracle_identification = 0.0;
    double oracle_mi_bits = 0.0;
    // Monte-Carlo estimates over `trials` simulated interactions.
    double empirical_identification = 0.0;
    double empirical_mi_bits = 0.0;
    // Exact per-sample detection probability in the guarding check.
    double detection_probability = 0.0;

    Json to_json() const;
    std::string to_csv() const;
    std::string summary() const;
    int exit_code() const { return kExitOk; }
};

} // namespace qsdc
