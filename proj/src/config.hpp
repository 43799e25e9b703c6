// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qsdc {

// Insertion-ordered JSON keeps report files byte-stable.
using Json = nlohmann::ordered_json;

enum class Protocol { Cqsdc, Mcqsdc };

enum class AttackKind { None, InterceptResendZ, InterceptResendRandom, EprProbe };

// Which transmission an attack sits on.  The C sequence travels over
// numbered hops: hop i carries it from controller i to controller i+1, and
// hop n (the last) delivers it to the receiver.
enum class HopTarget { None, AbHop, CHop, BHop, AHop };

struct AttackSpec {
    AttackKind kind = AttackKind::None;
    HopTarget target = HopTarget::None;
    // For intercept attacks on the C chain: which hop (1..num_controllers).
    // For the entangled-probe attack: which controller is probed (2..n).
    int position = 0;

    bool operator==(const AttackSpec&) const = default;
};

const char* protocol_name(Protocol p);
const char* attack_name(AttackKind k);
std::string target_name(const AttackSpec& a);

// Resolved run configuration.  `from_json` accepts the same keys as the CLI
// flags, rejects unknown keys, and fills defaults; `to_json` echoes every
// resolved field so reports are self-describing.
struct Config {
    Protocol protocol = Protocol::Cqsdc;
    int num_triples = 256;
    int num_controllers = 1;
    double check_fraction = 0.1;
    int min_check_samples = 32;
    double error_threshold = 0.0;
    double noise_p = 0.0;
    bool hadamard_enabled = false;
    AttackSpec attack;
    std::vector<bool> permissions;  // one entry per controller
    std::uint64_t seed = 1;
    std::optional<std::string> message;  // exact bits to send; auto if absent

    static Config from_json(const Json& j);
    Json to_json() const;

    // Samples per check subset (four subsets total).
    int check_samples() const;
    int message_triples() const;
    bool all_permitted() const;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Sweep request: one numeric config field varied over an explicit point
// list, several runs per point with derived seeds.
struct SweepConfig {
    Config base;
    std::string axis;
    std::vector<double> points;
    int runs_per_point = 20;

    static SweepConfig from_json(const Json& j);
    Json to_json() const;
    void validate() const;

    Config config_at(double point, std::uint64_t run_seed) const;
};

// Stand-alone attack evaluation: the probe interaction in isolation.
struct AttackEvalConfig {
    AttackKind attack = AttackKind::EprProbe;
    bool hadamard_enabled = true;
    int trials = 10000;
    std::uint64_t seed = 1;

    static AttackEvalConfig from_json(const Json& j);
    Json to_json() const;
    void validate() const;
};

} // namespace qsdc
