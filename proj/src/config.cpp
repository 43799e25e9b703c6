// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qsdc {

namespace {

[[noreturn]] void bad_field(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config field '" + key + "': " + why);
}

void expect_keys(const Json& j, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("unknown config field '" + item.key() + "'");
        }
    }
}

int get_int(const Json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) bad_field(key, "expected an integer");
    return j[key].get<int>();
}

double get_num(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) bad_field(key, "expected a number");
    return j[key].get<double>();
}

bool get_onoff(const Json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j[key];
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "on" || s == "true") return true;
        if (s == "off" || s == "false") return false;
    }
    bad_field(key, "expected on/off or a boolean");
}

std::vector<bool> parse_permissions(const Json& v, int controllers) {
    std::vector<bool> out;
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "all") return std::vector<bool>(controllers, true);
        if (s == "none") return std::vector<bool>(controllers, false);
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "1") out.push_back(true);
            else if (tok == "0") out.push_back(false);
            else bad_field("permissions", "expected all/none or comma-separated 0/1");
        }
        return out;
    }
    if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_boolean()) out.push_back(e.get<bool>());
            else if (e.is_number_integer()) out.push_back(e.get<int>() != 0);
            else bad_field("permissions", "array entries must be booleans or 0/1");
        }
        return out;
    }
    bad_field("permissions", "expected a string or an array");
}

AttackKind parse_attack(const std::string& s) {
    if (s == "none") return AttackKind::None;
    if (s == "intercept-z") return AttackKind::InterceptResendZ;
    if (s == "intercept-random") return AttackKind::InterceptResendRandom;
    if (s == "epr-probe") return AttackKind::EprProbe;
    bad_field("attack", "expected none, intercept-z, intercept-random or epr-probe");
}

// "ab-hop", "b-hop", "a-hop", "c-hop" or "c-hop:K".
std::pair<HopTarget, int> parse_target(const std::string& s) {
    if (s == "ab-hop") return {HopTarget::AbHop, 0};
    if (s == "b-hop") return {HopTarget::BHop, 0};
    if (s == "a-hop") return {HopTarget::AHop, 0};
    if (s == "c-hop") return {HopTarget::CHop, 0};
    if (s.rfind("c-hop:", 0) == 0) {
        const std::string num = s.substr(6);
        if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) {
            bad_field("target", "expected c-hop:<index>");
        }
        return {HopTarget::CHop, std::stoi(num)};
    }
    bad_field("target", "expected ab-hop, c-hop, c-hop:<index>, b-hop or a-hop");
}

} // namespace

const char* protocol_name(Protocol p) {
    return p == Protocol::Cqsdc ? "cqsdc" : "mcqsdc";
}

const char* attack_name(AttackKind k) {
    switch (k) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResendZ: return "intercept-z";
    case AttackKind::InterceptResendRandom: return "intercept-random";
    case AttackKind::EprProbe: return "epr-probe";
    }
    return "?";
}

std::string target_name(const AttackSpec& a) {
    switch (a.target) {
    case HopTarget::None: return "none";
    case HopTarget::AbHop: return "ab-hop";
    case HopTarget::BHop: return "b-hop";
    case HopTarget::AHop: return "a-hop";
    case HopTarget::CHop: return "c-hop:" + std::to_string(a.position);
    }
    return "?";
}

Config Config::from_json(const Json& j) {
    expect_keys(j, {"protocol", "triples", "controllers", "check-fraction",
                    "min-check-samples", "threshold", "noise", "hadamard",
                    "attack", "target", "permissions", "seed", "message"});
    Config c;

    std::string proto = "cqsdc";
    if (j.contains("protocol")) {
        if (!j["protocol"].is_string()) bad_field("protocol", "expected a string");
        proto = j["protocol"].get<std::string>();
    }
    if (proto == "cqsdc") c.protocol = Protocol::Cqsdc;
    else if (proto == "mcqsdc") c.protocol = Protocol::Mcqsdc;
    else bad_field("protocol", "expected cqsdc or mcqsdc");

    c.num_triples = get_int(j, "triples", 256);
    c.num_controllers = get_int(j, "controllers",
                                c.protocol == Protocol::Cqsdc ? 1 : 3);
    c.check_fraction = get_num(j, "check-fraction", 0.1);
    c.min_check_samples = get_int(j, "min-check-samples", 32);
    c.error_threshold = get_num(j, "threshold", 0.0);
    c.noise_p = get_num(j, "noise", 0.0);
    c.hadamard_enabled = get_onoff(j, "hadamard", c.protocol == Protocol::Mcqsdc);

    if (j.contains("attack")) {
        if (!j["attack"].is_string()) bad_field("attack", "expected a string");
        c.attack.kind = parse_attack(j["attack"].get<std::string>());
    }
    if (j.contains("target")) {
        if (!j["target"].is_string()) bad_field("target", "expected a string");
        const std::string ts = j["target"].get<std::string>();
        if (ts != "none") {
            if (c.attack.kind == AttackKind::None) {
                bad_field("target", "a target needs an attack");
            }
            std::tie(c.attack.target, c.attack.position) = parse_target(ts);
        }
    }
    // Resolve attack defaults.
    if (c.attack.kind != AttackKind::None) {
        if (c.attack.target == HopTarget::None) c.attack.target = HopTarget::CHop;
        if (c.attack.target == HopTarget::CHop && c.attack.position == 0) {
            c.attack.position = (c.attack.kind == AttackKind::EprProbe)
                                    ? 2
                                    : c.num_controllers;
        }
    }

    if (j.contains("permissions")) {
        c.permissions = parse_permissions(j["permissions"], c.num_controllers);
    } else {
        c.permissions.assign(c.num_controllers, true);
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) {
            bad_field("seed", "expected an integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }

    if (j.contains("message") && !j["message"].is_null()) {
        if (!j["message"].is_string()) bad_field("message", "expected a bit string");
        c.message = j["message"].get<std::string>();
    }

    c.validate();
    return c;
}

Json Config::to_json() const {
    Json j;
    j["protocol"] = protocol_name(protocol);
    j["triples"] = num_triples;
    j["controllers"] = num_controllers;
    j["check-fraction"] = check_fraction;
    j["min-check-samples"] = min_check_samples;
    j["threshold"] = error_threshold;
    j["noise"] = noise_p;
    j["hadamard"] = hadamard_enabled;
    j["attack"] = attack_name(attack.kind);
    j["target"] = target_name(attack);
    std::string perms;
    for (bool p : permissions) {
        if (!perms.empty()) perms += ',';
        perms += p ? '1' : '0';
    }
    j["permissions"] = perms;
    j["seed"] = seed;
    j["message"] = message ? Json(*message) : Json(nullptr);
    return j;
}

int Config::check_samples() const {
    const int by_fraction =
        static_cast<int>(std::ceil(check_fraction * num_triples - 1e-9));
    return std::max(by_fraction, min_check_samples);
}

int Config::message_triples() const { return num_triples - 4 * check_samples(); }

bool Config::all_permitted() const {
    return std::all_of(permissions.begin(), permissions.end(),
                       [](bool b) { return b; });
}

void Config::validate() const {
    if (num_triples < 1 || num_triples > 10000000) {
        bad_field("triples", "must be between 1 and 10000000");
    }
    if (num_controllers < 1 || num_controllers > 16) {
        bad_field("controllers", "must be between 1 and 16");
    }
    if (protocol == Protocol::Cqsdc && num_controllers != 1) {
        bad_field("controllers", "the single-controller protocol has exactly one controller");
    }
    if (protocol == Protocol::Cqsdc && hadamard_enabled) {
        bad_field("hadamard", "rotations are only part of the multi-controller protocol");
    }
    if (!(check_fraction > 0.0 && check_fraction <= 1.0)) {
        bad_field("check-fraction", "must be in (0, 1]");
    }
    if (min_check_samples < 1) {
        bad_field("min-check-samples", "must be at least 1");
    }
    if (error_threshold < 0.0 || error_threshold > 1.0) {
        bad_field("threshold", "must be in [0, 1]");
    }
    if (noise_p < 0.0 || noise_p > 1.0) {
        bad_field("noise", "must be in [0, 1]");
    }
    if (message_triples() < 0) {
        bad_field("triples", "check subsets exhaust the triples (" +
                                 std::to_string(4 * check_samples()) + " needed, " +
                                 std::to_string(num_triples) + " available)");
    }
    if (static_cast<int>(permissions.size()) != num_controllers) {
        bad_field("permissions", "expected one entry per controller");
    }
    switch (attack.kind) {
    case AttackKind::None:
        break;
    case AttackKind::InterceptResendZ:
    case AttackKind::InterceptResendRandom:
        if (attack.target == HopTarget::CHop &&
            (attack.position < 1 || attack.position > num_controllers)) {
            bad_field("target", "hop index must be between 1 and the controller count");
        }
        break;
    case AttackKind::EprProbe:
        if (attack.target != HopTarget::CHop) {
            bad_field("target", "the entangled probe only works on the C-sequence chain");
        }
        if (attack.position < 2 || attack.position > num_controllers) {
            bad_field("target", "the entangled probe needs an intermediate controller "
                                "(index 2..controllers)");
        }
        break;
    }
    if (message) {
        const int want = 3 * message_triples();
        if (static_cast<int>(message->size()) != want) {
            bad_field("message", "expected exactly " + std::to_string(want) +
                                     " bits for this configuration");
        }
        for (char ch : *message) {
            if (ch != '0' && ch != '1') {
                bad_field("message", "bits must be 0 or 1");
            }
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kSweepAxes = {
    "triples", "controllers", "check-fraction", "min-check-samples",
    "threshold", "noise"};

bool axis_is_integer(const std::string& axis) {
    return axis == "triples" || axis == "controllers" || axis == "min-check-samples";
}

} // namespace

SweepConfig SweepConfig::from_json(const Json& j) {
    expect_keys(j, {"protocol", "triples", "controllers", "check-fraction",
                    "min-check-samples", "threshold", "noise", "hadamard",
                    "attack", "target", "permissions", "seed", "message",
                    "axis", "points", "runs-per-point"});
    Json base = j;
    base.erase("axis");
    base.erase("points");
    base.erase("runs-per-point");

    SweepConfig s;
    s.base = Config::from_json(base);
    if (!j.contains("axis") || !j["axis"].is_string()) {
        bad_field("axis", "expected the name of a numeric config field");
    }
    s.axis = j["axis"].get<std::string>();
    if (!j.contains("points") || !j["points"].is_array()) {
        bad_field("points", "expected an array of numbers");
    }
    for (const auto& p : j["points"]) {
        if (!p.is_number()) bad_field("points", "expected an array of numbers");
        s.points.push_back(p.get<double>());
    }
    s.runs_per_point = get_int(j, "runs-per-point", 20);
    s.validate();
    return s;
}

Json SweepConfig::to_json() const {
    Json j = base.to_json();
    j["axis"] = axis;
    j["points"] = points;
    j["runs-per-point"] = runs_per_point;
    return j;
}

void SweepConfig::validate() const {
    if (!kSweepAxes.count(axis)) {
        bad_field("axis", "'" + axis + "' is not a sweepable numeric field");
    }
    if (points.empty()) {
        bad_field("points", "at least one point is required");
    }
    if (runs_per_point < 1) {
        bad_field("runs-per-point", "must be at least 1");
    }
    for (double p : points) {
        if (axis_is_integer(axis) && p != std::floor(p)) {
            bad_field("points", "axis '" + axis + "' takes integer values");
        }
        (void)config_at(p, base.seed);  // full validation per point
    }
}

Config SweepConfig::config_at(double point, std::uint64_t run_seed) const {
    Config c = base;
    if (axis == "triples") c.num_triples = static_cast<int>(point);
    else if (axis == "controllers") {
        c.num_controllers = static_cast<int>(point);
        c.permissions.assign(c.num_controllers, true);
        if (c.attack.kind != AttackKind::None && c.attack.target == HopTarget::CHop &&
            c.attack.kind != AttackKind::EprProbe) {
            c.attack.position = c.num_controllers;
        }
    }
    else if (axis == "check-fraction") c.check_fraction = point;
    else if (axis == "min-check-samples") c.min_check_samples = static_cast<int>(point);
    else if (axis == "threshold") c.error_threshold = point;
    else if (axis == "noise") c.noise_p = point;
    c.seed = run_seed;
    c.message.reset();  // capacity changes along most axes; regenerate per run
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------

AttackEvalConfig AttackEvalConfig::from_json(const Json& j) {
    expect_keys(j, {"attack", "hadamard", "trials", "seed"});
    AttackEvalConfig c;
    if (j.contains("attack")) {
        if (!j["attack"].is_string()) bad_field("attack", "expected a string");
        c.attack = parse_attack(j["attack"].get<std::string>());
    }
    c.hadamard_enabled = get_onoff(j, "hadamard", true);
    c.trials = get_int(j, "trials", 10000);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) {
            bad_field("seed", "expected an integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.validate();
    return c;
}

Json AttackEvalConfig::to_json() const {
    Json j;
    j["attack"] = attack_name(attack);
    j["hadamard"] = hadamard_enabled;
    j["trials"] = trials;
    j["seed"] = seed;
    return j;
}

void AttackEvalConfig::validate() const {
    if (trials < 1 || trials > 100000000) {
        bad_field("trials", "must be between 1 and 100000000");
    }
}

} // namespace qsdc
