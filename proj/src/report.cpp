// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <sstream>
#include <stdexcept>

namespace qsdc {

namespace {

// Shortest decimal that round-trips the double, via the JSON serializer, so
// CSV and JSON render numbers identically across runs and platforms.
std::string num(double x) { return Json(x).dump(); }

Json interval_json(const WilsonInterval& ci) {
    return Json{{"low", ci.low}, {"high", ci.high}};
}

Json checks_json(const std::array<CheckResult, 4>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) {
        arr.push_back(Json{{"check", check_name(c.kind)},
                           {"performed", c.performed},
                           {"samples", c.samples},
                           {"errors", c.errors},
                           {"error-rate", c.error_rate},
                           {"threshold", c.threshold},
                           {"passed", c.passed}});
    }
    return arr;
}

} // namespace

Json RunReport::to_json() const {
    Json j;
    j["version"] = 1;
    j["kind"] = "run";
    j["config"] = config.to_json();
    j["sent"] = result.sent_bits;
    j["delivered"] = result.delivered_bits;
    j["delivered-exact"] = result.delivered_exact;
    j["aborted"] = result.aborted;
    j["abort-check"] =
        result.abort_check ? Json(check_name(*result.abort_check)) : Json();
    j["checks"] = checks_json(result.checks);
    j["decode-paths-agree"] =
        result.decode_paths_agree ? Json(*result.decode_paths_agree) : Json();
    if (result.eve) {
        j["eve"] = Json{
            {"interactions", result.eve->interactions},
            {"identification-applicable", result.eve->identification_applicable},
            {"identified", result.eve->identified},
            {"identification-rate", result.eve->identification_rate}};
    } else {
        j["eve"] = Json();
    }
    if (result.posterior) {
        j["posterior"] = Json{
            {"triples", result.posterior->triples},
            {"mean-entropy-bits", result.posterior->mean_entropy_bits},
            {"min-entropy-bits", result.posterior->min_entropy_bits},
            {"max-entropy-bits", result.posterior->max_entropy_bits},
            {"max-probability", result.posterior->max_probability}};
    } else {
        j["posterior"] = Json();
    }
    j["transcript-events"] = result.transcript.events().size();
    return j;
}

std::string RunReport::to_csv() const {
    std::ostringstream h, r;
    h << "protocol,seed,sent-bits,delivered-bits,delivered-exact,aborted,"
         "abort-check,decode-paths-agree";
    r << protocol_name(config.protocol) << ',' << config.seed << ','
      << result.sent_bits.size() << ',' << result.delivered_bits.size() << ','
      << (result.delivered_exact ? 1 : 0) << ',' << (result.aborted ? 1 : 0)
      << ',' << (result.abort_check ? check_name(*result.abort_check) : "")
      << ',';
    if (result.decode_paths_agree) r << (*result.decode_paths_agree ? 1 : 0);
    for (const auto& c : result.checks) {
        const std::string base = check_name(c.kind);
        h << ',' << base << "-samples," << base << "-errors," << base
          << "-error-rate";
        r << ',' << c.samples << ',' << c.errors << ',' << num(c.error_rate);
    }
    h << ",eve-interactions,eve-identification-rate";
    r << ',';
    if (result.eve) r << result.eve->interactions;
    r << ',';
    if (result.eve && result.eve->identification_applicable) {
        r << num(result.eve->identification_rate);
    }
    h << ",posterior-mean-entropy-bits,posterior-max-probability";
    r << ',';
    if (result.posterior) r << num(result.posterior->mean_entropy_bits);
    r << ',';
    if (result.posterior) r << num(result.posterior->max_probability);
    h << '\n';
    r << '\n';
    return h.str() + r.str();
}

std::string RunReport::summary() const {
    std::ostringstream out;
    out << protocol_name(config.protocol) << " run: " << result.sent_bits.size()
        << " bits sent, ";
    if (result.aborted) {
        out << "aborted at " << check_name(*result.abort_check) << " check";
    } else if (result.delivered_bits.empty()) {
        out << "delivery withheld";
        if (result.posterior) {
            out << " (mean residual entropy "
                << num(result.posterior->mean_entropy_bits) << " bits over "
                << result.posterior->triples << " triples)";
        }
    } else {
        out << result.delivered_bits.size() << " delivered ("
            << (result.delivered_exact ? "exact" : "corrupted") << ")";
    }
    out << '\n';
    for (const auto& c : result.checks) {
        out << "  " << check_name(c.kind) << " check: ";
        if (!c.performed) {
            out << "not reached\n";
            continue;
        }
        out << c.errors << '/' << c.samples << " errors (rate "
            << num(c.error_rate) << ", threshold " << num(c.threshold) << ") "
            << (c.passed ? "passed" : "failed") << '\n';
    }
    if (result.eve) {
        out << "  adversary: " << result.eve->interactions << " interactions";
        if (result.eve->identification_applicable) {
            out << ", identification rate " << num(result.eve->identification_rate);
        }
        out << '\n';
    }
    out << "  exit code " << exit_code() << '\n';
    return out.str();
}

int RunReport::exit_code() const {
    if (result.aborted) return kExitDetected;
    if (!config.all_permitted()) return kExitOk;  // posterior run, as configured
    return result.delivered_exact ? kExitOk : kExitDetected;
}

double RunReport::axis_value(const std::string& axis) const {
    if (axis == "triples") return static_cast<double>(config.num_triples);
    if (axis == "controllers") return static_cast<double>(config.num_controllers);
    if (axis == "check-fraction") return config.check_fraction;
    if (axis == "min-check-samples")
        return static_cast<double>(config.min_check_samples);
    if (axis == "threshold") return config.error_threshold;
    if (axis == "noise") return config.noise_p;
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
}

Json SweepReport::to_json() const {
    Json j;
    j["version"] = 1;
    j["kind"] = "sweep";
    j["config"] = config.to_json();
    Json pts = Json::array();
    for (const auto& p : points) {
        pts.push_back(Json{{"axis-value", p.axis_value},
                           {"runs", p.runs},
                           {"delivered-exact", p.delivered_exact},
                           {"delivered-ci", interval_json(p.delivered_ci)},
                           {"aborted", p.aborted},
                           {"abort-ci", interval_json(p.abort_ci)},
                           {"check-samples", p.check_samples},
                           {"check-errors", p.check_errors},
                           {"error-rate", p.error_rate},
                           {"error-ci", interval_json(p.error_ci)}});
    }
    j["points"] = pts;
    return j;
}

std::string SweepReport::to_csv() const {
    std::ostringstream out;
    out << "axis,axis-value,runs,delivered-exact,delivered-ci-low,"
           "delivered-ci-high,aborted,abort-ci-low,abort-ci-high,"
           "check-samples,check-errors,error-rate,error-ci-low,error-ci-high\n";
    for (const auto& p : points) {
        out << config.axis << ',' << num(p.axis_value) << ',' << p.runs << ','
            << p.delivered_exact << ',' << num(p.delivered_ci.low) << ','
            << num(p.delivered_ci.high) << ',' << p.aborted << ','
            << num(p.abort_ci.low) << ',' << num(p.abort_ci.high) << ','
            << p.check_samples << ',' << p.check_errors << ','
            << num(p.error_rate) << ',' << num(p.error_ci.low) << ','
            << num(p.error_ci.high) << '\n';
    }
    return out.str();
}

std::string SweepReport::summary() const {
    std::ostringstream out;
    out << "sweep over " << config.axis << " (" << points.size() << " points, "
        << config.runs_per_point << " runs each)\n";
    for (const auto& p : points) {
        out << "  " << config.axis << '=' << num(p.axis_value) << ": "
            << p.delivered_exact << '/' << p.runs << " exact, " << p.aborted
            << '/' << p.runs << " aborted, check error rate "
            << num(p.error_rate) << " [" << num(p.error_ci.low) << ", "
            << num(p.error_ci.high) << "]\n";
    }
    return out.str();
}

Json AttackEvalReport::to_json() const {
    Json j;
    j["version"] = 1;
    j["kind"] = "attack-eval";
    j["config"] = config.to_json();
    j["oracle"] = Json{{"identification", oracle_identification},
                       {"mutual-information-bits", oracle_mi_bits}};
    j["empirical"] = Json{{"identification", empirical_identification},
                          {"mutual-information-bits", empirical_mi_bits}};
    j["detection-probability"] = detection_probability;
    return j;
}

std::string AttackEvalReport::to_csv() const {
    std::ostringstream out;
    out << "attack,hadamard,trials,oracle-identification,oracle-mi-bits,"
           "empirical-identification,empirical-mi-bits,detection-probability\n"
        << attack_name(config.attack) << ','
        << (config.hadamard_enabled ? 1 : 0) << ',' << config.trials << ','
        << num(oracle_identification) << ',' << num(oracle_mi_bits) << ','
        << num(empirical_identification) << ',' << num(empirical_mi_bits)
        << ',' << num(detection_probability) << '\n';
    return out.str();
}

std::string AttackEvalReport::summary() const {
    std::ostringstream out;
    out << "attack evaluation: " << attack_name(config.attack) << " (hadamard "
        << (config.hadamard_enabled ? "on" : "off") << ", " << config.trials
        << " trials)\n"
        << "  identification: oracle " << num(oracle_identification)
        << ", empirical " << num(empirical_identification) << '\n'
        << "  mutual information: oracle " << num(oracle_mi_bits)
        << " bits, empirical " << num(empirical_mi_bits) << " bits\n"
        << "  per-sample detection probability: " << num(detection_probability)
        << '\n';
    return out.str();
}

} // namespace qsdc
