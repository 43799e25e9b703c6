// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end.  All protocol work happens behind the C API of the
// shared library; this file only assembles configuration JSON, dispatches,
// and writes the result artifacts.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsdc.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kUsageError = 1;

// One CLI option mirroring one configuration key.  The option only lands in
// the JSON when the user supplied it, so file values stay authoritative for
// everything left unset (flags override file, file overrides defaults).
struct FlagSet {
    struct Entry {
        CLI::Option* option;
        std::string key;
        std::function<Json()> value;
    };
    std::vector<Entry> entries;

    void overlay(Json& config) const {
        for (const auto& e : entries) {
            if (e.option->count() > 0) config[e.key] = e.value();
        }
    }
};

void add_run_flags(CLI::App& cmd, FlagSet& flags) {
    auto track = [&flags](CLI::Option* opt, std::string key,
                          std::function<Json()> value) {
        flags.entries.push_back({opt, std::move(key), std::move(value)});
    };

    auto protocol = std::make_shared<std::string>();
    track(cmd.add_option("--protocol", *protocol, "cqsdc or mcqsdc")
              ->check(CLI::IsMember({"cqsdc", "mcqsdc"})),
          "protocol", [protocol] { return Json(*protocol); });

    auto triples = std::make_shared<int>();
    track(cmd.add_option("--triples", *triples, "number of entangled triples"),
          "triples", [triples] { return Json(*triples); });

    auto controllers = std::make_shared<int>();
    track(cmd.add_option("--controllers", *controllers,
                         "controller count (mcqsdc)"),
          "controllers", [controllers] { return Json(*controllers); });

    auto fraction = std::make_shared<double>();
    track(cmd.add_option("--check-fraction", *fraction,
                         "fraction of triples sampled per check"),
          "check-fraction", [fraction] { return Json(*fraction); });

    auto min_samples = std::make_shared<int>();
    track(cmd.add_option("--min-check-samples", *min_samples,
                         "lower bound on samples per check"),
          "min-check-samples", [min_samples] { return Json(*min_samples); });

    auto threshold = std::make_shared<double>();
    track(cmd.add_option("--threshold", *threshold,
                         "tolerated check error rate"),
          "threshold", [threshold] { return Json(*threshold); });

    auto noise = std::make_shared<double>();
    track(cmd.add_option("--noise", *noise,
                         "depolarizing flip probability per transmission"),
          "noise", [noise] { return Json(*noise); });

    auto hadamard = std::make_shared<bool>();
    track(cmd.add_flag("--hadamard,!--no-hadamard", *hadamard,
                       "controllers mix rotations into their operations"),
          "hadamard", [hadamard] { return Json(*hadamard); });

    auto attack = std::make_shared<std::string>();
    track(cmd.add_option("--attack", *attack, "adversary model")
              ->check(CLI::IsMember(
                  {"none", "intercept-z", "intercept-random", "epr-probe"})),
          "attack", [attack] { return Json(*attack); });

    auto target = std::make_shared<std::string>();
    track(cmd.add_option("--target", *target,
                         "attacked hop: ab-hop, c-hop[:index], b-hop, a-hop"),
          "target", [target] { return Json(*target); });

    auto permissions = std::make_shared<std::string>();
    track(cmd.add_option("--permissions", *permissions,
                         "per-controller consent, e.g. 1,0,1 or all or none"),
          "permissions", [permissions] { return Json(*permissions); });

    auto seed = std::make_shared<std::uint64_t>();
    track(cmd.add_option("--seed", *seed, "base random seed"),
          "seed", [seed] { return Json(*seed); });

    auto message = std::make_shared<std::string>();
    track(cmd.add_option("--message", *message,
                         "exact bit string to send (auto-generated if absent)"),
          "message", [message] { return Json(*message); });
}

// Reads the whole config file; exits with a usage error when unreadable.
Json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file '" << path << "'\n";
        std::exit(kUsageError);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        std::cerr << "error: config file '" << path << "': " << e.what()
                  << '\n';
        std::exit(kUsageError);
    }
}

// Resolves the report destination: explicit --out wins; a relative --out (or
// the default file name) lands in $QSDC_OUT_DIR when that is set; without
// either, the report goes to stdout.
std::optional<std::string> resolve_out(const std::string& out,
                                       const std::string& default_name) {
    const char* dir = std::getenv("QSDC_OUT_DIR");
    if (!out.empty()) {
        if (dir != nullptr && out.front() != '/') {
            return std::string(dir) + "/" + out;
        }
        return out;
    }
    if (dir != nullptr) return std::string(dir) + "/" + default_name;
    return std::nullopt;
}

// Atomic write: the destination never holds a partial report.
void write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out || !(out << content) || !out.flush()) {
            std::cerr << "error: cannot write '" << tmp << "'\n";
            std::exit(kUsageError);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::cerr << "error: cannot move report into place at '" << path
                  << "'\n";
        std::exit(kUsageError);
    }
}

struct ReportHandle {
    qsdc_report* r = nullptr;
    ~ReportHandle() { qsdc_report_free(r); }
};

int emit(const ReportHandle& rep, const std::string& format,
         const std::optional<std::string>& out_path,
         const std::optional<std::string>& transcript_path) {
    const std::string body =
        format == "csv" ? qsdc_report_csv(rep.r) : qsdc_report_json(rep.r);
    if (out_path) {
        write_file(*out_path, body);
        std::cout << qsdc_report_summary(rep.r);
        std::cout << "report: " << *out_path << '\n';
    } else {
        std::cout << body;
        std::cerr << qsdc_report_summary(rep.r);
    }
    if (transcript_path) {
        write_file(*transcript_path, qsdc_report_transcript(rep.r));
    }
    return qsdc_report_exit_code(rep.r);
}

int dispatch(qsdc_status (*entry)(const char*, qsdc_report**),
             const Json& config, const std::string& format,
             const std::optional<std::string>& out_path,
             const std::optional<std::string>& transcript_path) {
    ReportHandle rep;
    if (entry(config.dump().c_str(), &rep.r) != QSDC_OK) {
        std::cerr << "error: " << qsdc_last_error() << '\n';
        return kUsageError;
    }
    return emit(rep, format, out_path, transcript_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Seeded simulator of controlled quantum secure direct communication\n"
        "over three-photon entangled triples, with eavesdropping analysis."};
    app.set_version_flag("--version", qsdc_version());
    app.require_subcommand(1);

    std::string config_path, out, transcript, format = "json";

    auto add_io = [&](CLI::App& cmd, bool with_transcript) {
        cmd.add_option("--config", config_path,
                       "JSON config file (explicit flags override it)");
        cmd.add_option("--out", out, "report file path");
        cmd.add_option("--format", format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        if (with_transcript) {
            cmd.add_option("--transcript", transcript,
                           "also write the full event transcript here");
        }
    };

    // run
    CLI::App* run = app.add_subcommand("run", "execute one protocol run");
    FlagSet run_flags;
    add_run_flags(*run, run_flags);
    add_io(*run, true);

    // sweep
    CLI::App* sweep =
        app.add_subcommand("sweep", "aggregate runs along one numeric axis");
    FlagSet sweep_flags;
    add_run_flags(*sweep, sweep_flags);
    std::string axis;
    std::vector<double> points;
    int runs_per_point = 0;
    CLI::Option* axis_opt = sweep->add_option(
        "--axis", axis,
        "swept field: triples, controllers, check-fraction, "
        "min-check-samples, threshold or noise");
    CLI::Option* points_opt = sweep->add_option("--points", points,
                                                "comma-separated axis values")
                                  ->delimiter(',');
    CLI::Option* rpp_opt = sweep->add_option("--runs-per-point", runs_per_point,
                                             "independent runs per point");
    add_io(*sweep, false);

    // attack-eval
    CLI::App* eval = app.add_subcommand(
        "attack-eval", "evaluate an attack in isolation: exact and "
                       "Monte-Carlo leakage plus detection probability");
    std::string eval_attack;
    bool eval_hadamard = false;
    int trials = 0;
    std::uint64_t eval_seed = 0;
    CLI::Option* ea_opt =
        eval->add_option("--attack", eval_attack, "adversary model")
            ->check(CLI::IsMember(
                {"none", "intercept-z", "intercept-random", "epr-probe"}));
    CLI::Option* eh_opt = eval->add_flag("--hadamard,!--no-hadamard",
                                         eval_hadamard, "rotations on or off");
    CLI::Option* tr_opt =
        eval->add_option("--trials", trials, "Monte-Carlo sample count");
    CLI::Option* es_opt = eval->add_option("--seed", eval_seed, "random seed");
    add_io(*eval, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    Json config =
        config_path.empty() ? Json::object() : load_config_file(config_path);

    if (run->parsed()) {
        run_flags.overlay(config);
        return dispatch(qsdc_run, config, format,
                        resolve_out(out, "qsdc-run." + format),
                        transcript.empty()
                            ? std::nullopt
                            : resolve_out(transcript, "qsdc-run.transcript"));
    }
    if (sweep->parsed()) {
        sweep_flags.overlay(config);
        if (axis_opt->count() > 0) config["axis"] = axis;
        if (points_opt->count() > 0) config["points"] = points;
        if (rpp_opt->count() > 0) config["runs-per-point"] = runs_per_point;
        return dispatch(qsdc_sweep, config, format,
                        resolve_out(out, "qsdc-sweep." + format), std::nullopt);
    }
    // attack-eval
    if (ea_opt->count() > 0) config["attack"] = eval_attack;
    if (eh_opt->count() > 0) config["hadamard"] = eval_hadamard;
    if (tr_opt->count() > 0) config["trials"] = trials;
    if (es_opt->count() > 0) config["seed"] = eval_seed;
    return dispatch(qsdc_attack_eval, config, format,
                    resolve_out(out, "qsdc-attack-eval." + format),
                    std::nullopt);
}
