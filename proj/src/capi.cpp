// SPDX-License-Identifier: Apache-2.0
#include "qsdc.h"

#include <exception>
#include <string>

#include "analysis.hpp"
#include "config.hpp"
#include "report.hpp"

struct qsdc_report {
    std::string json;
    std::string csv;
    std::string summary;
    std::string transcript;
    int exit_code = 0;
};

namespace {

thread_local std::string g_last_error;

qsdc_status fail(qsdc_status status, const char* what) {
    g_last_error = what;
    return status;
}

// Parses, runs `fn`, and converts exceptions to statuses.  `out` receives a
// fresh handle only on success.
template <typename Fn>
qsdc_status guarded(const char* config_json, qsdc_report** out, Fn fn) {
    if (out == nullptr) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, "output handle is null");
    }
    *out = nullptr;
    if (config_json == nullptr) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, "configuration string is null");
    }
    try {
        const qsdc::Json j = qsdc::Json::parse(config_json);
        *out = new qsdc_report(fn(j));
        g_last_error.clear();
        return QSDC_OK;
    } catch (const qsdc::Json::parse_error& e) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(QSDC_ERROR_INTERNAL, e.what());
    }
}

template <typename Report>
qsdc_report wrap(const Report& rep, std::string transcript = {}) {
    return qsdc_report{rep.to_json().dump(2) + "\n", rep.to_csv(),
                       rep.summary(), std::move(transcript), rep.exit_code()};
}

} // namespace

extern "C" {

const char* qsdc_version(void) { return "1.0.0"; }

const char* qsdc_last_error(void) { return g_last_error.c_str(); }

qsdc_status qsdc_run(const char* config_json, qsdc_report** out) {
    return guarded(config_json, out, [](const qsdc::Json& j) {
        const qsdc::RunReport rep =
            qsdc::run_and_report(qsdc::Config::from_json(j));
        return wrap(rep, rep.result.transcript.to_text());
    });
}

qsdc_status qsdc_sweep(const char* config_json, qsdc_report** out) {
    return guarded(config_json, out, [](const qsdc::Json& j) {
        return wrap(qsdc::run_sweep(qsdc::SweepConfig::from_json(j)));
    });
}

qsdc_status qsdc_attack_eval(const char* config_json, qsdc_report** out) {
    return guarded(config_json, out, [](const qsdc::Json& j) {
        return wrap(qsdc::run_attack_eval(qsdc::AttackEvalConfig::from_json(j)));
    });
}

qsdc_status qsdc_detection_oracle(const char* config_json, double* out) {
    if (out == nullptr) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, "output pointer is null");
    }
    if (config_json == nullptr) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, "configuration string is null");
    }
    try {
        const qsdc::Json j = qsdc::Json::parse(config_json);
        *out = qsdc::detection_probability_oracle(qsdc::Config::from_json(j));
        g_last_error.clear();
        return QSDC_OK;
    } catch (const qsdc::Json::parse_error& e) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QSDC_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(QSDC_ERROR_INTERNAL, e.what());
    }
}

const char* qsdc_report_json(const qsdc_report* report) {
    return report ? report->json.c_str() : "";
}

const char* qsdc_report_csv(const qsdc_report* report) {
    return report ? report->csv.c_str() : "";
}

const char* qsdc_report_summary(const qsdc_report* report) {
    return report ? report->summary.c_str() : "";
}

const char* qsdc_report_transcript(const qsdc_report* report) {
    return report ? report->transcript.c_str() : "";
}

int qsdc_report_exit_code(const qsdc_report* report) {
    return report ? report->exit_code : 1;
}

void qsdc_report_free(qsdc_report* report) { delete report; }

} // extern "C"
