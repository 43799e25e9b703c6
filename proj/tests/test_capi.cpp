// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library strictly through its C surface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "qsdc.h"

namespace {

struct Handle {
    qsdc_report* r = nullptr;
    ~Handle() { qsdc_report_free(r); }
};

} // namespace

TEST_CASE("version is a dotted triple") {
    const std::string v = qsdc_version();
    CHECK(v.find('.') != std::string::npos);
    CHECK(v == "1.0.0");
}

TEST_CASE("a default run succeeds through the C surface") {
    Handle h;
    REQUIRE(qsdc_run("{}", &h.r) == QSDC_OK);
    REQUIRE(h.r != nullptr);
    CHECK(std::strlen(qsdc_last_error()) == 0);
    CHECK(qsdc_report_exit_code(h.r) == 0);

    const std::string json = qsdc_report_json(h.r);
    CHECK(json.find("\"kind\": \"run\"") != std::string::npos);
    CHECK(json.find("\"delivered-exact\": true") != std::string::npos);
    CHECK(json.back() == '\n');

    const std::string csv = qsdc_report_csv(h.r);
    CHECK(csv.rfind("protocol,seed,", 0) == 0);

    const std::string summary = qsdc_report_summary(h.r);
    CHECK(summary.find("exit code 0") != std::string::npos);

    const std::string transcript = qsdc_report_transcript(h.r);
    CHECK(transcript.find("run-start") != std::string::npos);
    CHECK(transcript.find("delivery") != std::string::npos);
}

TEST_CASE("identical configurations give byte-identical artifacts") {
    const char* cfg = R"({"protocol":"mcqsdc","triples":60,"controllers":3,
                          "min-check-samples":2,"seed":11})";
    Handle a, b;
    REQUIRE(qsdc_run(cfg, &a.r) == QSDC_OK);
    REQUIRE(qsdc_run(cfg, &b.r) == QSDC_OK);
    CHECK(std::strcmp(qsdc_report_json(a.r), qsdc_report_json(b.r)) == 0);
    CHECK(std::strcmp(qsdc_report_csv(a.r), qsdc_report_csv(b.r)) == 0);
    CHECK(std::strcmp(qsdc_report_transcript(a.r),
                      qsdc_report_transcript(b.r)) == 0);
}

TEST_CASE("bad input is reported, not thrown") {
    Handle h;
    CHECK(qsdc_run("{not json", &h.r) == QSDC_ERROR_INVALID_ARGUMENT);
    CHECK(h.r == nullptr);
    CHECK(std::strlen(qsdc_last_error()) > 0);

    CHECK(qsdc_run(R"({"protcol":"cqsdc"})", &h.r) ==
          QSDC_ERROR_INVALID_ARGUMENT);
    CHECK(std::string(qsdc_last_error()).find("protcol") != std::string::npos);

    CHECK(qsdc_run(nullptr, &h.r) == QSDC_ERROR_INVALID_ARGUMENT);
    CHECK(qsdc_run("{}", nullptr) == QSDC_ERROR_INVALID_ARGUMENT);
    double d = 0;
    CHECK(qsdc_detection_oracle(nullptr, &d) == QSDC_ERROR_INVALID_ARGUMENT);
    CHECK(qsdc_detection_oracle("{}", nullptr) == QSDC_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("an aborting run maps to exit code 2") {
    Handle h;
    REQUIRE(qsdc_run(R"({"attack":"intercept-z","triples":400,"seed":4})",
                     &h.r) == QSDC_OK);
    CHECK(qsdc_report_exit_code(h.r) == 2);
    CHECK(std::string(qsdc_report_json(h.r)).find("\"aborted\": true") !=
          std::string::npos);
}

TEST_CASE("sweeps run through the C surface") {
    Handle h;
    const char* cfg = R"({"triples":40,"min-check-samples":2,"threshold":1.0,
                          "axis":"noise","points":[0.0,0.2],
                          "runs-per-point":2,"seed":6})";
    REQUIRE(qsdc_sweep(cfg, &h.r) == QSDC_OK);
    CHECK(qsdc_report_exit_code(h.r) == 0);
    const std::string json = qsdc_report_json(h.r);
    CHECK(json.find("\"kind\": \"sweep\"") != std::string::npos);
    const std::string csv = qsdc_report_csv(h.r);
    CHECK(csv.rfind("axis,", 0) == 0);
    CHECK(std::strlen(qsdc_report_transcript(h.r)) == 0);
}

TEST_CASE("attack evaluation runs through the C surface") {
    Handle h;
    REQUIRE(qsdc_attack_eval(R"({"attack":"epr-probe","hadamard":false,
                                 "trials":500,"seed":2})",
                             &h.r) == QSDC_OK);
    const std::string json = qsdc_report_json(h.r);
    CHECK(json.find("\"kind\": \"attack-eval\"") != std::string::npos);
    CHECK(json.find("\"identification\": 1.0") != std::string::npos);
}

TEST_CASE("the detection oracle is exposed directly") {
    double p = -1;
    REQUIRE(qsdc_detection_oracle(R"({"attack":"intercept-z"})", &p) == QSDC_OK);
    CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
    REQUIRE(qsdc_detection_oracle("{}", &p) == QSDC_OK);
    CHECK(p == 0.0);
    CHECK(qsdc_detection_oracle(R"({"attack":"intercept-z","noise":0.5})",
                                &p) == QSDC_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("null handles degrade gracefully") {
    CHECK(std::strlen(qsdc_report_json(nullptr)) == 0);
    CHECK(qsdc_report_exit_code(nullptr) == 1);
    qsdc_report_free(nullptr);
}
