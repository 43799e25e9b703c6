// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "analysis.hpp"

using namespace qsdc;

namespace {

Config attack_config(Protocol p, int controllers, bool hadamard,
                     AttackKind kind, HopTarget target, int position) {
    Config c;
    c.protocol = p;
    c.num_controllers = controllers;
    c.hadamard_enabled = hadamard;
    c.attack = AttackSpec{kind, target, position};
    c.permissions.assign(controllers, true);
    return c;
}

// 4-sigma band for a Monte-Carlo binomial rate around an exact probability.
void check_rate(double observed, double exact, long samples) {
    const double sigma = std::sqrt(exact * (1.0 - exact) /
                                   static_cast<double>(samples));
    CHECK(std::abs(observed - exact) <= 4.0 * sigma);
}

} // namespace

TEST_CASE("wilson interval rejects degenerate input") {
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(-1, 10), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(11, 10), std::invalid_argument);
}

TEST_CASE("wilson interval brackets the point estimate") {
    const WilsonInterval ci = wilson_interval(5, 10);
    CHECK(ci.low < 0.5);
    CHECK(ci.high > 0.5);
    CHECK(ci.low > 0.18);   // tabulated 95% Wilson bounds for 5/10
    CHECK(ci.high < 0.82);
}

TEST_CASE("wilson interval stays inside [0,1] at the extremes") {
    const WilsonInterval zero = wilson_interval(0, 10000);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    CHECK(zero.high < 4e-4);
    const WilsonInterval one = wilson_interval(10000, 10000);
    CHECK(one.high == 1.0);
    CHECK(one.low > 1.0 - 4e-4);
}

TEST_CASE("probe leakage without rotations: perfect identification, 2 bits") {
    const EveInformation info = eve_information(false);
    CHECK(info.identification == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(info.mutual_information_bits == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("probe leakage with rotations: half identification, 1.5 bits") {
    const EveInformation info = eve_information(true);
    CHECK(info.identification == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(info.mutual_information_bits == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("probe leakage under a point-mass prior is zero") {
    const std::vector<double> prior = {1.0, 0.0, 0.0, 0.0};
    const EveInformation info = eve_information(false, prior);
    CHECK(info.identification == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(info.mutual_information_bits == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("probe leakage under a two-point prior is one bit") {
    const std::vector<double> prior = {0.5, 0.5, 0.0, 0.0};
    const EveInformation info = eve_information(false, prior);
    CHECK(info.identification == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(info.mutual_information_bits == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probe leakage validates the prior") {
    const std::vector<double> short_prior = {0.5, 0.5};
    CHECK_THROWS_AS(eve_information(false, short_prior), std::invalid_argument);
    const std::vector<double> negative = {1.5, -0.5, 0.0, 0.0};
    CHECK_THROWS_AS(eve_information(false, negative), std::invalid_argument);
    const std::vector<double> unnormalized = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(eve_information(false, unnormalized),
                    std::invalid_argument);
}

TEST_CASE("detection oracle is zero without an attack") {
    Config c;
    c.permissions = {true};
    CHECK(detection_probability_oracle(c) == 0.0);
}

TEST_CASE("detection oracle rejects noisy configurations") {
    Config c = attack_config(Protocol::Cqsdc, 1, false,
                             AttackKind::InterceptResendZ, HopTarget::CHop, 1);
    c.noise_p = 0.01;
    CHECK_THROWS_AS(detection_probability_oracle(c), std::invalid_argument);
}

TEST_CASE("detection oracle rejects oversized enumerations") {
    Config c = attack_config(Protocol::Mcqsdc, 16, true,
                             AttackKind::InterceptResendZ, HopTarget::CHop, 16);
    // 4 * 8^16 branches is far past the supported size.
    CHECK_THROWS_AS(detection_probability_oracle(c), std::invalid_argument);
}

// A fixed-basis eavesdropper hides perfectly in the matching pairing branch
// and is caught in half of the other: 1/2 * 1/2 on every two-branch check.
TEST_CASE("fixed-basis intercept detection is 1/4 on the first three hops") {
    const double tol = 1e-12;
    const AttackKind kind = AttackKind::InterceptResendZ;
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::AbHop, 0)) ==
          doctest::Approx(0.25).epsilon(tol));
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::CHop, 1)) ==
          doctest::Approx(0.25).epsilon(tol));
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::BHop, 0)) ==
          doctest::Approx(0.25).epsilon(tol));
}

// Guessing the basis does not help on the chain hop, whose two pairings are
// symmetric, but the wrong guess leaks into both branches on the hops where
// one photon of an already-separated pair is measured.
TEST_CASE("random-basis intercept detection per hop") {
    const double tol = 1e-12;
    const AttackKind kind = AttackKind::InterceptResendRandom;
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::CHop, 1)) ==
          doctest::Approx(0.25).epsilon(tol));
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::AbHop, 0)) ==
          doctest::Approx(17.0 / 32.0).epsilon(tol));
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Cqsdc, 1, false, kind, HopTarget::BHop, 0)) ==
          doctest::Approx(3.0 / 8.0).epsilon(tol));
}

// The returned photon is guarded by the full three-photon measurement, which
// has no commuting branch for the eavesdropper to hide in.
TEST_CASE("intercept detection is 1/2 on the return hop") {
    for (AttackKind kind :
         {AttackKind::InterceptResendZ, AttackKind::InterceptResendRandom}) {
        CHECK(detection_probability_oracle(attack_config(
                  Protocol::Cqsdc, 1, false, kind, HopTarget::AHop, 0)) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(detection_probability_oracle(attack_config(
                  Protocol::Mcqsdc, 2, true, kind, HopTarget::AHop, 0)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("intercept detection is unchanged by rotations and chain length") {
    for (int position : {1, 2, 3}) {
        CHECK(detection_probability_oracle(
                  attack_config(Protocol::Mcqsdc, 3, true,
                                AttackKind::InterceptResendZ, HopTarget::CHop,
                                position)) == doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(detection_probability_oracle(attack_config(
              Protocol::Mcqsdc, 3, false, AttackKind::InterceptResendRandom,
              HopTarget::CHop, 2)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("probe detection: invisible without rotations, 1/4 with them") {
    CHECK(detection_probability_oracle(
              attack_config(Protocol::Mcqsdc, 2, false, AttackKind::EprProbe,
                            HopTarget::CHop, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    for (int controllers : {2, 3}) {
        CHECK(detection_probability_oracle(
                  attack_config(Protocol::Mcqsdc, controllers, true,
                                AttackKind::EprProbe, HopTarget::CHop, 2)) ==
              doctest::Approx(0.25).epsilon(1e-12));
    }
    CHECK(detection_probability_oracle(
              attack_config(Protocol::Mcqsdc, 3, true, AttackKind::EprProbe,
                            HopTarget::CHop, 3)) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("engine check errors match the oracle within four sigma") {
    // Chain intercept: the guarded check collects 500 samples.
    Config c = attack_config(Protocol::Cqsdc, 1, false,
                             AttackKind::InterceptResendZ, HopTarget::CHop, 1);
    c.num_triples = 2000;
    c.check_fraction = 0.25;
    c.min_check_samples = 1;
    c.seed = 42;
    const double exact = detection_probability_oracle(c);
    CHECK(exact == doctest::Approx(0.25).epsilon(1e-12));
    const RunResult r = run_protocol(c);
    CHECK(r.aborted);
    CHECK(*r.abort_check == CheckKind::CTransit);
    const CheckResult& guard = r.checks[1];
    CHECK(guard.samples == 500);
    check_rate(guard.error_rate, exact, guard.samples);
    CHECK(r.checks[0].errors == 0);  // the earlier check is undisturbed
}

TEST_CASE("engine matches the oracle for the rotated probe") {
    Config c = attack_config(Protocol::Mcqsdc, 2, true, AttackKind::EprProbe,
                             HopTarget::CHop, 2);
    c.num_triples = 1600;
    c.check_fraction = 0.25;
    c.min_check_samples = 1;
    c.seed = 7;
    const double exact = detection_probability_oracle(c);
    const RunResult r = run_protocol(c);
    REQUIRE(r.aborted);
    CHECK(*r.abort_check == CheckKind::CTransit);
    const CheckResult& guard = r.checks[1];
    CHECK(guard.samples == 400);
    check_rate(guard.error_rate, exact, guard.samples);
    REQUIRE(r.eve.has_value());
    CHECK(r.eve->identification_applicable);
    check_rate(r.eve->identification_rate, 0.5, r.eve->interactions);
}

TEST_CASE("engine matches the oracle for a random-basis intercept on the "
          "encoded-photon hop") {
    Config c = attack_config(Protocol::Cqsdc, 1, false,
                             AttackKind::InterceptResendRandom, HopTarget::BHop,
                             0);
    c.num_triples = 2000;
    c.check_fraction = 0.25;
    c.min_check_samples = 1;
    c.seed = 17;
    const double exact = detection_probability_oracle(c);
    CHECK(exact == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    const RunResult r = run_protocol(c);
    REQUIRE(r.aborted);
    CHECK(*r.abort_check == CheckKind::BTransit);
    const CheckResult& guard = r.checks[2];
    CHECK(guard.samples == 500);
    check_rate(guard.error_rate, exact, guard.samples);
}

TEST_CASE("rotations never increase the probe's information at matched "
          "priors") {
    // The comparison must match like with like.  A rotated composite's Bell
    // outcome is the Pauli's outcome relabelled by a fair Z/X coin, so
    // moving a Pauli prior onto the composites can only lose information
    // (data processing).  Splitting each Pauli between plain and rotated is
    // a different source entirely: the probe reads the rotation coin itself
    // as a fresh bit, which is not a statement about the Pauli leak.
    const std::vector<std::vector<double>> pauli_priors = {
        {0.25, 0.25, 0.25, 0.25},
        {0.7, 0.1, 0.1, 0.1},
        {0.5, 0.5, 0.0, 0.0},
        {1.0, 0.0, 0.0, 0.0},
        {0.4, 0.3, 0.2, 0.1},
    };
    for (const auto& p : pauli_priors) {
        std::vector<double> on_plain(8, 0.0);
        std::vector<double> on_rotated(8, 0.0);
        for (int i = 0; i < 4; ++i) {
            on_plain[i] = p[i];
            on_rotated[4 + i] = p[i];
        }
        const EveInformation off = eve_information(false, p);
        const EveInformation plain = eve_information(true, on_plain);
        const EveInformation rotated = eve_information(true, on_rotated);
        // Same ops, larger domain: the tables coincide.
        CHECK(plain.mutual_information_bits ==
              doctest::Approx(off.mutual_information_bits).epsilon(1e-12));
        // Always-rotate: the coin degrades every Pauli prior.
        CHECK(rotated.mutual_information_bits <=
              off.mutual_information_bits + 1e-12);
        CHECK(rotated.identification <= off.identification + 1e-12);
    }
    // The protocol's own priors: uniform over the enabled domain.
    const EveInformation off = eve_information(false, {});
    const EveInformation on = eve_information(true, {});
    CHECK(on.mutual_information_bits < off.mutual_information_bits);
    CHECK(on.identification < off.identification);
}

TEST_CASE("engine matches the oracle on the return hop") {
    Config c = attack_config(Protocol::Cqsdc, 1, false,
                             AttackKind::InterceptResendRandom, HopTarget::AHop, 0);
    c.num_triples = 1200;
    c.check_fraction = 0.25;
    c.min_check_samples = 1;
    c.seed = 3;
    const RunResult r = run_protocol(c);
    REQUIRE(r.aborted);
    CHECK(*r.abort_check == CheckKind::ATransit);
    for (int k = 0; k < 3; ++k) CHECK(r.checks[k].errors == 0);
    const CheckResult& guard = r.checks[3];
    CHECK(guard.samples == 300);
    check_rate(guard.error_rate, 0.5, guard.samples);
}

TEST_CASE("aggregation rejects empty and mismatched inputs") {
    CHECK_THROWS_AS(aggregate({}, "noise"), std::invalid_argument);

    Config a;
    a.permissions = {true};
    Config b = a;
    b.error_threshold = 0.5;  // differs beyond the axis
    const std::vector<RunReport> reports = {run_and_report(a),
                                            run_and_report(b)};
    CHECK_THROWS_AS(aggregate(reports, "noise"), std::invalid_argument);
    CHECK_THROWS_AS(aggregate(reports, "bogus"), std::invalid_argument);
}

TEST_CASE("aggregation pools runs by axis value in first-seen order") {
    Config base;
    base.num_triples = 40;
    base.check_fraction = 0.1;
    base.min_check_samples = 2;
    base.permissions = {true};

    std::vector<RunReport> reports;
    for (double noise : {0.2, 0.0, 0.2}) {
        Config c = base;
        c.noise_p = noise;
        c.error_threshold = 1.0;  // tolerate everything; never abort
        c.seed = 100 + reports.size();
        reports.push_back(run_and_report(c));
    }
    const auto points = aggregate(reports, "noise");
    REQUIRE(points.size() == 2);
    CHECK(points[0].axis_value == 0.2);
    CHECK(points[0].runs == 2);
    CHECK(points[1].axis_value == 0.0);
    CHECK(points[1].runs == 1);
    CHECK(points[1].delivered_exact == 1);
    CHECK(points[1].check_errors == 0);
    CHECK(points[0].check_samples == 32);  // 2 runs x 4 checks x 4 samples
    CHECK(points[0].error_rate ==
          doctest::Approx(static_cast<double>(points[0].check_errors) / 32.0));
    CHECK(points[1].delivered_ci.high == 1.0);
    CHECK(points[1].delivered_ci.low > 0.0);
}

TEST_CASE("a single aggregated run reproduces its own point estimates") {
    Config c;
    c.num_triples = 40;
    c.check_fraction = 0.1;
    c.min_check_samples = 2;
    c.permissions = {true};
    c.seed = 5;
    const RunReport report = run_and_report(c);
    const auto points = aggregate(std::vector<RunReport>{report}, "triples");
    REQUIRE(points.size() == 1);
    const auto& pt = points[0];
    CHECK(pt.axis_value == 40.0);
    CHECK(pt.runs == 1);
    CHECK(pt.delivered_exact == (report.result.delivered_exact ? 1 : 0));
    CHECK(pt.aborted == 0);
    long samples = 0;
    long errors = 0;
    for (const auto& check : report.result.checks) {
        if (!check.performed) continue;
        samples += check.samples;
        errors += check.errors;
    }
    CHECK(pt.check_samples == samples);
    CHECK(pt.check_errors == errors);
    CHECK(pt.error_rate ==
          static_cast<double>(errors) / static_cast<double>(samples));
    // Boundary counts keep exact interval endpoints.
    CHECK(pt.delivered_ci.high == 1.0);
    CHECK(pt.error_ci.low == 0.0);
}

TEST_CASE("sweep runs use derived per-point per-run seeds") {
    SweepConfig sweep;
    sweep.base.num_triples = 40;
    sweep.base.check_fraction = 0.1;
    sweep.base.min_check_samples = 2;
    sweep.base.permissions = {true};
    sweep.base.seed = 9;
    sweep.axis = "noise";
    sweep.points = {0.0, 0.3};
    sweep.runs_per_point = 3;
    sweep.base.error_threshold = 1.0;

    const SweepReport rep = run_sweep(sweep);
    REQUIRE(rep.points.size() == 2);
    CHECK(rep.points[0].runs == 3);
    CHECK(rep.points[0].delivered_exact == 3);  // noiseless point
    CHECK(rep.points[0].check_errors == 0);

    // Reproduce the documented seed schedule by hand.
    std::vector<RunReport> manual;
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const std::uint64_t point_seed = derive_seed(sweep.base.seed, i);
        for (int r = 0; r < sweep.runs_per_point; ++r) {
            manual.push_back(run_and_report(
                sweep.config_at(sweep.points[i], derive_seed(point_seed, r))));
        }
    }
    const SweepReport manual_rep{sweep, aggregate(manual, sweep.axis)};
    CHECK(rep.to_json() == manual_rep.to_json());

    // And the whole sweep is deterministic.
    CHECK(run_sweep(sweep).to_json() == rep.to_json());
}

TEST_CASE("attack evaluation: rotated probe") {
    AttackEvalConfig cfg;
    cfg.attack = AttackKind::EprProbe;
    cfg.hadamard_enabled = true;
    cfg.trials = 20000;
    cfg.seed = 5;
    const AttackEvalReport rep = run_attack_eval(cfg);
    CHECK(rep.oracle_identification == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.oracle_mi_bits == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.detection_probability == doctest::Approx(0.25).epsilon(1e-12));
    check_rate(rep.empirical_identification, 0.5, cfg.trials);
    // Plug-in mutual information carries a small positive bias, at most
    // (cells-1)/(2 n ln 2) ~ 0.0011 for 32 cells; allow a generous band.
    CHECK(std::abs(rep.empirical_mi_bits - 1.5) < 0.02);
}

TEST_CASE("attack evaluation: plain probe is invisible and fully informed") {
    AttackEvalConfig cfg;
    cfg.attack = AttackKind::EprProbe;
    cfg.hadamard_enabled = false;
    cfg.trials = 10000;
    cfg.seed = 5;
    const AttackEvalReport rep = run_attack_eval(cfg);
    CHECK(rep.oracle_identification == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.oracle_mi_bits == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.detection_probability == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.empirical_identification == 1.0);
    CHECK(std::abs(rep.empirical_mi_bits - 2.0) < 0.01);
}

TEST_CASE("attack evaluation: intercept-resend leaks nothing") {
    AttackEvalConfig cfg;
    cfg.attack = AttackKind::InterceptResendZ;
    cfg.hadamard_enabled = false;
    cfg.trials = 10;
    const AttackEvalReport rep = run_attack_eval(cfg);
    CHECK(rep.oracle_identification == 0.0);
    CHECK(rep.oracle_mi_bits == 0.0);
    CHECK(rep.empirical_identification == 0.0);
    CHECK(rep.detection_probability == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("attack evaluation: no attack, all zeros") {
    AttackEvalConfig cfg;
    cfg.attack = AttackKind::None;
    const AttackEvalReport rep = run_attack_eval(cfg);
    CHECK(rep.detection_probability == 0.0);
    CHECK(rep.oracle_mi_bits == 0.0);
}

TEST_CASE("attack evaluation is deterministic in the seed") {
    AttackEvalConfig cfg;
    cfg.trials = 2000;
    cfg.seed = 77;
    const auto a = run_attack_eval(cfg);
    const auto b = run_attack_eval(cfg);
    CHECK(a.to_json() == b.to_json());
    cfg.seed = 78;
    const auto c = run_attack_eval(cfg);
    CHECK(a.to_json() != c.to_json());
}
