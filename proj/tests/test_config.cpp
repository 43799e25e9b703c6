// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "config.hpp"

using namespace qsdc;

namespace {

Json parse(const char* text) { return Json::parse(text); }

} // namespace

TEST_CASE("defaults for the single-controller protocol") {
    const Config c = Config::from_json(parse("{}"));
    CHECK(c.protocol == Protocol::Cqsdc);
    CHECK(c.num_triples == 256);
    CHECK(c.num_controllers == 1);
    CHECK(c.check_fraction == doctest::Approx(0.1));
    CHECK(c.min_check_samples == 32);
    CHECK(c.error_threshold == 0.0);
    CHECK(c.noise_p == 0.0);
    CHECK_FALSE(c.hadamard_enabled);
    CHECK(c.attack.kind == AttackKind::None);
    CHECK(c.permissions == std::vector<bool>{true});
    CHECK(c.seed == 1);
    CHECK_FALSE(c.message.has_value());
}

TEST_CASE("defaults for the multi-controller protocol") {
    const Config c = Config::from_json(parse(R"({"protocol":"mcqsdc"})"));
    CHECK(c.num_controllers == 3);
    CHECK(c.hadamard_enabled);
    CHECK(c.permissions.size() == 3);
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        Config::from_json(parse(R"({"protcol":"cqsdc"})"));
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("protcol") != std::string::npos);
    }
}

TEST_CASE("attack target defaults") {
    const Config z = Config::from_json(
        parse(R"({"protocol":"mcqsdc","attack":"intercept-z"})"));
    CHECK(z.attack.target == HopTarget::CHop);
    CHECK(z.attack.position == 3);  // last hop: chain -> receiver

    const Config probe = Config::from_json(
        parse(R"({"protocol":"mcqsdc","attack":"epr-probe"})"));
    CHECK(probe.attack.target == HopTarget::CHop);
    CHECK(probe.attack.position == 2);

    const Config hop = Config::from_json(
        parse(R"({"protocol":"mcqsdc","attack":"intercept-z","target":"c-hop:2"})"));
    CHECK(hop.attack.position == 2);

    const Config ab = Config::from_json(
        parse(R"({"attack":"intercept-random","target":"ab-hop"})"));
    CHECK(ab.attack.target == HopTarget::AbHop);
}

TEST_CASE("a target without an attack is rejected") {
    CHECK_THROWS_AS(Config::from_json(parse(R"({"target":"c-hop"})")),
                    std::invalid_argument);
}

TEST_CASE("permissions parsing") {
    const Config c = Config::from_json(
        parse(R"({"protocol":"mcqsdc","permissions":"1,0,1"})"));
    CHECK(c.permissions == std::vector<bool>{true, false, true});
    CHECK_FALSE(c.all_permitted());

    const Config none = Config::from_json(
        parse(R"({"protocol":"mcqsdc","permissions":"none"})"));
    CHECK(none.permissions == std::vector<bool>{false, false, false});

    const Config arr = Config::from_json(
        parse(R"({"protocol":"mcqsdc","permissions":[true,false,true]})"));
    CHECK(arr.permissions == std::vector<bool>{true, false, true});

    CHECK_THROWS_AS(Config::from_json(
                        parse(R"({"protocol":"mcqsdc","permissions":"1,0"})")),
                    std::invalid_argument);
}

TEST_CASE("the entangled probe needs an intermediate controller") {
    CHECK_THROWS_AS(Config::from_json(parse(R"({"attack":"epr-probe"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        Config::from_json(parse(
            R"({"protocol":"mcqsdc","attack":"epr-probe","target":"c-hop:1"})")),
        std::invalid_argument);
}

TEST_CASE("hadamard rotations are rejected for the single-controller protocol") {
    CHECK_THROWS_AS(Config::from_json(parse(R"({"hadamard":"on"})")),
                    std::invalid_argument);
}

TEST_CASE("check sample arithmetic") {
    Config c = Config::from_json(
        parse(R"({"triples":100,"check-fraction":0.1,"min-check-samples":5})"));
    CHECK(c.check_samples() == 10);
    CHECK(c.message_triples() == 60);

    c = Config::from_json(
        parse(R"({"triples":100,"check-fraction":0.01,"min-check-samples":5})"));
    CHECK(c.check_samples() == 5);

    c = Config::from_json(
        parse(R"({"triples":30,"check-fraction":0.05,"min-check-samples":1})"));
    CHECK(c.check_samples() == 2);  // ceil(1.5)
}

TEST_CASE("check subsets must not exhaust the triples") {
    try {
        Config::from_json(parse(R"({"triples":100})"));  // 4*32 > 100
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("exhaust") != std::string::npos);
    }
}

TEST_CASE("explicit messages must match the capacity exactly") {
    const Config ok = Config::from_json(parse(
        R"({"triples":8,"check-fraction":0.1,"min-check-samples":1,"message":"101010101010"})"));
    CHECK(ok.message_triples() == 4);
    CHECK(*ok.message == "101010101010");

    try {
        Config::from_json(parse(
            R"({"triples":8,"check-fraction":0.1,"min-check-samples":1,"message":"101"})"));
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("12") != std::string::npos);
    }

    CHECK_THROWS_AS(
        Config::from_json(parse(
            R"({"triples":8,"check-fraction":0.1,"min-check-samples":1,"message":"10101010101x"})")),
        std::invalid_argument);
}

TEST_CASE("config JSON round trip") {
    const Config c = Config::from_json(parse(
        R"({"protocol":"mcqsdc","triples":400,"controllers":4,"permissions":"1,0,1,1",
            "attack":"epr-probe","target":"c-hop:3","seed":99,"noise":0.01})"));
    const Config back = Config::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    const Config plain = Config::from_json(parse("{}"));
    CHECK(Config::from_json(plain.to_json()).to_json() == plain.to_json());
}

TEST_CASE("sweep validation") {
    const SweepConfig s = SweepConfig::from_json(parse(
        R"({"triples":200,"min-check-samples":8,"axis":"noise",
            "points":[0.0,0.01,0.02],"runs-per-point":5})"));
    CHECK(s.points.size() == 3);
    const Config p1 = s.config_at(0.02, 123);
    CHECK(p1.noise_p == doctest::Approx(0.02));
    CHECK(p1.seed == 123);

    CHECK_THROWS_AS(SweepConfig::from_json(parse(
                        R"({"axis":"protocol","points":[1]})")),
                    std::invalid_argument);
    // Integer axis with a fractional point.
    CHECK_THROWS_AS(SweepConfig::from_json(parse(
                        R"({"triples":200,"min-check-samples":8,
                            "axis":"triples","points":[200.5]})")),
                    std::invalid_argument);
    // A point that makes the run configuration infeasible.
    CHECK_THROWS_AS(SweepConfig::from_json(parse(
                        R"({"axis":"triples","points":[4]})")),
                    std::invalid_argument);
    // Controllers axis resizes permissions and revalidates.
    const SweepConfig ctrl = SweepConfig::from_json(parse(
        R"({"protocol":"mcqsdc","triples":300,"min-check-samples":8,
            "axis":"controllers","points":[2,4,8]})"));
    CHECK(ctrl.config_at(8, 7).permissions.size() == 8);
}

TEST_CASE("attack evaluation config") {
    const AttackEvalConfig e = AttackEvalConfig::from_json(parse("{}"));
    CHECK(e.attack == AttackKind::EprProbe);
    CHECK(e.hadamard_enabled);
    CHECK(e.trials == 10000);

    CHECK_THROWS_AS(AttackEvalConfig::from_json(parse(R"({"trials":0})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(AttackEvalConfig::from_json(parse(R"({"bogus":1})")),
                    std::invalid_argument);
    const AttackEvalConfig back = AttackEvalConfig::from_json(e.to_json());
    CHECK(back.to_json() == e.to_json());
}
