#include <doctest.h>

#include <random>

#include "coactiv/model_parser.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coactiv;

TEST_CASE("minimal model parses") {
    auto m = parse_model(
        "module m\n  x : [0..1] init 0;\n  [a] x=0 -> 1:(x'=1);\nendmodule\n");
    CHECK(m.variables.size() == 1);
    CHECK(m.commands.size() == 1);
    CHECK(m.action_names == std::vector<std::string>{"a"});
    CHECK(m.variables[0].name == "x");
    CHECK(m.variables[0].hi == 1);
}

TEST_CASE("probability sum violation reports the sum") {
    try {
        parse_model(
            "module m\n  x : [0..1] init 0;\n"
            "  [a] x=0 -> 0.5:(x'=1) + 0.4:(x'=0);\nendmodule\n");
        FAIL("expected probability_sum error");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::ProbabilitySum);
        CHECK(std::string(e.what()).find("9/10") != std::string::npos);
    }
}

TEST_CASE("diagnostic classes") {
    // duplicate variable
    CHECK_THROWS_AS(parse_model("module m\n x:[0..1] init 0;\n x:[0..1] init 0;\n"
                                "[a] x=0 -> 1:(x'=1);\nendmodule\n"),
                    ParseError);
    try {
        parse_model("module m\n x:[0..1] init 0;\n x:[0..2] init 1;\n"
                    "[a] x=0 -> 1:(x'=1);\nendmodule\n");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::DuplicateDecl);
    }
    // out-of-bounds init
    try {
        parse_model("module m\n x:[0..1] init 5;\n [a] x=0 -> 1:(x'=1);\nendmodule\n");
        FAIL("expected out_of_bounds_init");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::OutOfBoundsInit);
        CHECK(e.line() == 2);
    }
    // undeclared identifier in a guard
    try {
        parse_model("module m\n x:[0..1] init 0;\n [a] y=0 -> 1:(x'=1);\nendmodule\n");
        FAIL("expected undeclared_id");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::UndeclaredId);
    }
    // plain syntax error carries a position
    try {
        parse_model("module m\n x:[0..1] init 0\n[a] x=0 -> 1:(x'=1);\nendmodule\n");
        FAIL("expected syntax error");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::Syntax);
        CHECK(e.line() >= 2);
    }
    // probability out of (0,1]
    try {
        parse_model("module m\n x:[0..1] init 0;\n"
                    " [a] x=0 -> 2:(x'=1) + -1:(x'=0);\nendmodule\n");
        FAIL("expected probability range error");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::ProbabilitySum);
    }
}

TEST_CASE("constants resolve and re-emit") {
    auto m = parse_model(
        "const n = 2;\nconst p = 0.5;\n"
        "module m\n x : [0..n] init n;\n"
        " [a] x=n -> p:(x'=0) + p:(x'=1);\nendmodule\n");
    CHECK(m.variables[0].hi == 2);
    CHECK(m.variables[0].init == 2);
    CHECK(m.commands[0].updates[0].probability == make_rational(1, 2));
    CHECK(m.constants.size() == 2);
    // round trip keeps the resolved values
    auto m2 = parse_model(pretty_print(m));
    CHECK(m == m2);
}

TEST_CASE("rational constant in integer context is rejected") {
    CHECK_THROWS_AS(parse_model("const p = 0.5;\nmodule m\n x:[0..1] init 0;\n"
                                " [a] x=0 -> 1:(x'=p);\nendmodule\n"),
                    ParseError);
}

TEST_CASE("shipped taxi model matches the expected state tuple") {
    auto m = parse_model_file(testutil::taxi_path());
    std::vector<std::string> expected = {
        "x", "y", "passenger_loc_x", "passenger_loc_y", "passenger_dest_x",
        "passenger_dest_y", "fuel", "on_board", "jobs_done", "done"};
    CHECK(m.variable_names() == expected);
    CHECK(m.action_names == std::vector<std::string>{"north", "south", "east", "west",
                                                     "pick_up", "drop"});
    auto m2 = parse_model(pretty_print(m));
    CHECK(m == m2);
}

TEST_CASE("shipped cleaning robot parses and round-trips") {
    auto m = parse_model_file(testutil::robot_path());
    CHECK(m.action_names.size() == 9);
    CHECK(m.dimension() == 7);
    auto m2 = parse_model(pretty_print(m));
    CHECK(m == m2);
    CHECK(pretty_print(m2) == pretty_print(m));
}

TEST_CASE("pretty_print is deterministic") {
    auto a = parse_model_file(testutil::taxi_path());
    auto b = parse_model_file(testutil::taxi_path());
    CHECK(pretty_print(a) == pretty_print(b));
    CHECK(model_digest(a) == model_digest(b));
}

TEST_CASE("fuzzed models round-trip through pretty_print") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        auto m = oracle::random_mdp(rng);
        auto m1 = parse_model(pretty_print(m));
        auto m2 = parse_model(pretty_print(m1));
        CHECK(m1 == m2);
    }
}

TEST_CASE("update branches writing the same successor merge") {
    auto m = parse_model(
        "module m\n x : [0..1] init 0;\n"
        " [a] x=0 -> 0.5:(x'=1) + 0.5:(x'=1);\nendmodule\n");
    auto d = successor_distribution(m, {0}, "a");
    REQUIRE(d.entries.size() == 1);
    CHECK(d.entries[0].second == Rational(1));
}

TEST_CASE("variables must precede commands; rewards need known actions") {
    CHECK_THROWS_AS(
        parse_model("module m\n [a] true -> 1:true;\n x:[0..1] init 0;\nendmodule\n"),
        ParseError);
    CHECK_THROWS_AS(parse_model("module m\n x:[0..1] init 0;\n [a] x=0 -> 1:(x'=1);\n"
                                "endmodule\nrewards\n [b] true : 1;\nendrewards\n"),
                    ParseError);
}
