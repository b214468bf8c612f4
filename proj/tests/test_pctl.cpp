#include <doctest.h>

#include <random>

#include "coactiv/pctl.hpp"
#include "oracles.hpp"

using namespace coactiv;

namespace {

// s0 -> T (1/2), sink (1/2); plus the 2/3 variant with a return edge
InducedDtmc half_chain() {
    InducedDtmc d;
    d.states = {{0}, {1}, {2}};
    d.initial = 0;
    d.feature_names = {"s"};
    d.label_names = {"goal"};
    d.rows = {{{1, make_rational(1, 2)}, {2, make_rational(1, 2)}},
              {{1, Rational(1)}},
              {{2, Rational(1)}}};
    d.state_label_sets = {{}, {"goal"}, {}};
    d.chosen_action = {"a", "", ""};
    return d;
}

// x0 = 1/2 + 1/2 x1, x1 = 1/2 x0  =>  x0 = 2/3
InducedDtmc two_thirds_chain() {
    InducedDtmc d;
    d.states = {{0}, {1}, {2}, {3}};
    d.initial = 0;
    d.feature_names = {"s"};
    d.label_names = {"goal"};
    d.rows = {{{2, make_rational(1, 2)}, {1, make_rational(1, 2)}},
              {{0, make_rational(1, 2)}, {3, make_rational(1, 2)}},
              {{2, Rational(1)}},
              {{3, Rational(1)}}};
    d.state_label_sets = {{}, {}, {"goal"}, {}};
    d.chosen_action = {"a", "a", "", ""};
    return d;
}

}  // namespace

TEST_CASE("property parsing") {
    auto p1 = parse_property("P=1 [ F jobs_done=2 ]");
    CHECK(p1.cmp == PropCmp::Eq);
    CHECK(p1.threshold == Rational(1));
    CHECK(property_to_string(p1) == "P=1 [ F (jobs_done = 2) ]");

    auto p2 = parse_property("P=? [ F energy=0 ]");
    CHECK(p2.cmp == PropCmp::Query);

    auto p3 = parse_property("P>=1/2 [ F \"goal\" ]");
    CHECK(p3.cmp == PropCmp::Ge);
    CHECK(p3.threshold == make_rational(1, 2));

    auto p4 = parse_property("P<0.25 [ F x=0 & y=1 ]");
    CHECK(p4.cmp == PropCmp::Lt);
    CHECK(p4.threshold == make_rational(1, 4));

    CHECK_THROWS_AS(parse_property("P=1.5 [ F x=0 ]"), ParseError);
    try {
        parse_property("P=1.5 [ F x=0 ]");
    } catch (const ParseError& e) {
        CHECK(e.diag_class() == DiagClass::Range);
    }
    CHECK_THROWS_AS(parse_property("P=1 [ G x=0 ]"), ParseError);
    CHECK_THROWS_AS(parse_property("P=1 [ F x=0 ] trailing"), ParseError);
    CHECK_THROWS_AS(parse_property("Q=1 [ F x=0 ]"), ParseError);
}

TEST_CASE("simple exact reachability values") {
    auto prop = parse_property("P=? [ F \"goal\" ]");
    {
        auto d = half_chain();
        auto r = check_reachability(d, prop, CheckMode::Exact);
        CHECK(r.exact_initial == make_rational(1, 2));
        CHECK(r.exact_values[1] == Rational(1));
        CHECK(r.exact_values[2] == Rational(0));
        CHECK(r.is_prob1[1] == 1);
        CHECK(r.is_prob0[2] == 1);
    }
    {
        // initial state in the target set
        InducedDtmc d = half_chain();
        d.state_label_sets[0] = {"goal"};
        auto r = check_reachability(d, prop, CheckMode::Exact);
        CHECK(r.exact_initial == Rational(1));
        CHECK(r.is_target[0] == 1);
    }
    {
        auto d = two_thirds_chain();
        auto r = check_reachability(d, prop, CheckMode::Exact);
        CHECK(r.exact_initial == make_rational(2, 3));
        CHECK(r.exact_values[1] == make_rational(1, 3));
    }
}

TEST_CASE("threshold comparisons use exact arithmetic") {
    auto d = two_thirds_chain();
    auto ge = check_reachability(d, parse_property("P>=2/3 [ F \"goal\" ]"));
    CHECK(ge.satisfied == true);
    auto gt = check_reachability(d, parse_property("P>2/3 [ F \"goal\" ]"));
    CHECK(gt.satisfied == false);
    auto eq = check_reachability(d, parse_property("P=2/3 [ F \"goal\" ]"));
    CHECK(eq.satisfied == true);
    auto query = check_reachability(d, parse_property("P=? [ F \"goal\" ]"));
    CHECK(!query.satisfied.has_value());
}

TEST_CASE("feature predicates as targets") {
    auto d = two_thirds_chain();
    auto r = check_reachability(d, parse_property("P=? [ F s=2 ]"));
    CHECK(r.exact_initial == make_rational(2, 3));
    CHECK_THROWS_AS(check_reachability(d, parse_property("P=? [ F nosuch=1 ]")), Error);
}

TEST_CASE("exact mode agrees with the dense oracle and Monte Carlo") {
    std::mt19937_64 rng(77);
    auto prop = parse_property("P=? [ F \"goal\" ]");
    for (int i = 0; i < 40; ++i) {
        auto d = oracle::random_chain(rng, 10);
        auto r = check_reachability(d, prop, CheckMode::Exact);
        std::vector<std::uint8_t> target(d.size(), 0);
        for (std::size_t k = 0; k < d.size(); ++k)
            target[k] = !d.state_label_sets[k].empty();
        auto ref = oracle::reach_values_dense(d, target);
        for (std::size_t k = 0; k < d.size(); ++k) CHECK(r.exact_values[k] == ref[k]);
        // values stay within [0,1] and match the precomputed sets
        for (std::size_t k = 0; k < d.size(); ++k) {
            CHECK(r.exact_values[k] >= 0);
            CHECK(r.exact_values[k] <= 1);
            if (r.is_prob0[k]) CHECK(r.exact_values[k] == 0);
            if (r.is_prob1[k]) CHECK(r.exact_values[k] == 1);
        }
    }
    // Monte-Carlo sanity on a handful of chains
    for (int i = 0; i < 5; ++i) {
        auto d = oracle::random_chain(rng, 8);
        auto r = check_reachability(d, prop, CheckMode::Exact);
        std::vector<std::uint8_t> target(d.size(), 0);
        for (std::size_t k = 0; k < d.size(); ++k)
            target[k] = !d.state_label_sets[k].empty();
        double est = oracle::reach_mc(d, target, 200000, 5000 + std::uint64_t(i));
        double p = r.initial_value;
        double sigma = std::sqrt(std::max(p * (1 - p), 0.0) / 200000.0);
        CHECK(std::abs(est - p) <= std::max(4 * sigma, 1e-9));
    }
}

TEST_CASE("iterative mode approximates exact mode") {
    std::mt19937_64 rng(88);
    auto prop = parse_property("P=? [ F \"goal\" ]");
    for (int i = 0; i < 20; ++i) {
        auto d = oracle::random_chain(rng, 10);
        auto ex = check_reachability(d, prop, CheckMode::Exact);
        auto it = check_reachability(d, prop, CheckMode::Iterative, 1e-9);
        CHECK(it.converged);
        for (std::size_t k = 0; k < d.size(); ++k)
            CHECK(std::abs(it.values[k] - ex.values[k]) <= 1e-8);  // 10 * epsilon
    }
}

TEST_CASE("relevant_states selections") {
    auto d = two_thirds_chain();
    auto prop = parse_property("P=? [ F \"goal\" ]");
    auto r = check_reachability(d, prop);
    CHECK(relevant_states(d, r, Selection::AllReachable) ==
          std::vector<std::size_t>{0, 1, 2, 3});
    // the sink (state 3) has value 0 and drops out
    CHECK(relevant_states(d, r, Selection::PositiveProb) ==
          std::vector<std::size_t>{0, 1, 2});
    CHECK(relevant_states(d, r, Selection::TargetOnly) == std::vector<std::size_t>{2});
}

TEST_CASE("state values export") {
    auto d = half_chain();
    auto r = check_reachability(d, parse_property("P=? [ F \"goal\" ]"));
    CHECK(export_state_values(r) == "0 1/2\n1 1\n2 0\n");
}
