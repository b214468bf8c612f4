#include <doctest.h>

#include <json.hpp>
#include <random>

#include "coactiv/policy.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coactiv;

namespace {

const char* kTinyPolicy = R"({
  "input_dim": 2,
  "action_names": ["a", "b"],
  "normalization": null,
  "layers": [
    {"weights": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], "bias": [0.0, 0.0, 0.5],
     "activation": "relu"},
    {"weights": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], "bias": [0.0, 0.0],
     "activation": "linear"}
  ]
})";

}  // namespace

TEST_CASE("policy loads and validates") {
    auto p = load_policy_text(kTinyPolicy);
    CHECK(p.input_dim == 2);
    CHECK(p.layers.size() == 2);
    CHECK(p.layer_widths() == std::vector<std::size_t>{2, 3, 2});
    CHECK(p.neuron_count() == 7);
}

TEST_CASE("shape mismatch names both layers") {
    std::string bad = R"({"input_dim": 4, "action_names": ["a"], "normalization": null,
      "layers": [{"weights": [[1,2,3]], "bias": [0], "activation": "relu"},
                 {"weights": [[1,2,3,4,5]], "bias": [0], "activation": "linear"}]})";
    try {
        load_policy_text(bad);
        FAIL("expected shape error");
    } catch (const PolicyError& e) {
        std::string msg = e.what();
        CHECK(msg.find("layer") != std::string::npos);
    }
}

TEST_CASE("non-finite weights are reported with coordinates") {
    auto p = load_policy_text(kTinyPolicy);
    p.layers[0].weights[1][1] = std::numeric_limits<double>::quiet_NaN();
    try {
        validate_policy(p);
        FAIL("expected a non-finite weight error");
    } catch (const PolicyError& e) {
        std::string msg = e.what();
        CHECK(msg.find("non-finite") != std::string::npos);
        CHECK(msg.find("layer 0") != std::string::npos);
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("col 1") != std::string::npos);
    }
    // a NaN smuggled through serialization (as null) must also fail to load
    CHECK_THROWS_AS((void)load_policy_text(policy_to_json(p)), PolicyError);
}

TEST_CASE("unknown activation kind") {
    std::string bad = R"({"input_dim": 1, "action_names": ["a"], "normalization": null,
      "layers": [{"weights": [[1]], "bias": [0], "activation": "tanh"}]})";
    CHECK_THROWS_AS(load_policy_text(bad), PolicyError);
}

TEST_CASE("forward pass basics") {
    // identity weights, zero bias, linear: q = normalized input
    auto p = testutil::fixed_linear_policy(2, {{1, 0}, {0, 1}}, {0, 0}, {"a", "b"});
    p.normalization = Normalization{{0.0, 0.0}, {2.0, 4.0}};
    auto r = forward(p, {1, 2});
    CHECK(r.q_values[0] == doctest::Approx(0.5));
    CHECK(r.q_values[1] == doctest::Approx(0.5));
    CHECK(r.record.layers.size() == 2);
    CHECK(r.record.layers[0][0] == doctest::Approx(0.5));

    // rectifier on all-negative pre-activations gives zeros
    MlpPolicy relu;
    relu.input_dim = 2;
    relu.action_names = {"a"};
    Layer h;
    h.weights = {{-1.0, -1.0}, {-2.0, 0.0}};
    h.bias = {-0.5, -0.5};
    h.activation = Activation::Relu;
    Layer out;
    out.weights = {{1.0, 1.0}};
    out.bias = {0.0};
    out.activation = Activation::Linear;
    relu.layers = {h, out};
    auto rr = forward(relu, {1, 1});
    CHECK(rr.record.layers[1] == std::vector<double>{0.0, 0.0});
    CHECK(rr.q_values[0] == 0.0);
}

TEST_CASE("forward matches the straight-line oracle") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 30; ++i) {
        auto p = oracle::random_mlp(4, 3, {5, 6, 4}, rng);
        StateVector s = {std::int64_t(rng() % 5), std::int64_t(rng() % 5),
                         std::int64_t(rng() % 5), std::int64_t(rng() % 5)};
        auto mine = forward(p, s);
        auto ref = oracle::forward_layers_naive(p, s);
        REQUIRE(mine.record.layers.size() == ref.size());
        for (std::size_t li = 0; li < ref.size(); ++li) {
            for (std::size_t k = 0; k < ref[li].size(); ++k) {
                double a = mine.record.layers[li][k], b = ref[li][k];
                CHECK(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}));
            }
        }
    }
}

TEST_CASE("select_action picks the best allowed output") {
    auto p = testutil::fixed_linear_policy(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                           {0, 0, 0}, {"a", "b", "c"});
    // q = state values directly
    CHECK(select_action(p, {1, 3, 2}, std::vector<std::string>{"a", "b", "c"}) == "b");
    CHECK(select_action(p, {2, 2, 0}, std::vector<std::string>{"a", "b", "c"}) == "a");

    std::uint64_t fallbacks = 0;
    CHECK(select_action(p, {5, 1, 0}, std::vector<std::string>{"b"}, false, &fallbacks) ==
          "b");
    CHECK(fallbacks == 1);
    CHECK_THROWS_AS(select_action(p, {5, 1, 0}, std::vector<std::string>{"b"}, true),
                    PolicyError);
    CHECK_THROWS_AS(select_action(p, {5, 1, 0}, std::vector<std::string>{}), PolicyError);
}

TEST_CASE("argmax is invariant under positive affine Q transforms") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 20; ++i) {
        auto p = oracle::random_mlp(3, 4, {6}, rng);
        MlpPolicy shifted = p;
        for (auto& b : shifted.layers.back().bias) b += 3.25;
        MlpPolicy scaled = p;
        for (auto& row : scaled.layers.back().weights)
            for (auto& w : row) w *= 2.5;
        for (auto& b : scaled.layers.back().bias) b *= 2.5;
        StateVector s = {std::int64_t(rng() % 3), std::int64_t(rng() % 3),
                         std::int64_t(rng() % 3)};
        std::vector<std::string> all = p.action_names;
        CHECK(select_action(p, s, all) == select_action(shifted, s, all));
        CHECK(select_action(p, s, all) == select_action(scaled, s, all));
    }
}

TEST_CASE("pruning zeroes input columns") {
    std::mt19937_64 rng(29);
    auto p = oracle::random_mlp(4, 2, {5}, rng);

    // empty prune set: identical digest
    CHECK(policy_digest(prune_input_features(p, {})) == policy_digest(p));

    // pruned feature: output invariant under that feature
    auto pruned = prune_input_features(p, {2});
    auto qa = forward(pruned, {1, 2, 0, 3}).q_values;
    auto qb = forward(pruned, {1, 2, 3, 3}).q_values;
    CHECK(qa == qb);

    // all features pruned: constant output
    auto all = prune_input_features(p, {0, 1, 2, 3});
    CHECK(forward(all, {0, 0, 0, 0}).q_values == forward(all, {3, 1, 2, 0}).q_values);

    // composition == union
    auto ab = prune_input_features(p, {1, 3});
    auto a_then_b = prune_input_features(prune_input_features(p, {1}), {3});
    CHECK(policy_digest(ab) == policy_digest(a_then_b));

    CHECK_THROWS_AS(prune_input_features(p, {9}), PolicyError);
}

TEST_CASE("digest changes exactly when content changes") {
    auto p = load_policy_text(kTinyPolicy);
    auto q = load_policy_text(kTinyPolicy);
    CHECK(policy_digest(p) == policy_digest(q));
    q.layers[1].weights[0][0] += 1e-9;
    CHECK(policy_digest(p) != policy_digest(q));
}

TEST_CASE("policy json round trip") {
    std::mt19937_64 rng(31);
    auto p = oracle::random_mlp(3, 2, {4}, rng);
    p.normalization = Normalization{{0, 0, 0}, {1, 2, 4}};
    auto q = load_policy_text(policy_to_json(p));
    CHECK(policy_digest(p) == policy_digest(q));
}
