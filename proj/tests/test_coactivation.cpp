#include <doctest.h>

#include <algorithm>
#include <random>

#include "coactiv/coactivation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coactiv;

TEST_CASE("activation collection shapes and floors") {
    std::mt19937_64 rng(3);
    auto p = oracle::random_mlp(2, 2, {2}, rng);  // widths 2,2,2 -> 6 neurons
    std::vector<StateVector> states = {{0, 1}, {1, 0}, {2, 2}};
    auto m = collect_activations(p, states);
    CHECK(m.columns.size() == 6);
    CHECK(m.sample_count == 3);
    for (const auto& col : m.col_data) CHECK(col.size() == 3);
    CHECK(!m.warnings.empty());  // below 30 samples
    CHECK_THROWS_AS(collect_activations(p, {{0, 1}, {1, 0}}), GraphError);
}

TEST_CASE("activation entries match the independent forward pass") {
    std::mt19937_64 rng(11);
    auto p = oracle::random_mlp(3, 2, {4, 3}, rng);
    std::vector<StateVector> states = {{0, 1, 2}, {2, 1, 0}, {1, 1, 1}, {2, 2, 2}};
    auto m = collect_activations(p, states);
    for (std::size_t si = 0; si < states.size(); ++si) {
        auto ref = oracle::forward_layers_naive(p, states[si]);
        std::size_t col = 0;
        for (const auto& layer : ref)
            for (double v : layer) {
                CHECK(m.col_data[col][si] == doctest::Approx(v).epsilon(1e-12));
                ++col;
            }
    }
}

TEST_CASE("dead rectifier units are flagged zero-variance") {
    MlpPolicy p;
    p.input_dim = 1;
    p.action_names = {"a"};
    Layer h;
    h.weights = {{1.0}, {-1.0}};
    h.bias = {0.0, -10.0};  // second unit never fires on inputs >= 0
    h.activation = Activation::Relu;
    Layer out;
    out.weights = {{1.0, 1.0}};
    out.bias = {0.0};
    out.activation = Activation::Linear;
    p.layers = {h, out};
    auto m = collect_activations(p, {{0}, {1}, {2}, {3}});
    CHECK(m.zero_variance[2] == 1);  // hidden neuron 1 (after input column 0)
    auto g = build_graph(m);
    for (const auto& e : g.edges) {
        CHECK(e.a != 2);
        CHECK(e.b != 2);
    }
}

TEST_CASE("pearson basics and the worked example") {
    std::vector<double> x = {1, 2, 3};
    CHECK(*pearson(x, x) == doctest::Approx(1.0));
    std::vector<double> nx = {-1, -2, -3};
    CHECK(*pearson(x, nx) == doctest::Approx(-1.0));
    std::vector<double> y = {1, 2, 4};
    // two-pass: sxy = 3, sxx = 2, syy = 14/3; r = 3/sqrt(28/3)
    double expected = 3.0 / std::sqrt(2.0 * (14.0 / 3.0));
    CHECK(*pearson(x, y) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(*pearson(x, y) == doctest::Approx(0.9819805060619659).epsilon(1e-12));
    CHECK(*oracle::pearson_two_pass(x, y) == doctest::Approx(*pearson(x, y)).epsilon(1e-14));

    std::vector<double> constant = {2, 2, 2};
    CHECK(!pearson(x, constant).has_value());
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), GraphError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                    GraphError);
}

TEST_CASE("pearson agrees with the two-pass oracle on random data") {
    std::mt19937_64 rng(19);
    auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 4.0 - 2.0; };
    for (int iter = 0; iter < 300; ++iter) {
        std::size_t n = 3 + rng() % 40;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = uni();
            y[i] = uni();
        }
        auto a = pearson(x, y);
        auto b = oracle::pearson_two_pass(x, y);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            CHECK(std::abs(*a - *b) <= 1e-12);
            CHECK(std::abs(*a) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("affine transforms leave correlations unchanged") {
    std::mt19937_64 rng(23);
    auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53; };
    for (int iter = 0; iter < 50; ++iter) {
        std::size_t n = 5 + rng() % 20;
        std::vector<double> x(n), y(n), xs(n);
        double scale = 0.5 + uni() * 3.0, offset = uni() * 10.0 - 5.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = uni() * 2.0 - 1.0;
            y[i] = uni() * 2.0 - 1.0;
            xs[i] = x[i] * scale + offset;
        }
        auto a = pearson(x, y);
        auto b = pearson(xs, y);
        if (a && b) CHECK(std::abs(*a - *b) <= 1e-10);
    }
}

TEST_CASE("graph construction edge counts") {
    std::mt19937_64 rng(29);
    auto p = oracle::random_mlp(2, 2, {3}, rng);  // 2 + 3 + 2 = 7 neurons
    std::vector<StateVector> states;
    for (int i = 0; i < 20; ++i)
        states.push_back({std::int64_t(rng() % 5), std::int64_t(rng() % 5)});
    auto m = collect_activations(p, states);
    std::size_t live = 0;
    for (auto zv : m.zero_variance)
        if (!zv) ++live;

    auto g0 = build_graph(m, {0.0, LayerScope::AllPairs});
    CHECK(g0.edges.size() == live * (live - 1) / 2);

    GraphOptions over;
    over.min_abs_weight = 1.01;
    CHECK(build_graph(m, over).edges.empty());

    GraphOptions adj;
    adj.layer_scope = LayerScope::AdjacentLayers;
    auto ga = build_graph(m, adj);
    for (const auto& e : ga.edges)
        CHECK(std::abs(g0.nodes[std::size_t(e.a)].layer -
                       g0.nodes[std::size_t(e.b)].layer) == 1);
}

TEST_CASE("row order does not change the graph") {
    std::mt19937_64 rng(31);
    auto p = oracle::random_mlp(2, 2, {3}, rng);
    std::vector<StateVector> states;
    for (int i = 0; i < 15; ++i)
        states.push_back({std::int64_t(rng() % 4), std::int64_t(rng() % 4)});
    auto g1 = build_graph(collect_activations(p, states));
    std::reverse(states.begin(), states.end());
    auto g2 = build_graph(collect_activations(p, states));
    REQUIRE(g1.edges.size() == g2.edges.size());
    for (std::size_t i = 0; i < g1.edges.size(); ++i) {
        CHECK(g1.edges[i].a == g2.edges[i].a);
        CHECK(g1.edges[i].b == g2.edges[i].b);
        CHECK(g1.edges[i].weight == doctest::Approx(g2.edges[i].weight).epsilon(1e-12));
    }
}

TEST_CASE("graph exports") {
    CoactivationGraph g;
    g.nodes = {{0, 0}, {0, 1}, {1, 0}};
    g.zero_variance = {0, 0, 1};
    g.edges = {{0, 1, 0.75}};
    g.dataset_label = "demo";

    auto graphml = graph_to_graphml(g);
    CHECK(graphml.find("<node id=\"n0_0\">") != std::string::npos);
    CHECK(graphml.find("0.75") != std::string::npos);

    auto dot = graph_to_dot(g);
    CHECK(dot.find("n0_0 -- n0_1 [weight=0.75]") != std::string::npos);
    CHECK(dot.find("zero_variance=true") != std::string::npos);

    auto csv = graph_to_adjacency_csv(g);
    CHECK(csv == "i_layer,i_idx,j_layer,j_idx,weight\n0,0,0,1,0.75\n");

    auto back = graph_from_json(graph_to_json(g));
    CHECK(back.nodes == g.nodes);
    CHECK(back.edges.size() == 1);
    CHECK(back.dataset_label == "demo");
    CHECK(back.zero_variance[2] == 1);
}
