#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "coactiv/dataset.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coactiv;

namespace {

std::vector<StateVector> grid_states(int n) {
    std::vector<StateVector> out;
    for (int i = 0; i < n; ++i) out.push_back({i, (i * 7) % 5});
    return out;
}

const std::vector<std::string> kNames = {"fuel", "pos"};

}  // namespace

TEST_CASE("property dataset labels every row") {
    auto ds = make_property_dataset(grid_states(12), kNames, "jobs=1", {});
    CHECK(ds.rows.size() == 12);
    for (const auto& [s, label] : ds.rows) CHECK(label == "jobs=1");
    CHECK(ds.label_alphabet == std::vector<std::string>{"jobs=1"});
    CHECK_THROWS_AS(make_property_dataset({}, kNames, "x", {}), DatasetError);
}

TEST_CASE("critical labeling uses the raw Q gap") {
    // q = [w0 * fuel, 0]: gap = |w0 * fuel|
    auto p = testutil::fixed_linear_policy(2, {{25.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0},
                                           {"a", "b"});
    std::vector<StateVector> states = {{5, 0}, {1, 0}, {4, 0}};
    auto ds = label_critical(p, states, kNames, 100.0, {});
    CHECK(ds.rows[0].second == "critical");      // gap 125
    CHECK(ds.rows[1].second == "non-critical");  // gap 25
    CHECK(ds.rows[2].second == "critical");      // gap exactly 100 counts as critical
    CHECK(ds.label_alphabet ==
          std::vector<std::string>{"critical", "non-critical"});
    CHECK_THROWS_AS(label_critical(p, states, kNames, -1.0, {}), DatasetError);
}

TEST_CASE("critical labeling partitions and is monotone in tau") {
    std::mt19937_64 rng(15);
    auto p = oracle::random_mlp(2, 3, {6}, rng);
    auto states = grid_states(40);
    for (double tau1 : {0.0, 0.1, 0.5}) {
        double tau2 = tau1 + 0.3;
        auto d1 = label_critical(p, states, kNames, tau1, {});
        auto d2 = label_critical(p, states, kNames, tau2, {});
        std::size_t c1 = 0, c2 = 0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            c1 += d1.rows[i].second == "critical";
            c2 += d2.rows[i].second == "critical";
            // raising tau never turns non-critical into critical
            if (d1.rows[i].second == "non-critical")
                CHECK(d2.rows[i].second == "non-critical");
        }
        CHECK(c1 >= c2);
        CHECK(c1 + (states.size() - c1) == states.size());
    }
}

TEST_CASE("predicate labeling") {
    auto ds = label_by_predicate(grid_states(10), kNames, "fuel<3", "low", "ok", {});
    for (const auto& [s, label] : ds.rows)
        CHECK(label == (s[0] < 3 ? "low" : "ok"));
    auto tautology = label_by_predicate(grid_states(5), kNames, "fuel>=0", "t", "f", {});
    for (const auto& [s, label] : tautology.rows) CHECK(label == "t");
    CHECK_THROWS_AS(label_by_predicate(grid_states(3), kNames, "nosuch=1", "t", "f", {}),
                    ParseError);
}

TEST_CASE("dataset io round trip with provenance") {
    auto dir = std::filesystem::temp_directory_path() / "coactiv_ds_test";
    std::filesystem::create_directories(dir);
    auto csv = (dir / "d.csv").string();

    DatasetProvenance prov;
    prov.model_digest = "m123";
    prov.policy_digest = "p456";
    prov.property_text = "P=1 [ F x=1 ]";
    prov.selection_mode = "all_reachable";
    prov.created_at = "2026-01-01T00:00:00Z";
    auto ds = make_property_dataset(grid_states(7), kNames, "lbl", prov);
    write_dataset(ds, csv);

    auto back = read_dataset(csv);
    CHECK(back.feature_names == ds.feature_names);
    CHECK(back.rows == ds.rows);
    CHECK(back.label_alphabet == ds.label_alphabet);
    CHECK(back.provenance.model_digest == "m123");
    CHECK(back.provenance.property_text == "P=1 [ F x=1 ]");
    CHECK(dataset_digest(back) == dataset_digest(ds));
}

TEST_CASE("malformed rows report line numbers") {
    auto dir = std::filesystem::temp_directory_path() / "coactiv_ds_test";
    std::filesystem::create_directories(dir);
    auto csv = (dir / "bad.csv").string();
    {
        std::ofstream out(csv);
        out << "a,b,label\n1,2,x\n1,zz,y\n";
    }
    std::remove((csv + ".provenance.json").c_str());
    try {
        read_dataset(csv);
        FAIL("expected malformed integer error");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    {
        std::ofstream out(csv);
        out << "a,b,label\n1,2\n";
    }
    try {
        read_dataset(csv);
        FAIL("expected arity error");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("sidecar mismatches are rejected") {
    auto dir = std::filesystem::temp_directory_path() / "coactiv_ds_test";
    std::filesystem::create_directories(dir);
    auto csv = (dir / "mismatch.csv").string();
    auto ds = make_property_dataset(grid_states(4), kNames, "lbl", {});
    write_dataset(ds, csv);
    // corrupt the sidecar's feature names
    {
        std::ofstream side(csv + ".provenance.json");
        side << R"({"feature_names":["other","names"],"label_alphabet":["lbl"],)"
             << R"("rows":4,"provenance":{}})";
    }
    CHECK_THROWS_AS(read_dataset(csv), DatasetError);
}
