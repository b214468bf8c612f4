#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coactiv/experiments.hpp"
#include "coactiv/model_parser.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(COACTIV_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), int(buf.size()), pipe)) out += buf.data();
    int status = pclose(pipe);
    CliResult r;
    r.output = out;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "coactiv_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("version embeds the build id") {
    auto r = run_cli("--version");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("coactiv") != std::string::npos);
    CHECK(r.output.find("build") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("nonsense-subcommand").exit_code == 2);
    CHECK(run_cli("check --model x.pm").exit_code == 2);  // missing required flags
}

TEST_CASE("parse validates the shipped models") {
    auto dir = work_dir() / "parse";
    auto r = run_cli("parse --model " + testutil::taxi_path() + " --out " + dir.string() +
                     " --canonical");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("model ok") != std::string::npos);
    CHECK(r.output.find("variables=10") != std::string::npos);
    CHECK(fs::exists(dir / "model.canonical.pm"));
    CHECK(fs::exists(dir / "parse.params.txt"));
    // the canonical form re-parses to the same digest
    auto r2 = run_cli("parse --model " + (dir / "model.canonical.pm").string());
    CHECK(r2.exit_code == 0);
    auto digest_of = [](const std::string& s) {
        auto pos = s.find("digest=");
        return s.substr(pos);
    };
    CHECK(digest_of(r.output) == digest_of(r2.output));
}

TEST_CASE("domain errors exit with 1, parse diagnostics with 2") {
    auto dir = work_dir() / "err";
    // nonexistent model file: domain error
    auto r1 = run_cli("parse --model /nonexistent.pm --out " + dir.string());
    CHECK(r1.exit_code == 1);
    CHECK(r1.output.find("error:") != std::string::npos);
    // malformed model: parse diagnostic, exit 2
    auto bad = work_dir() / "bad.pm";
    {
        std::ofstream out(bad);
        out << "module m x [0..1 init 0; endmodule\n";
    }
    auto r2 = run_cli("parse --model " + bad.string() + " --out " + dir.string());
    CHECK(r2.exit_code == 2);
    CHECK(r2.output.find("syntax") != std::string::npos);
}

TEST_CASE("full stage-by-stage round trip on the gate model") {
    using namespace coactiv;
    auto dir = work_dir() / "stages";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto model_path = dir / "gate.pm";
    {
        std::ofstream out(model_path);
        out << "module gate\n"
               "  coin : [0..1] init 0;\n"
               "  pos : [0..3] init 0;\n"
               "  [flip] pos=0 -> 1/2:(pos'=1)&(coin'=0) + 1/2:(pos'=1)&(coin'=1);\n"
               "  [pick0] pos=1 -> 1:(pos'=2+coin);\n"
               "  [pick1] pos=1 -> 1:(pos'=3-coin);\n"
               "endmodule\n"
               "label \"target\" = pos=2;\n"
               "label \"done\" = pos>1;\n";
    }
    auto policy_path = dir / "policy.json";
    save_policy_file(testutil::fixed_linear_policy(
                         2, {{0.0, 0.0}, {-2.0, 0.0}, {2.0, 0.0}}, {0.0, 1.0, -1.0},
                         {"flip", "pick0", "pick1"}),
                     policy_path.string());

    auto build = run_cli("build --model " + model_path.string() + " --policy " +
                         policy_path.string() + " --out " + dir.string());
    CHECK(build.exit_code == 0);
    CHECK(fs::exists(dir / "chain.tra"));

    auto check = run_cli("check --model " + model_path.string() + " --policy " +
                         policy_path.string() + " --prop \"P>=1 [ F pos=2 ]\" --out " +
                         dir.string());
    CHECK(check.exit_code == 0);
    CHECK(check.output.find("satisfied=true") != std::string::npos);
    CHECK(check.output.find("exact=1") != std::string::npos);

    // malformed property: exit 2 with a diagnostic
    auto badprop = run_cli("check --model " + model_path.string() + " --policy " +
                           policy_path.string() + " --prop \"P=1 [ X pos=2 ]\" --out " +
                           dir.string());
    CHECK(badprop.exit_code == 2);

    auto dataset = run_cli("dataset --model " + model_path.string() + " --policy " +
                           policy_path.string() +
                           " --prop \"P=? [ F pos=2 ]\" --label reach --out " +
                           dir.string());
    CHECK(dataset.exit_code == 0);
    CHECK(fs::exists(dir / "dataset.csv"));

    auto coact = run_cli("coactivate --policy " + policy_path.string() + " --dataset " +
                         (dir / "dataset.csv").string() + " --out " + dir.string());
    CHECK(coact.exit_code == 0);
    CHECK(fs::exists(dir / "graph_reach.json"));

    auto analyze = run_cli("analyze --graph " + (dir / "graph_reach.json").string() +
                           " --model " + model_path.string() + " --out " + dir.string());
    CHECK(analyze.exit_code == 0);
    CHECK(fs::exists(dir / "analysis_reach.json"));

    auto prune = run_cli("prune-verify --model " + model_path.string() + " --policy " +
                         policy_path.string() +
                         " --prop \"P=? [ F pos=2 ]\" --features 0 --out " +
                         dir.string());
    CHECK(prune.exit_code == 0);
    CHECK(prune.output.find("baseline=1 ") != std::string::npos);
    CHECK(prune.output.find("pruned=0.5") != std::string::npos);
}

TEST_CASE("run twice produces identical manifests") {
    using namespace coactiv;
    auto dir = work_dir() / "run";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto model_path = dir / "line.pm";
    {
        std::ofstream out(model_path);
        out << pretty_print(testutil::line_model());
    }
    MlpPolicy p = testutil::fixed_linear_policy(1, {{1.0}}, {0.0}, {"step"});
    auto policy_path = dir / "policy.json";
    save_policy_file(p, policy_path.string());
    auto cfg_path = dir / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << "model = " << model_path.string() << "\n"
            << "policy = " << policy_path.string() << "\n"
            << "property.1 = P=? [ F x=1 ]\n"
            << "property.1.label = one\n"
            << "property.2 = P=? [ F x=2 ]\n"
            << "property.2.label = two\n";
    }
    auto r1 = run_cli("run --config " + cfg_path.string() + " --seed 7 --out " +
                      (dir / "o1").string());
    CHECK(r1.exit_code == 0);
    auto r2 = run_cli("run --config " + cfg_path.string() + " --seed 7 --out " +
                      (dir / "o2").string());
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "o1" / "manifest.json") == slurp(dir / "o2" / "manifest.json"));
}
