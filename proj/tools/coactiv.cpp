// Command-line frontend: one subcommand per pipeline stage plus `run` for
// the full orchestration. Exit codes: 0 success, 1 domain error (with a
// machine-readable record on stderr), 2 usage error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coactiv/dqn.hpp"
#include "coactiv/errors.hpp"
#include "coactiv/experiments.hpp"
#include "coactiv/model_parser.hpp"
#include "coactiv/version.hpp"

namespace fs = std::filesystem;
using namespace coactiv;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path().empty()
                               ? "."
                               : fs::path(path).parent_path().string());
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

// every run records its resolved parameters next to its artifacts
void write_invocation(const std::string& out_dir, const std::string& subcommand,
                      const std::vector<std::pair<std::string, std::string>>& params) {
    fs::create_directories(out_dir);
    std::ostringstream rec;
    rec << "subcommand = " << subcommand << "\n";
    for (const auto& [k, v] : params) rec << k << " = " << v << "\n";
    write_text((fs::path(out_dir) / (subcommand + ".params.txt")).string(), rec.str());
}

std::vector<int> parse_feature_list(const std::string& spec) {
    std::vector<int> out;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw Error("malformed feature index '" + tok + "'");
        }
    }
    return out;
}

TrainConfig train_config_from(const KvConfig& cfg) {
    TrainConfig tc;
    if (auto h = cfg.get("hidden")) {
        tc.hidden.clear();
        std::istringstream ss(*h);
        std::string tok;
        while (std::getline(ss, tok, ',')) tc.hidden.push_back(std::stoi(tok));
    }
    tc.batch_size = int(cfg.get_int("batch_size", tc.batch_size));
    tc.replay_capacity = int(cfg.get_int("replay_capacity", tc.replay_capacity));
    tc.epsilon_start = cfg.get_double("epsilon_start", tc.epsilon_start);
    tc.epsilon_min = cfg.get_double("epsilon_min", tc.epsilon_min);
    tc.epsilon_decay = cfg.get_double("epsilon_decay", tc.epsilon_decay);
    tc.discount = cfg.get_double("discount", tc.discount);
    tc.target_update_interval =
        int(cfg.get_int("target_update_interval", tc.target_update_interval));
    tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
    tc.max_epochs = int(cfg.get_int("max_epochs", tc.max_epochs));
    tc.eval_episodes = int(cfg.get_int("eval_episodes", tc.eval_episodes));
    tc.max_episode_steps = int(cfg.get_int("max_episode_steps", tc.max_episode_steps));
    tc.seed = std::uint64_t(cfg.get_int("seed", 0));
    return tc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-activation graph analysis of model-checked RL policies"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string version_line = std::string("coactiv ") + std::string(kVersion) +
                               " (build " + std::string(kBuildId) + ")";
    app.set_version_flag("--version", version_line);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for all randomness (default 0)");

    // --- parse ---
    auto* cmd_parse = app.add_subcommand("parse", "parse and validate a model file");
    std::string p_model, p_out = ".";
    bool p_canonical = false;
    cmd_parse->add_option("--model", p_model, "model file")->required();
    cmd_parse->add_option("--out", p_out, "output directory")->envname("COACTIV_OUT");
    cmd_parse->add_flag("--canonical", p_canonical, "write the canonical form");

    // --- train ---
    auto* cmd_train = app.add_subcommand("train", "train a DQN policy on a model");
    std::string t_model, t_config, t_out = ".";
    std::string t_stop_prop;
    double t_stop_threshold = 0.99;
    int t_stop_interval = 0;
    cmd_train->add_option("--model", t_model, "model file")->required();
    cmd_train->add_option("--config", t_config, "training config (key = value)")->required();
    cmd_train->add_option("--out", t_out, "output directory")->envname("COACTIV_OUT");
    cmd_train->add_option("--stop-property", t_stop_prop,
                          "stop once this reachability query meets --stop-threshold");
    cmd_train->add_option("--stop-threshold", t_stop_threshold, "default 0.99");
    cmd_train->add_option("--stop-interval", t_stop_interval,
                          "episodes between stop checks (0 disables)");

    // --- build ---
    auto* cmd_build = app.add_subcommand("build", "build the induced Markov chain");
    std::string b_model, b_policy, b_out = ".";
    std::size_t b_max_states = 1000000;
    cmd_build->add_option("--model", b_model, "model file")->required();
    cmd_build->add_option("--policy", b_policy, "policy file")->required();
    cmd_build->add_option("--out", b_out, "output directory")->envname("COACTIV_OUT");
    cmd_build->add_option("--max-states", b_max_states, "state limit");

    // --- check ---
    auto* cmd_check = app.add_subcommand("check", "verify a reachability property");
    std::string c_model, c_policy, c_prop, c_mode = "auto", c_out = ".";
    double c_epsilon = 1e-9;
    cmd_check->add_option("--model", c_model, "model file")->required();
    cmd_check->add_option("--policy", c_policy, "policy file")->required();
    cmd_check->add_option("--prop", c_prop, "property, e.g. \"P=1 [ F jobs_done=2 ]\"")
        ->required();
    cmd_check->add_option("--mode", c_mode, "exact | iterative | auto");
    cmd_check->add_option("--epsilon", c_epsilon, "iterative solver tolerance");
    cmd_check->add_option("--out", c_out, "output directory")->envname("COACTIV_OUT");

    // --- dataset ---
    auto* cmd_dataset = app.add_subcommand("dataset", "extract a labeled state dataset");
    std::string d_model, d_policy, d_prop, d_selection = "all_reachable", d_out = ".";
    std::string d_label, d_predicate, d_true = "true", d_false = "false";
    double d_critical = -1.0;
    cmd_dataset->add_option("--model", d_model, "model file")->required();
    cmd_dataset->add_option("--policy", d_policy, "policy file")->required();
    cmd_dataset->add_option("--prop", d_prop, "property")->required();
    cmd_dataset->add_option("--selection", d_selection,
                            "all_reachable | positive_prob | target_only");
    cmd_dataset->add_option("--label", d_label, "property label (Option 1)");
    cmd_dataset->add_option("--critical", d_critical,
                            "critical/non-critical threshold (Option 2)");
    cmd_dataset->add_option("--predicate", d_predicate, "predicate labeler (Option 2)");
    cmd_dataset->add_option("--true-label", d_true, "label when predicate holds");
    cmd_dataset->add_option("--false-label", d_false, "label when predicate fails");
    cmd_dataset->add_option("--out", d_out, "output directory")->envname("COACTIV_OUT");

    // --- coactivate ---
    auto* cmd_coact = app.add_subcommand("coactivate", "build per-label co-activation graphs");
    std::string g_policy, g_dataset, g_scope = "all_pairs", g_out = ".";
    double g_min_abs = 0.0;
    cmd_coact->add_option("--policy", g_policy, "policy file")->required();
    cmd_coact->add_option("--dataset", g_dataset, "dataset CSV")->required();
    cmd_coact->add_option("--min-abs-weight", g_min_abs, "edge threshold");
    cmd_coact->add_option("--layer-scope", g_scope, "all_pairs | adjacent_layers");
    cmd_coact->add_option("--out", g_out, "output directory")->envname("COACTIV_OUT");

    // --- analyze ---
    auto* cmd_analyze = app.add_subcommand("analyze", "pagerank + communities for a graph");
    std::string a_graph, a_model, a_out = ".";
    double a_damping = 0.85, a_eps = 1e-8;
    std::size_t a_max_iter = 10000, a_top_k = 50;
    cmd_analyze->add_option("--graph", a_graph, "graph JSON from coactivate")->required();
    cmd_analyze->add_option("--model", a_model, "model file (for feature names)");
    cmd_analyze->add_option("--damping", a_damping, "PageRank damping");
    cmd_analyze->add_option("--epsilon", a_eps, "PageRank convergence epsilon");
    cmd_analyze->add_option("--max-iter", a_max_iter, "PageRank iteration cap");
    cmd_analyze->add_option("--top-k", a_top_k, "ranked neurons to report");
    cmd_analyze->add_option("--out", a_out, "output directory")->envname("COACTIV_OUT");

    // --- compare ---
    auto* cmd_compare = app.add_subcommand("compare", "per-label comparison across datasets");
    std::string m_model, m_policy, m_out = ".";
    std::vector<std::string> m_datasets;
    double m_damping = 0.85, m_eps = 1e-8, m_min_abs = 0.0;
    std::size_t m_top_k = 50;
    cmd_compare->add_option("--model", m_model, "model file")->required();
    cmd_compare->add_option("--policy", m_policy, "policy file")->required();
    cmd_compare->add_option("--dataset", m_datasets, "dataset CSV (repeatable)")
        ->required()
        ->expected(-1);
    cmd_compare->add_option("--damping", m_damping, "PageRank damping");
    cmd_compare->add_option("--epsilon", m_eps, "PageRank epsilon");
    cmd_compare->add_option("--min-abs-weight", m_min_abs, "edge threshold");
    cmd_compare->add_option("--top-k", m_top_k, "ranked neurons to report");
    cmd_compare->add_option("--out", m_out, "output directory")->envname("COACTIV_OUT");

    // --- prune-verify ---
    auto* cmd_prune = app.add_subcommand("prune-verify",
                                         "re-verify after pruning input features");
    std::string pv_model, pv_policy, pv_prop, pv_features, pv_mode = "auto", pv_out = ".";
    cmd_prune->add_option("--model", pv_model, "model file")->required();
    cmd_prune->add_option("--policy", pv_policy, "policy file")->required();
    cmd_prune->add_option("--prop", pv_prop, "property")->required();
    cmd_prune->add_option("--features", pv_features, "comma-separated input indices")
        ->required();
    cmd_prune->add_option("--mode", pv_mode, "exact | iterative | auto");
    cmd_prune->add_option("--out", pv_out, "output directory")->envname("COACTIV_OUT");

    // --- run ---
    auto* cmd_run = app.add_subcommand("run", "full pipeline from a config file");
    std::string r_config, r_out;
    cmd_run->add_option("--config", r_config, "pipeline config file")->required();
    cmd_run->add_option("--out", r_out, "output directory (overrides config)")
        ->envname("COACTIV_OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_parse) {
            write_invocation(p_out, "parse",
                             {{"model", p_model},
                              {"canonical", p_canonical ? "true" : "false"},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(p_model);
            if (p_canonical)
                write_text((fs::path(p_out) / "model.canonical.pm").string(),
                           pretty_print(m));
            std::cout << "model ok variables=" << m.variables.size()
                      << " commands=" << m.commands.size()
                      << " actions=" << m.action_names.size()
                      << " labels=" << m.labels.size() << " rewards=" << m.rewards.size()
                      << " digest=" << model_digest(m) << "\n";
        } else if (*cmd_train) {
            write_invocation(t_out, "train",
                             {{"model", t_model},
                              {"config", t_config},
                              {"stop_property", t_stop_prop},
                              {"stop_threshold", fmt(t_stop_threshold)},
                              {"stop_interval", std::to_string(t_stop_interval)},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(t_model);
            auto cfg = KvConfig::parse_file(t_config);
            TrainConfig tc = train_config_from(cfg);
            if (seed != 0 || !cfg.has("seed")) tc.seed = seed;

            StopHook hook;
            ReachabilityProperty stop_prop;
            if (!t_stop_prop.empty() && t_stop_interval > 0) {
                stop_prop = parse_property(t_stop_prop);
                hook.interval = t_stop_interval;
                hook.callback = [&](const MlpPolicy& pol, int) {
                    auto chain = build_induced_dtmc(m, pol);
                    auto res = check_reachability(chain, stop_prop);
                    return res.initial_value >= t_stop_threshold;
                };
            }
            auto result = train(m, tc, hook);
            save_policy_file(result.policy, (fs::path(t_out) / "policy.json").string());
            write_text((fs::path(t_out) / "train_log.txt").string(),
                       result.log.to_text());
            auto ev = evaluate(result.policy, m, tc.eval_episodes, tc.seed,
                               tc.max_episode_steps);
            std::cout << "trained episodes=" << result.log.episodes.size()
                      << " steps=" << result.log.total_steps
                      << " stop=" << result.log.stop_reason
                      << " eval_mean_return=" << fmt(ev.mean_return)
                      << " digest=" << policy_digest(result.policy) << "\n";
        } else if (*cmd_build) {
            write_invocation(b_out, "build",
                             {{"model", b_model},
                              {"policy", b_policy},
                              {"max_states", std::to_string(b_max_states)},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(b_model);
            auto p = load_policy_file(b_policy);
            auto d = build_induced_dtmc(m, p, b_max_states);
            auto e = export_dtmc(d);
            write_text((fs::path(b_out) / "chain.tra").string(), e.transitions);
            write_text((fs::path(b_out) / "chain.lab").string(), e.labels);
            write_text((fs::path(b_out) / "chain.sta").string(), e.states);
            auto dig = dtmc_digest(d);
            std::cout << "chain states=" << d.size() << " fallbacks=" << d.fallback_count
                      << " deadends=" << d.deadend_count << " digest=" << dig.combined
                      << "\n";
        } else if (*cmd_check) {
            write_invocation(c_out, "check",
                             {{"model", c_model},
                              {"policy", c_policy},
                              {"prop", c_prop},
                              {"mode", c_mode},
                              {"epsilon", fmt(c_epsilon)},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(c_model);
            auto p = load_policy_file(c_policy);
            auto prop = parse_property(c_prop);
            CheckMode mode = c_mode == "exact" ? CheckMode::Exact
                             : c_mode == "iterative" ? CheckMode::Iterative
                                                     : CheckMode::Auto;
            auto d = build_induced_dtmc(m, p);
            auto res = check_reachability(d, prop, mode, c_epsilon);
            write_text((fs::path(c_out) / "check_values.txt").string(),
                       export_state_values(res));
            ordered_json summary;
            summary["property"] = c_prop;
            summary["canonical"] = property_to_string(prop);
            summary["mode"] = res.exact ? "exact" : "iterative";
            summary["initial_value"] = res.initial_value;
            if (res.exact)
                summary["initial_value_exact"] = rational_to_string(res.exact_initial);
            if (res.satisfied) summary["satisfied"] = *res.satisfied;
            else summary["satisfied"] = nullptr;
            summary["model_digest"] = model_digest(m);
            summary["policy_digest"] = policy_digest(p);
            summary["chain_digest"] = dtmc_digest(d).combined;
            write_text((fs::path(c_out) / "check_summary.json").string(),
                       summary.dump(2) + "\n");
            std::cout << "check value=" << fmt(res.initial_value);
            if (res.exact)
                std::cout << " exact=" << rational_to_string(res.exact_initial);
            if (res.satisfied)
                std::cout << " satisfied=" << (*res.satisfied ? "true" : "false");
            std::cout << " states=" << d.size() << "\n";
        } else if (*cmd_dataset) {
            write_invocation(d_out, "dataset",
                             {{"model", d_model},
                              {"policy", d_policy},
                              {"prop", d_prop},
                              {"selection", d_selection},
                              {"label", d_label},
                              {"critical", fmt(d_critical)},
                              {"predicate", d_predicate},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(d_model);
            auto p = load_policy_file(d_policy);
            auto prop = parse_property(d_prop);
            auto d = build_induced_dtmc(m, p);
            auto res = check_reachability(d, prop);
            auto idxs = relevant_states(d, res, selection_from_string(d_selection));
            std::vector<StateVector> states;
            for (auto i : idxs) states.push_back(d.states[i]);

            DatasetProvenance prov;
            prov.model_digest = model_digest(m);
            prov.policy_digest = policy_digest(p);
            prov.property_text = d_prop;
            prov.selection_mode = d_selection;
            prov.created_at = iso_utc_timestamp();

            LabeledDataset ds;
            if (d_critical >= 0.0) {
                ds = label_critical(p, states, d.feature_names, d_critical, prov);
            } else if (!d_predicate.empty()) {
                ds = label_by_predicate(states, d.feature_names, d_predicate, d_true,
                                        d_false, prov);
            } else {
                std::string label = d_label.empty() ? d_prop : d_label;
                prov.labeler = "property";
                ds = make_property_dataset(states, d.feature_names, label, prov);
            }
            write_dataset(ds, (fs::path(d_out) / "dataset.csv").string());
            std::cout << "dataset rows=" << ds.rows.size()
                      << " labels=" << ds.label_alphabet.size()
                      << " digest=" << dataset_digest(ds) << "\n";
        } else if (*cmd_coact) {
            write_invocation(g_out, "coactivate",
                             {{"policy", g_policy},
                              {"dataset", g_dataset},
                              {"min_abs_weight", fmt(g_min_abs)},
                              {"layer_scope", g_scope},
                              {"seed", std::to_string(seed)}});
            auto p = load_policy_file(g_policy);
            auto ds = read_dataset(g_dataset);
            GraphOptions opt;
            opt.min_abs_weight = g_min_abs;
            opt.layer_scope = g_scope == "adjacent_layers" ? LayerScope::AdjacentLayers
                                                           : LayerScope::AllPairs;
            for (const auto& label : ds.label_alphabet) {
                std::vector<StateVector> states;
                for (const auto& [s, l] : ds.rows)
                    if (l == label) states.push_back(s);
                if (states.empty()) continue;
                auto matrix = collect_activations(p, states);
                auto g = build_graph(matrix, opt, label);
                std::string base =
                    (fs::path(g_out) / ("graph_" + sanitize_filename(label))).string();
                write_text(base + ".graphml", graph_to_graphml(g));
                write_text(base + ".dot", graph_to_dot(g));
                write_text(base + ".csv", graph_to_adjacency_csv(g));
                write_text(base + ".json", graph_to_json(g));
                std::cout << "graph label=" << label << " nodes=" << g.node_count()
                          << " edges=" << g.edges.size() << "\n";
            }
        } else if (*cmd_analyze) {
            write_invocation(a_out, "analyze",
                             {{"graph", a_graph},
                              {"model", a_model},
                              {"damping", fmt(a_damping)},
                              {"epsilon", fmt(a_eps)},
                              {"top_k", std::to_string(a_top_k)},
                              {"seed", std::to_string(seed)}});
            std::ifstream in(a_graph);
            if (!in) throw Error("cannot open graph file '" + a_graph + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            auto g = graph_from_json(ss.str());
            std::vector<std::string> names;
            if (!a_model.empty()) names = parse_model_file(a_model).variable_names();
            AnalysisParams params;
            params.pagerank.damping = a_damping;
            params.pagerank.epsilon = a_eps;
            params.pagerank.max_iterations = a_max_iter;
            params.top_k = a_top_k;
            LabelAnalysis a;
            a.label = g.dataset_label;
            a.graph = g;
            a.pagerank = pagerank(g, params.pagerank);
            a.partition = louvain(g);
            a.top_neurons = top_k(a.pagerank, a_top_k);
            a.feature_rank = feature_ranking(a.pagerank, names);
            write_text((fs::path(a_out) /
                        ("analysis_" + sanitize_filename(a.label) + ".json"))
                           .string(),
                       label_analysis_to_json(a, params).dump(2) + "\n");
            std::cout << "analysis label=" << a.label
                      << " modularity=" << fmt(a.partition.modularity_q)
                      << " iterations=" << a.pagerank.iterations << "\n";
        } else if (*cmd_compare) {
            write_invocation(m_out, "compare",
                             {{"model", m_model},
                              {"policy", m_policy},
                              {"datasets", std::to_string(m_datasets.size())},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(m_model);
            auto p = load_policy_file(m_policy);
            std::vector<LabeledDataset> dss;
            for (const auto& path : m_datasets) dss.push_back(read_dataset(path));
            AnalysisParams params;
            params.pagerank.damping = m_damping;
            params.pagerank.epsilon = m_eps;
            params.graph.min_abs_weight = m_min_abs;
            params.top_k = m_top_k;
            auto rep = compare_labels(m, p, dss, params);
            write_text((fs::path(m_out) / "comparison.json").string(),
                       comparison_to_json(rep, params).dump(2) + "\n");
            for (const auto& o : rep.overlaps)
                std::cout << "overlap " << o.label_a << " vs " << o.label_b << " = "
                          << fmt(o.overlap.agreement) << "\n";
            for (const auto& g : rep.groups)
                std::cout << "group label=" << g.label << " samples=" << g.sample_count
                          << " modularity=" << fmt(g.partition.modularity_q) << "\n";
        } else if (*cmd_prune) {
            write_invocation(pv_out, "prune-verify",
                             {{"model", pv_model},
                              {"policy", pv_policy},
                              {"prop", pv_prop},
                              {"features", pv_features},
                              {"mode", pv_mode},
                              {"seed", std::to_string(seed)}});
            auto m = parse_model_file(pv_model);
            auto p = load_policy_file(pv_policy);
            auto prop = parse_property(pv_prop);
            CheckMode mode = pv_mode == "exact" ? CheckMode::Exact
                             : pv_mode == "iterative" ? CheckMode::Iterative
                                                      : CheckMode::Auto;
            auto rep = prune_and_check(m, p, prop, parse_feature_list(pv_features), mode);
            write_text((fs::path(pv_out) / "prune_report.json").string(),
                       prune_report_to_json(rep).dump(2) + "\n");
            std::cout << "prune baseline=" << fmt(rep.baseline_prob)
                      << " pruned=" << fmt(rep.pruned_prob) << " delta=" << fmt(rep.delta)
                      << "\n";
        } else if (*cmd_run) {
            auto cfg = KvConfig::parse_file(r_config);
            std::string out_dir = !r_out.empty() ? r_out : cfg.get_or("out", "out");
            std::uint64_t run_seed = seed != 0 ? seed : std::uint64_t(cfg.get_int("seed", 0));
            auto result = run_pipeline(cfg, run_seed, out_dir);
            for (const auto& g : result.comparison.groups)
                std::cout << "group label=" << g.label << " samples=" << g.sample_count
                          << " modularity=" << fmt(g.partition.modularity_q) << "\n";
            for (const auto& o : result.comparison.overlaps)
                std::cout << "overlap " << o.label_a << " vs " << o.label_b << " = "
                          << fmt(o.overlap.agreement) << "\n";
            if (result.prune_report)
                std::cout << "prune baseline=" << fmt(result.prune_report->baseline_prob)
                          << " pruned=" << fmt(result.prune_report->pruned_prob)
                          << " delta=" << fmt(result.prune_report->delta) << "\n";
            std::cout << "manifest " << (fs::path(out_dir) / "manifest.json").string()
                      << " files=" << result.files_written.size() << "\n";
        }
    } catch (const ParseError& e) {
        // malformed user input (model/property/predicate) is a usage error
        ordered_json err{{"class", diag_class_name(e.diag_class())},
                         {"line", e.line()},
                         {"col", e.col()},
                         {"message", e.detail()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 2;
    } catch (const PipelineError& e) {
        ordered_json err{{"class", "pipeline"}, {"stage", e.stage()}, {"message", e.what()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 1;
    } catch (const Error& e) {
        ordered_json err{{"class", "domain"}, {"message", e.what()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        ordered_json err{{"class", "internal"}, {"message", e.what()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 1;
    }
    return 0;
}
