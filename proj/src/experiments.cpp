#include "coactiv/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "coactiv/digest.hpp"
#include "coactiv/errors.hpp"
#include "coactiv/model_parser.hpp"
#include "coactiv/version.hpp"

namespace coactiv {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string iso_utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
                   ? c
                   : '_';
    return out.empty() ? "_" : out;
}

ComparisonReport compare_labels(const FactoredMdp& m, const MlpPolicy& p,
                                const std::vector<LabeledDataset>& datasets,
                                const AnalysisParams& params) {
    if (datasets.empty()) throw DatasetError("compare_labels needs at least one dataset");
    auto names = m.variable_names();
    for (const auto& ds : datasets)
        if (ds.feature_names != names)
            throw DatasetError("dataset feature names do not match the model variables");

    // group rows by label, label order by first appearance
    std::vector<std::string> label_order;
    std::map<std::string, std::vector<StateVector>> groups;
    for (const auto& ds : datasets) {
        for (const auto& [s, label] : ds.rows) {
            if (!groups.count(label)) label_order.push_back(label);
            groups[label].push_back(s);
        }
    }
    if (label_order.size() < 2)
        throw DatasetError("per-label comparison needs at least two label groups, got " +
                           std::to_string(label_order.size()));

    ComparisonReport rep;
    for (const auto& label : label_order) {
        const auto& states = groups[label];
        if (states.size() < 3)
            throw DatasetError("label group '" + label + "' has " +
                               std::to_string(states.size()) +
                               " states, below the 3-sample correlation floor");
        LabelAnalysis a;
        a.label = label;
        a.sample_count = states.size();
        auto matrix = collect_activations(p, states);
        a.warnings = matrix.warnings;
        a.graph = build_graph(matrix, params.graph, label);
        a.pagerank = pagerank(a.graph, params.pagerank);
        a.partition = louvain(a.graph, params.louvain_seed);
        a.top_neurons = top_k(a.pagerank, params.top_k);
        a.feature_rank = feature_ranking(a.pagerank, names);
        rep.groups.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < rep.groups.size(); ++i)
        for (std::size_t j = i + 1; j < rep.groups.size(); ++j)
            rep.overlaps.push_back({rep.groups[i].label, rep.groups[j].label,
                                    community_overlap(rep.groups[i].partition,
                                                      rep.groups[j].partition)});

    // state-set relations between whole datasets
    auto key_of = [](const StateVector& s) { return s; };
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        for (std::size_t j = i + 1; j < datasets.size(); ++j) {
            std::set<StateVector> sa, sb;
            for (const auto& [s, l] : datasets[i].rows) sa.insert(key_of(s));
            for (const auto& [s, l] : datasets[j].rows) sb.insert(key_of(s));
            DatasetRelation rel;
            rel.a = i;
            rel.b = j;
            rel.size_a = sa.size();
            rel.size_b = sb.size();
            for (const auto& s : sa)
                if (sb.count(s)) ++rel.common;
            if (rel.common == rel.size_a && rel.common == rel.size_b)
                rel.relation = "equal";
            else if (rel.common == rel.size_b)
                rel.relation = "a_strict_superset";
            else if (rel.common == rel.size_a)
                rel.relation = "b_strict_superset";
            else if (rel.common == 0)
                rel.relation = "disjoint";
            else
                rel.relation = "overlapping";
            rep.dataset_relations.push_back(rel);
        }
    }
    return rep;
}

PruneVerifyReport prune_and_check(const FactoredMdp& m, const MlpPolicy& p,
                                  const ReachabilityProperty& prop,
                                  const std::vector<int>& features, CheckMode mode) {
    PruneVerifyReport rep;
    rep.property = property_to_string(prop);
    rep.pruned_features = features;
    std::sort(rep.pruned_features.begin(), rep.pruned_features.end());
    rep.pruned_features.erase(
        std::unique(rep.pruned_features.begin(), rep.pruned_features.end()),
        rep.pruned_features.end());
    auto names = m.variable_names();
    for (int f : rep.pruned_features)
        rep.pruned_feature_names.push_back(
            f >= 0 && std::size_t(f) < names.size() ? names[std::size_t(f)]
                                                    : "f" + std::to_string(f + 1));

    auto baseline_chain = build_induced_dtmc(m, p);
    auto baseline = check_reachability(baseline_chain, prop, mode);

    MlpPolicy pruned = prune_input_features(p, rep.pruned_features);
    auto pruned_chain = build_induced_dtmc(m, pruned);  // full rebuild
    auto after = check_reachability(pruned_chain, prop, mode);

    rep.exact = baseline.exact && after.exact;
    rep.baseline_prob = baseline.initial_value;
    rep.pruned_prob = after.initial_value;
    rep.delta = rep.pruned_prob - rep.baseline_prob;
    if (baseline.exact) rep.baseline_exact = rational_to_string(baseline.exact_initial);
    if (after.exact) rep.pruned_exact = rational_to_string(after.exact_initial);
    rep.satisfied_before = baseline.satisfied;
    rep.satisfied_after = after.satisfied;
    rep.baseline_chain = dtmc_digest(baseline_chain);
    rep.pruned_chain = dtmc_digest(pruned_chain);
    rep.baseline_policy_digest = policy_digest(p);
    rep.pruned_policy_digest = policy_digest(pruned);
    rep.baseline_states = baseline_chain.size();
    rep.pruned_states = pruned_chain.size();
    return rep;
}

// --- JSON serialization ----------------------------------------------------

namespace {

ordered_json neuron_json(const NeuronId& n) {
    return ordered_json{{"layer", n.layer}, {"index", n.index}};
}

ordered_json overlap_json(const OverlapReport& o) {
    ordered_json j;
    j["method"] = o.method;
    j["shared_nodes"] = o.shared_nodes;
    j["agreement"] = o.agreement;
    auto pairs = ordered_json::array();
    for (const auto& [a, b] : o.matched_pairs) pairs.push_back({a, b});
    j["matched_pairs"] = std::move(pairs);
    return j;
}

}  // namespace

ordered_json label_analysis_to_json(const LabelAnalysis& a, const AnalysisParams& params) {
    ordered_json j;
    j["label"] = a.label;
    j["samples"] = a.sample_count;
    j["nodes"] = a.graph.node_count();
    j["edges"] = a.graph.edges.size();
    std::size_t zv = 0;
    for (auto f : a.graph.zero_variance) zv += f;
    j["zero_variance_nodes"] = zv;
    j["pagerank"] = {{"damping", a.pagerank.damping},
                     {"epsilon", a.pagerank.epsilon},
                     {"iterations", a.pagerank.iterations},
                     {"converged", a.pagerank.converged}};
    auto top = ordered_json::array();
    for (const auto& [n, score] : a.top_neurons) {
        auto nj = neuron_json(n);
        nj["score"] = score;
        top.push_back(std::move(nj));
    }
    j["top_neurons"] = std::move(top);
    auto feats = ordered_json::array();
    for (const auto& [name, score] : a.feature_rank)
        feats.push_back({{"feature", name}, {"score", score}});
    j["feature_ranking"] = std::move(feats);
    j["modularity"] = a.partition.modularity_q;
    j["phase_modularity"] = a.partition.phase_q;
    std::map<int, std::size_t> comm_sizes;
    for (int c : a.partition.community) comm_sizes[c] += 1;
    j["communities"] = comm_sizes.size();
    j["louvain_seed"] =
        params.louvain_seed ? ordered_json(*params.louvain_seed) : ordered_json(nullptr);
    j["warnings"] = a.warnings;
    return j;
}

ordered_json comparison_to_json(const ComparisonReport& rep, const AnalysisParams& params) {
    ordered_json j;
    j["parameters"] = {{"damping", params.pagerank.damping},
                       {"epsilon", params.pagerank.epsilon},
                       {"max_iterations", params.pagerank.max_iterations},
                       {"top_k", params.top_k},
                       {"min_abs_weight", params.graph.min_abs_weight},
                       {"layer_scope", params.graph.layer_scope == LayerScope::AllPairs
                                           ? "all_pairs"
                                           : "adjacent_layers"}};
    auto groups = ordered_json::array();
    for (const auto& g : rep.groups) groups.push_back(label_analysis_to_json(g, params));
    j["groups"] = std::move(groups);
    auto overlaps = ordered_json::array();
    for (const auto& o : rep.overlaps) {
        ordered_json oj;
        oj["label_a"] = o.label_a;
        oj["label_b"] = o.label_b;
        oj["overlap"] = overlap_json(o.overlap);
        overlaps.push_back(std::move(oj));
    }
    j["overlaps"] = std::move(overlaps);
    auto rels = ordered_json::array();
    for (const auto& r : rep.dataset_relations)
        rels.push_back({{"dataset_a", r.a},
                        {"dataset_b", r.b},
                        {"size_a", r.size_a},
                        {"size_b", r.size_b},
                        {"common", r.common},
                        {"relation", r.relation}});
    j["dataset_relations"] = std::move(rels);
    return j;
}

ordered_json prune_report_to_json(const PruneVerifyReport& rep) {
    ordered_json j;
    j["property"] = rep.property;
    j["pruned_features"] = rep.pruned_features;
    j["pruned_feature_names"] = rep.pruned_feature_names;
    j["mode"] = rep.exact ? "exact" : "iterative";
    j["baseline"] = {{"value", rep.baseline_prob},
                     {"value_exact", rep.baseline_exact},
                     {"states", rep.baseline_states},
                     {"chain_digest", rep.baseline_chain.combined},
                     {"policy_digest", rep.baseline_policy_digest}};
    j["pruned"] = {{"value", rep.pruned_prob},
                   {"value_exact", rep.pruned_exact},
                   {"states", rep.pruned_states},
                   {"chain_digest", rep.pruned_chain.combined},
                   {"policy_digest", rep.pruned_policy_digest}};
    j["delta"] = rep.delta;
    if (rep.satisfied_before) j["satisfied_before"] = *rep.satisfied_before;
    else j["satisfied_before"] = nullptr;
    if (rep.satisfied_after) j["satisfied_after"] = *rep.satisfied_after;
    else j["satisfied_after"] = nullptr;
    return j;
}

// --- Pipeline ---------------------------------------------------------------

namespace {

struct PropertySpec {
    std::string text;
    ReachabilityProperty prop;
    std::string label;
    Selection selection = Selection::AllReachable;
};

AnalysisParams analysis_params_from(const KvConfig& cfg) {
    AnalysisParams p;
    p.pagerank.damping = cfg.get_double("analysis.damping", 0.85);
    p.pagerank.epsilon = cfg.get_double("analysis.epsilon", 1e-8);
    p.pagerank.max_iterations = std::size_t(cfg.get_int("analysis.max_iter", 10000));
    p.top_k = std::size_t(cfg.get_int("analysis.top_k", 50));
    p.graph.min_abs_weight = cfg.get_double("analysis.min_abs_weight", 0.0);
    std::string scope = cfg.get_or("analysis.layer_scope", "all_pairs");
    if (scope == "all_pairs") p.graph.layer_scope = LayerScope::AllPairs;
    else if (scope == "adjacent_layers") p.graph.layer_scope = LayerScope::AdjacentLayers;
    else throw Error("unknown analysis.layer_scope '" + scope + "'");
    if (cfg.has("analysis.louvain_seed"))
        p.louvain_seed = std::uint64_t(cfg.get_int("analysis.louvain_seed", 0));
    return p;
}

CheckMode check_mode_from(const std::string& s, double& epsilon) {
    if (s == "exact") return CheckMode::Exact;
    if (s == "auto") return CheckMode::Auto;
    if (s.rfind("iterative", 0) == 0) {
        if (s.size() > 10 && s[9] == ':') epsilon = std::stod(s.substr(10));
        return CheckMode::Iterative;
    }
    throw Error("unknown check_mode '" + s + "'");
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    written.push_back(path);
}

}  // namespace

PipelineResult run_pipeline(const KvConfig& cfg, std::uint64_t seed,
                            const std::string& out_dir) {
    PipelineResult result;
    result.out_dir = out_dir;
    fs::create_directories(out_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(out_dir) / name).string();
    };

    // resolved invocation record, written verbatim
    {
        std::ostringstream rec;
        rec << "# resolved pipeline parameters\n" << cfg.to_text() << "seed = " << seed
            << "\nout = " << out_dir << "\n";
        write_file(out_path("params.resolved.txt"), rec.str(), result.files_written);
    }

    FactoredMdp model;
    try {
        model = parse_model_file(cfg.required("model"));
    } catch (const Error& e) {
        throw PipelineError("load_model", e.what());
    }
    MlpPolicy policy;
    try {
        policy = load_policy_file(cfg.required("policy"));
    } catch (const Error& e) {
        throw PipelineError("load_policy", e.what());
    }

    std::vector<PropertySpec> props;
    for (int i = 1;; ++i) {
        auto key = "property." + std::to_string(i);
        auto text = cfg.get(key);
        if (!text) break;
        PropertySpec ps;
        ps.text = *text;
        try {
            ps.prop = parse_property(*text);
        } catch (const Error& e) {
            throw PipelineError("parse_property", e.what());
        }
        ps.label = cfg.get_or(key + ".label", *text);
        ps.selection =
            selection_from_string(cfg.get_or(key + ".selection", "all_reachable"));
        props.push_back(std::move(ps));
    }
    if (props.empty()) throw PipelineError("parse_property", "no property.<i> keys given");

    double check_eps = 1e-9;
    CheckMode mode = check_mode_from(cfg.get_or("check_mode", "auto"), check_eps);
    AnalysisParams params = analysis_params_from(cfg);

    InducedDtmc chain;
    try {
        chain = build_induced_dtmc(model, policy);
    } catch (const Error& e) {
        throw PipelineError("build_chain", e.what());
    }
    auto chain_export = export_dtmc(chain);
    write_file(out_path("chain.tra"), chain_export.transitions, result.files_written);
    write_file(out_path("chain.lab"), chain_export.labels, result.files_written);
    write_file(out_path("chain.sta"), chain_export.states, result.files_written);
    auto chain_digests = dtmc_digest(chain);

    std::string model_dig = model_digest(model);
    std::string policy_dig = policy_digest(policy);

    ordered_json manifest;
    manifest["tool"] = {{"name", "coactiv"},
                       {"version", std::string(kVersion)},
                       {"build", std::string(kBuildId)}};
    manifest["seed"] = seed;
    {
        ordered_json pj = ordered_json::object();
        for (const auto& [k, v] : cfg.entries()) pj[k] = v;
        manifest["parameters"] = std::move(pj);
    }
    manifest["model"] = {{"path", cfg.required("model")}, {"digest", model_dig}};
    manifest["policy"] = {{"path", cfg.required("policy")}, {"digest", policy_dig}};
    manifest["chain"] = {{"states", chain.size()},
                        {"transitions_digest", chain_digests.transitions},
                        {"labels_digest", chain_digests.labels},
                        {"states_digest", chain_digests.states},
                        {"digest", chain_digests.combined},
                        {"fallback_incidents", chain.fallback_count},
                        {"absorbing_deadends", chain.deadend_count}};

    // check every property, derive one dataset per property
    std::string labeler = cfg.get_or("labeler", "property");
    std::vector<LabeledDataset> datasets;
    auto props_json = ordered_json::array();
    for (std::size_t i = 0; i < props.size(); ++i) {
        const auto& ps = props[i];
        CheckResult chk;
        try {
            chk = check_reachability(chain, ps.prop, mode, check_eps);
        } catch (const Error& e) {
            throw PipelineError("check:" + ps.text, e.what());
        }
        write_file(out_path("check_" + std::to_string(i + 1) + ".txt"),
                   export_state_values(chk), result.files_written);

        auto idxs = relevant_states(chain, chk, ps.selection);
        std::vector<StateVector> states;
        for (auto idx : idxs) states.push_back(chain.states[idx]);

        DatasetProvenance prov;
        prov.model_digest = model_dig;
        prov.policy_digest = policy_dig;
        prov.property_text = ps.text;
        prov.selection_mode = selection_to_string(ps.selection);
        prov.labeler = "property";
        prov.created_at = iso_utc_timestamp();

        LabeledDataset ds;
        try {
            if (labeler == "property") {
                ds = make_property_dataset(states, chain.feature_names, ps.label, prov);
            } else if (labeler.rfind("critical:", 0) == 0) {
                double tau = std::stod(labeler.substr(9));
                ds = label_critical(policy, states, chain.feature_names, tau, prov);
            } else if (labeler.rfind("predicate:", 0) == 0) {
                auto rest = labeler.substr(10);
                auto c1 = rest.find(':');
                auto c2 = rest.find(':', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos)
                    throw Error("labeler must be predicate:<expr>:<true>:<false>");
                ds = label_by_predicate(states, chain.feature_names, rest.substr(0, c1),
                                        rest.substr(c1 + 1, c2 - c1 - 1),
                                        rest.substr(c2 + 1), prov);
            } else {
                throw Error("unknown labeler '" + labeler + "'");
            }
        } catch (const Error& e) {
            throw PipelineError("dataset:" + ps.text, e.what());
        }
        std::string ds_name = "dataset_" + sanitize_filename(ps.label) + ".csv";
        write_dataset(ds, out_path(ds_name));
        result.files_written.push_back(out_path(ds_name));

        ordered_json pj;
        pj["text"] = ps.text;
        pj["canonical"] = property_to_string(ps.prop);
        pj["mode"] = chk.exact ? "exact" : "iterative";
        pj["initial_value"] = chk.initial_value;
        if (chk.exact) pj["initial_value_exact"] = rational_to_string(chk.exact_initial);
        if (chk.satisfied) pj["satisfied"] = *chk.satisfied;
        else pj["satisfied"] = nullptr;
        std::size_t target_count = 0, prob0 = 0, prob1 = 0;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            target_count += chk.is_target[k];
            prob0 += chk.is_prob0[k];
            prob1 += chk.is_prob1[k];
        }
        pj["target_states"] = target_count;
        pj["prob0_states"] = prob0;
        pj["prob1_states"] = prob1;
        pj["selection"] = selection_to_string(ps.selection);
        pj["dataset"] = {{"file", ds_name},
                         {"label", ps.label},
                         {"rows", ds.rows.size()},
                         {"digest", dataset_digest(ds)}};
        props_json.push_back(std::move(pj));
        datasets.push_back(std::move(ds));
    }
    manifest["properties"] = std::move(props_json);

    // per-label graphs + analytics + overlaps
    ComparisonReport rep;
    try {
        rep = compare_labels(model, policy, datasets, params);
    } catch (const Error& e) {
        throw PipelineError("compare", e.what());
    }
    for (const auto& g : rep.groups) {
        std::string base = "graph_" + sanitize_filename(g.label);
        write_file(out_path(base + ".graphml"), graph_to_graphml(g.graph),
                   result.files_written);
        write_file(out_path(base + ".dot"), graph_to_dot(g.graph), result.files_written);
        write_file(out_path(base + ".csv"), graph_to_adjacency_csv(g.graph),
                   result.files_written);
        write_file(out_path(base + ".json"), graph_to_json(g.graph), result.files_written);
        write_file(out_path("analysis_" + sanitize_filename(g.label) + ".json"),
                   label_analysis_to_json(g, params).dump(2) + "\n",
                   result.files_written);
    }
    auto comparison_json = comparison_to_json(rep, params);
    write_file(out_path("comparison.json"), comparison_json.dump(2) + "\n",
               result.files_written);
    manifest["comparison"] = comparison_json;

    // optional prune-and-reverify stage
    if (cfg.has("prune")) {
        std::string spec = *cfg.get("prune");
        std::vector<int> features;
        try {
            if (spec.rfind("top:", 0) == 0) {
                auto rest = spec.substr(4);
                auto colon = rest.find(':');
                if (colon == std::string::npos)
                    throw Error("prune spec must be top:<n>:<label>");
                int n = std::stoi(rest.substr(0, colon));
                std::string label = rest.substr(colon + 1);
                const LabelAnalysis* group = nullptr;
                for (const auto& g : rep.groups)
                    if (g.label == label) group = &g;
                if (!group) throw Error("prune spec references unknown label '" + label + "'");
                auto var_names = model.variable_names();
                for (int k = 0; k < n && std::size_t(k) < group->feature_rank.size(); ++k) {
                    const auto& fname = group->feature_rank[std::size_t(k)].first;
                    auto it = std::find(var_names.begin(), var_names.end(), fname);
                    if (it != var_names.end())
                        features.push_back(int(it - var_names.begin()));
                }
            } else {
                std::istringstream ss(spec);
                std::string tok;
                while (std::getline(ss, tok, ',')) features.push_back(std::stoi(tok));
            }
            ReachabilityProperty pprop =
                cfg.has("prune.property") ? parse_property(*cfg.get("prune.property"))
                                          : props[0].prop;
            result.prune_report = prune_and_check(model, policy, pprop, features, mode);
        } catch (const Error& e) {
            throw PipelineError("prune_verify", e.what());
        }
        auto pj = prune_report_to_json(*result.prune_report);
        write_file(out_path("prune_report.json"), pj.dump(2) + "\n", result.files_written);
        manifest["prune"] = std::move(pj);
    }

    write_file(out_path("manifest.json"), manifest.dump(2) + "\n", result.files_written);
    result.manifest = std::move(manifest);
    result.comparison = std::move(rep);
    return result;
}

}  // namespace coactiv
