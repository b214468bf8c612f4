#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coactiv/coactivation.hpp"
#include "coactiv/dataset.hpp"
#include "coactiv/dtmc.hpp"
#include "coactiv/graph_analysis.hpp"
#include "coactiv/kv_config.hpp"
#include "coactiv/pctl.hpp"

namespace coactiv {

struct AnalysisParams {
    PageRankParams pagerank;
    std::size_t top_k = 50;
    GraphOptions graph;
    std::optional<std::uint64_t> louvain_seed;  // empty: canonical visit order
};

// Everything computed for one label group.
struct LabelAnalysis {
    std::string label;
    std::size_t sample_count = 0;
    CoactivationGraph graph;
    PageRankResult pagerank;
    Partition partition;
    std::vector<std::pair<NeuronId, double>> top_neurons;
    std::vector<std::pair<std::string, double>> feature_rank;
    std::vector<std::string> warnings;
};

struct DatasetRelation {
    std::size_t a = 0, b = 0;  // dataset indices
    std::size_t size_a = 0, size_b = 0, common = 0;
    std::string relation;  // equal | a_strict_superset | b_strict_superset |
                           // overlapping | disjoint
};

struct ComparisonReport {
    std::vector<LabelAnalysis> groups;  // label order: first appearance
    struct PairOverlap {
        std::string label_a, label_b;
        OverlapReport overlap;
    };
    std::vector<PairOverlap> overlaps;
    std::vector<DatasetRelation> dataset_relations;
};

// Per-label co-activation analysis over the union of the given datasets,
// plus all pairwise community overlaps. Needs at least two label groups;
// every group must clear the 3-sample correlation floor.
ComparisonReport compare_labels(const FactoredMdp& m, const MlpPolicy& p,
                                const std::vector<LabeledDataset>& datasets,
                                const AnalysisParams& params);

struct PruneVerifyReport {
    std::string property;
    std::vector<int> pruned_features;
    std::vector<std::string> pruned_feature_names;
    bool exact = true;
    double baseline_prob = 0.0;
    double pruned_prob = 0.0;
    double delta = 0.0;  // pruned - baseline
    std::string baseline_exact;  // rational strings (exact mode)
    std::string pruned_exact;
    std::optional<bool> satisfied_before, satisfied_after;
    DtmcDigests baseline_chain, pruned_chain;
    std::string baseline_policy_digest, pruned_policy_digest;
    std::size_t baseline_states = 0, pruned_states = 0;
};

// Verifies the property on the chain induced by p, prunes the given input
// features, rebuilds the chain from scratch and verifies again.
PruneVerifyReport prune_and_check(const FactoredMdp& m, const MlpPolicy& p,
                                  const ReachabilityProperty& prop,
                                  const std::vector<int>& features,
                                  CheckMode mode = CheckMode::Auto);

// --- Pipeline --------------------------------------------------------------

// Configuration file keys (see README for the full list):
//   model, policy, out, seed, check_mode, labeler,
//   property.<i>, property.<i>.label, property.<i>.selection,
//   analysis.damping/epsilon/max_iter/top_k/min_abs_weight/layer_scope,
//   prune (= "top:<n>:<label>" or comma-separated feature indices),
//   prune.property
struct PipelineResult {
    nlohmann::ordered_json manifest;
    std::string out_dir;
    std::vector<std::string> files_written;
    ComparisonReport comparison;
    std::optional<PruneVerifyReport> prune_report;
};

PipelineResult run_pipeline(const KvConfig& cfg, std::uint64_t seed,
                            const std::string& out_dir);

// Serialization helpers shared with the CLI.
nlohmann::ordered_json comparison_to_json(const ComparisonReport& rep,
                                          const AnalysisParams& params);
nlohmann::ordered_json prune_report_to_json(const PruneVerifyReport& rep);
nlohmann::ordered_json label_analysis_to_json(const LabelAnalysis& a,
                                              const AnalysisParams& params);

std::string iso_utc_timestamp();
std::string sanitize_filename(const std::string& s);

}  // namespace coactiv
