#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coactiv/coactivation.hpp"

namespace coactiv {

// Centrality and community analysis over co-activation graphs. Both
// PageRank and modularity read edge weights as |w|: correlation strength
// carries the co-activation intensity, the sign stays in exports only.

struct PageRankParams {
    double damping = 0.85;
    double epsilon = 1e-8;
    std::size_t max_iterations = 10000;
};

struct PageRankResult {
    std::vector<NeuronId> nodes;              // aligned with scores
    std::vector<std::uint8_t> zero_variance;
    std::vector<double> scores;               // isolated nodes score 0
    double damping = 0.85;
    double epsilon = 1e-8;
    std::size_t iterations = 0;
    bool converged = false;
};

// Iterates PR(i) = (1-d)/N + d * sum_j A_ij PR(j) / D(j) over the
// non-isolated subgraph, starting from all-ones, until the L1 step
// difference drops below epsilon. d = 0 is allowed and yields 1/N.
PageRankResult pagerank(const CoactivationGraph& g, const PageRankParams& params = {});

// k best-scored neurons; ties break toward lower (layer, index).
std::vector<std::pair<NeuronId, double>> top_k(const PageRankResult& r, std::size_t k);

// Input-layer neurons by descending score; zero-variance features land
// last with score 0. feature_names[i] names input index i.
std::vector<std::pair<std::string, double>> feature_ranking(
    const PageRankResult& r, const std::vector<std::string>& feature_names);

struct Partition {
    std::vector<NeuronId> nodes;
    std::vector<int> community;   // contiguous ids from 0
    double modularity_q = 0.0;
    std::vector<double> phase_q;  // Q after each completed Louvain phase
};

// Two-phase Louvain over |w| weights. Node visit order is canonical
// unless a seed is provided to shuffle it. Requires at least one edge.
Partition louvain(const CoactivationGraph& g, std::optional<std::uint64_t> seed = {});

// Direct evaluation of Q = 1/(2m) sum_ij (A_ij - k_i k_j / 2m) d(c_i,c_j)
// with A = |w|. `community` is aligned with g.nodes; every non-isolated
// node must be assigned (>= 0).
double modularity(const CoactivationGraph& g, const std::vector<int>& community);

struct OverlapReport {
    std::vector<std::pair<int, int>> matched_pairs;  // (community in a, in b)
    double agreement = 0.0;                          // in [0,1]
    std::size_t shared_nodes = 0;
    std::string method = "greedy_max_intersection";
};

// Greedy maximum-intersection matching of communities over the shared
// NeuronId space; symmetric in its arguments.
OverlapReport community_overlap(const Partition& a, const Partition& b);

}  // namespace coactiv
