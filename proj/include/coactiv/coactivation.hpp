#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coactiv/dataset.hpp"
#include "coactiv/policy.hpp"

namespace coactiv {

// Activation values over one label subset: one row per state, one column
// per neuron in canonical layer-major order (input layer first, output
// layer last). Stored column-major for correlation work.
struct ActivationMatrix {
    std::vector<NeuronId> columns;
    std::vector<std::uint8_t> zero_variance;     // exact min==max per column
    std::vector<std::vector<double>> col_data;   // [column][state]
    std::size_t sample_count = 0;
    std::vector<std::string> warnings;
};

// One forward pass per state; hard floor of 3 samples, warning below 30.
ActivationMatrix collect_activations(const MlpPolicy& p,
                                     const std::vector<StateVector>& subset);

// Sample Pearson correlation; nullopt when either series has zero
// variance. Throws GraphError on length mismatch or fewer than 3 samples.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

enum class LayerScope { AllPairs, AdjacentLayers };

struct GraphOptions {
    double min_abs_weight = 0.0;
    LayerScope layer_scope = LayerScope::AllPairs;
};

struct CoactivationGraph {
    std::vector<NeuronId> nodes;
    std::vector<std::uint8_t> zero_variance;  // excluded from edges, kept as nodes
    struct Edge {
        int a = 0;  // indices into nodes, a < b
        int b = 0;
        double weight = 0.0;  // signed correlation
    };
    std::vector<Edge> edges;
    std::string dataset_label;

    std::size_t node_count() const { return nodes.size(); }
};

CoactivationGraph build_graph(const ActivationMatrix& m, const GraphOptions& options = {},
                              const std::string& dataset_label = "");

// --- Exports -------------------------------------------------------------

std::string graph_to_graphml(const CoactivationGraph& g);
std::string graph_to_dot(const CoactivationGraph& g);
std::string graph_to_adjacency_csv(const CoactivationGraph& g);

// Full-fidelity JSON used to hand graphs between CLI stages.
std::string graph_to_json(const CoactivationGraph& g);
CoactivationGraph graph_from_json(const std::string& text);

}  // namespace coactiv
