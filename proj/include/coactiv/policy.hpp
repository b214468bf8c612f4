#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coactiv/model.hpp"

namespace coactiv {

enum class Activation { Relu, Linear };

struct Layer {
    std::vector<std::vector<double>> weights;  // out x in, row-major
    std::vector<double> bias;
    Activation activation = Activation::Linear;

    std::size_t out_dim() const { return weights.size(); }
    std::size_t in_dim() const { return weights.empty() ? 0 : weights[0].size(); }
};

// Per-feature affine normalization applied before layer 0:
// x_i = (f_i - offset_i) / scale_i.
struct Normalization {
    std::vector<double> offsets;
    std::vector<double> scales;
};

struct NeuronId {
    int layer = 0;  // 0 = input, 1..H = hidden, H+1 = output
    int index = 0;

    auto operator<=>(const NeuronId&) const = default;
};

// Post-activation values for every layer of one forward pass; layers[0]
// holds the normalized input features.
struct ActivationRecord {
    std::vector<std::vector<double>> layers;
};

struct MlpPolicy {
    int input_dim = 0;
    std::vector<std::string> action_names;  // aligned with output neurons
    std::optional<Normalization> normalization;
    std::vector<Layer> layers;

    std::size_t layer_count() const { return layers.size(); }
    // Widths of all activation layers: input, hidden..., output.
    std::vector<std::size_t> layer_widths() const;
    std::size_t neuron_count() const;
};

// --- Loading / saving ---------------------------------------------------

// Shape, activation-kind and finiteness checks; throws PolicyError with
// layer/row/column coordinates on the first violation. Runs on every load
// and save.
void validate_policy(const MlpPolicy& p);

MlpPolicy load_policy_text(const std::string& json_text);
MlpPolicy load_policy_file(const std::string& path);
std::string policy_to_json(const MlpPolicy& p);
void save_policy_file(const MlpPolicy& p, const std::string& path);

// Content hash over a canonical binary serialization (IEEE-754 bits, not
// decimal text), stable across processes.
std::string policy_digest(const MlpPolicy& p);

// Min-max normalization to [0,1] from declared variable bounds; constant
// variables (lo == hi) get scale 1.
Normalization minmax_normalization(const FactoredMdp& m);

// --- Evaluation ---------------------------------------------------------

std::vector<double> normalize_state(const MlpPolicy& p, std::span<const std::int64_t> s);

// Forward pass from already-normalized inputs. `rec`, when non-null,
// receives every layer's post-activation values.
std::vector<double> forward_raw(const MlpPolicy& p, const std::vector<double>& x,
                                ActivationRecord* rec = nullptr);

struct ForwardResult {
    std::vector<double> q_values;
    ActivationRecord record;
};

ForwardResult forward(const MlpPolicy& p, const StateVector& s);

// Greedy action choice restricted to `allowed` (indices into
// action_names, ascending). Ties break toward the lowest output index.
// In strict mode an allowed set that excludes the global argmax is an
// error; otherwise the best allowed action is chosen and
// *fallback_counter (when given) is incremented.
int select_action_index(const MlpPolicy& p, std::span<const double> q,
                        std::span<const int> allowed, bool strict = false,
                        std::uint64_t* fallback_counter = nullptr);

std::string select_action(const MlpPolicy& p, const StateVector& s,
                          std::span<const std::string> allowed, bool strict = false,
                          std::uint64_t* fallback_counter = nullptr);

// Zeroes all layer-0 weight columns for the given input features; the
// rest of the network is copied unchanged.
MlpPolicy prune_input_features(const MlpPolicy& p, const std::vector<int>& features);

}  // namespace coactiv
