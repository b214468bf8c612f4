#include "coactiv/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coactiv/digest.hpp"
#include "coactiv/errors.hpp"

namespace coactiv {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::size_t> MlpPolicy::layer_widths() const {
    std::vector<std::size_t> w;
    w.push_back(std::size_t(input_dim));
    for (const auto& l : layers) w.push_back(l.out_dim());
    return w;
}

std::size_t MlpPolicy::neuron_count() const {
    std::size_t n = 0;
    for (auto w : layer_widths()) n += w;
    return n;
}

void validate_policy(const MlpPolicy& p) {
    if (p.input_dim <= 0) throw PolicyError("input_dim must be positive");
    if (p.layers.empty()) throw PolicyError("policy has no layers");
    if (p.action_names.empty()) throw PolicyError("policy declares no actions");
    std::size_t in = std::size_t(p.input_dim);
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        const auto& l = p.layers[li];
        if (l.weights.empty()) throw PolicyError("layer " + std::to_string(li) + " is empty");
        for (std::size_t r = 0; r < l.weights.size(); ++r) {
            if (l.weights[r].size() != in)
                throw PolicyError("shape mismatch: layer " + std::to_string(li) + " row " +
                                  std::to_string(r) + " has " +
                                  std::to_string(l.weights[r].size()) + " inputs, layer " +
                                  std::to_string(li ? li - 1 : 0) + " provides " +
                                  std::to_string(in));
            for (std::size_t c = 0; c < l.weights[r].size(); ++c)
                if (!std::isfinite(l.weights[r][c]))
                    throw PolicyError("non-finite weight at layer " + std::to_string(li) +
                                      ", row " + std::to_string(r) + ", col " +
                                      std::to_string(c));
        }
        if (l.bias.size() != l.out_dim())
            throw PolicyError("bias length mismatch at layer " + std::to_string(li));
        for (std::size_t r = 0; r < l.bias.size(); ++r)
            if (!std::isfinite(l.bias[r]))
                throw PolicyError("non-finite bias at layer " + std::to_string(li) +
                                  ", row " + std::to_string(r));
        in = l.out_dim();
    }
    if (in != p.action_names.size())
        throw PolicyError("output width " + std::to_string(in) + " does not match " +
                          std::to_string(p.action_names.size()) + " action names");
    if (p.layers.back().activation != Activation::Linear)
        throw PolicyError("final layer must have linear activation (raw Q-values)");
    if (p.normalization) {
        const auto& n = *p.normalization;
        if (n.offsets.size() != std::size_t(p.input_dim) ||
            n.scales.size() != std::size_t(p.input_dim))
            throw PolicyError("normalization vectors must have input_dim entries");
        for (double s : n.scales)
            if (s == 0.0 || !std::isfinite(s))
                throw PolicyError("normalization scales must be nonzero and finite");
    }
}

namespace {

MlpPolicy policy_from_json(const json& j) {
    MlpPolicy p;
    try {
        p.input_dim = j.at("input_dim").get<int>();
        p.action_names = j.at("action_names").get<std::vector<std::string>>();
        if (!j.at("normalization").is_null()) {
            Normalization n;
            n.offsets = j.at("normalization").at("offsets").get<std::vector<double>>();
            n.scales = j.at("normalization").at("scales").get<std::vector<double>>();
            p.normalization = std::move(n);
        }
        for (const auto& lj : j.at("layers")) {
            Layer l;
            l.weights = lj.at("weights").get<std::vector<std::vector<double>>>();
            l.bias = lj.at("bias").get<std::vector<double>>();
            std::string act = lj.at("activation").get<std::string>();
            if (act == "relu") l.activation = Activation::Relu;
            else if (act == "linear") l.activation = Activation::Linear;
            else throw PolicyError("unknown activation kind '" + act + "'");
            p.layers.push_back(std::move(l));
        }
    } catch (const json::exception& e) {
        throw PolicyError(std::string("malformed policy file: ") + e.what());
    }
    validate_policy(p);
    return p;
}

}  // namespace

MlpPolicy load_policy_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw PolicyError(std::string("policy file is not valid JSON: ") + e.what());
    }
    return policy_from_json(j);
}

MlpPolicy load_policy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PolicyError("cannot open policy file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_policy_text(ss.str());
}

std::string policy_to_json(const MlpPolicy& p) {
    ordered_json j;
    j["input_dim"] = p.input_dim;
    j["action_names"] = p.action_names;
    if (p.normalization) {
        j["normalization"] = {{"offsets", p.normalization->offsets},
                              {"scales", p.normalization->scales}};
    } else {
        j["normalization"] = nullptr;
    }
    j["layers"] = ordered_json::array();
    for (const auto& l : p.layers) {
        ordered_json lj;
        lj["weights"] = l.weights;
        lj["bias"] = l.bias;
        lj["activation"] = l.activation == Activation::Relu ? "relu" : "linear";
        j["layers"].push_back(std::move(lj));
    }
    return j.dump(2) + "\n";
}

void save_policy_file(const MlpPolicy& p, const std::string& path) {
    validate_policy(p);
    std::ofstream out(path);
    if (!out) throw PolicyError("cannot write policy file '" + path + "'");
    out << policy_to_json(p);
}

std::string policy_digest(const MlpPolicy& p) {
    Sha256 h;
    h.update("coactiv-policy-v1");
    h.update_u64(std::uint64_t(p.input_dim));
    h.update_u64(p.action_names.size());
    for (const auto& a : p.action_names) {
        h.update_u64(a.size());
        h.update(a);
    }
    h.update_u64(p.normalization ? 1 : 0);
    if (p.normalization) {
        for (double v : p.normalization->offsets) h.update_double(v);
        for (double v : p.normalization->scales) h.update_double(v);
    }
    h.update_u64(p.layers.size());
    for (const auto& l : p.layers) {
        h.update_u64(l.out_dim());
        h.update_u64(l.in_dim());
        h.update_u64(l.activation == Activation::Relu ? 1 : 0);
        for (const auto& row : l.weights)
            for (double v : row) h.update_double(v);
        for (double v : l.bias) h.update_double(v);
    }
    return h.hex_digest();
}

Normalization minmax_normalization(const FactoredMdp& m) {
    Normalization n;
    for (const auto& v : m.variables) {
        n.offsets.push_back(double(v.lo));
        n.scales.push_back(v.hi == v.lo ? 1.0 : double(v.hi - v.lo));
    }
    return n;
}

std::vector<double> normalize_state(const MlpPolicy& p, std::span<const std::int64_t> s) {
    if (s.size() != std::size_t(p.input_dim))
        throw PolicyError("state has " + std::to_string(s.size()) +
                          " features, policy expects " + std::to_string(p.input_dim));
    std::vector<double> x(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = double(s[i]);
        if (p.normalization)
            x[i] = (x[i] - p.normalization->offsets[i]) / p.normalization->scales[i];
    }
    return x;
}

std::vector<double> forward_raw(const MlpPolicy& p, const std::vector<double>& x,
                                ActivationRecord* rec) {
    if (x.size() != std::size_t(p.input_dim))
        throw PolicyError("input dimension mismatch in forward pass");
    if (rec) {
        rec->layers.clear();
        rec->layers.push_back(x);
    }
    std::vector<double> cur = x;
    for (const auto& l : p.layers) {
        std::vector<double> next(l.out_dim());
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            double acc = l.bias[r];
            const auto& row = l.weights[r];
            for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * cur[c];
            if (l.activation == Activation::Relu && acc < 0.0) acc = 0.0;
            next[r] = acc;
        }
        cur = std::move(next);
        if (rec) rec->layers.push_back(cur);
    }
    return cur;
}

ForwardResult forward(const MlpPolicy& p, const StateVector& s) {
    ForwardResult r;
    r.q_values = forward_raw(p, normalize_state(p, s), &r.record);
    return r;
}

int select_action_index(const MlpPolicy& p, std::span<const double> q,
                        std::span<const int> allowed, bool strict,
                        std::uint64_t* fallback_counter) {
    if (allowed.empty()) throw PolicyError("empty allowed-action set");
    for (int a : allowed)
        if (a < 0 || std::size_t(a) >= p.action_names.size())
            throw PolicyError("allowed action index out of range");
    int global_best = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (q[i] > q[global_best]) global_best = int(i);
    for (int a : allowed)
        if (a == global_best) return global_best;
    if (strict)
        throw PolicyError("argmax action '" + p.action_names[std::size_t(global_best)] +
                          "' is not in the allowed set (strict mode)");
    if (fallback_counter) ++*fallback_counter;
    int best = allowed[0];
    for (int a : allowed)
        if (q[std::size_t(a)] > q[std::size_t(best)]) best = a;
    return best;
}

std::string select_action(const MlpPolicy& p, const StateVector& s,
                          std::span<const std::string> allowed, bool strict,
                          std::uint64_t* fallback_counter) {
    std::vector<int> idx;
    for (const auto& name : allowed) {
        auto it = std::find(p.action_names.begin(), p.action_names.end(), name);
        if (it == p.action_names.end())
            throw PolicyError("allowed action '" + name + "' is not a policy output");
        idx.push_back(int(it - p.action_names.begin()));
    }
    std::sort(idx.begin(), idx.end());
    auto q = forward_raw(p, normalize_state(p, s));
    return p.action_names[std::size_t(
        select_action_index(p, q, idx, strict, fallback_counter))];
}

MlpPolicy prune_input_features(const MlpPolicy& p, const std::vector<int>& features) {
    for (int f : features)
        if (f < 0 || f >= p.input_dim)
            throw PolicyError("pruned feature index " + std::to_string(f) +
                              " is out of range (input_dim " + std::to_string(p.input_dim) +
                              ")");
    MlpPolicy out = p;
    std::set<int> fs(features.begin(), features.end());
    for (auto& row : out.layers[0].weights)
        for (int f : fs) row[std::size_t(f)] = 0.0;
    return out;
}

}  // namespace coactiv
