#pragma once

#include <string>

#include "coactiv/model_parser.hpp"
#include "coactiv/policy.hpp"

namespace testutil {

inline std::string source_dir() { return COACTIV_SOURCE_DIR; }
inline std::string taxi_path() { return source_dir() + "/models/taxi.pm"; }
inline std::string robot_path() { return source_dir() + "/models/cleaning_robot.pm"; }

// Single-variable chain builder model used across tests:
// x moves 0 -> 1 -> 2 deterministically under action "step", then stops.
inline coactiv::FactoredMdp line_model() {
    return coactiv::parse_model(
        "module line\n"
        "  x : [0..2] init 0;\n"
        "  [step] x<2 -> 1:(x'=x+1);\n"
        "endmodule\n"
        "label \"done\" = x=2;\n"
        "label \"goal\" = x=2;\n"
        "rewards\n"
        "  [step] true : 1;\n"
        "endrewards\n");
}

// Policy with a single linear layer and fixed weights; q = W x + b.
inline coactiv::MlpPolicy fixed_linear_policy(
    int input_dim, const std::vector<std::vector<double>>& w,
    const std::vector<double>& b, std::vector<std::string> action_names) {
    coactiv::MlpPolicy p;
    p.input_dim = input_dim;
    p.action_names = std::move(action_names);
    coactiv::Layer l;
    l.weights = w;
    l.bias = b;
    l.activation = coactiv::Activation::Linear;
    p.layers.push_back(std::move(l));
    return p;
}

}  // namespace testutil
