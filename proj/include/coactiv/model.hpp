#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coactiv/expr.hpp"
#include "coactiv/rational.hpp"

namespace coactiv {

// A state is the ordered tuple of variable values, aligned with the
// declaration order in the model file.
using StateVector = std::vector<std::int64_t>;

struct VariableDecl {
    std::string name;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t init = 0;

    bool operator==(const VariableDecl&) const = default;
};

struct Assignment {
    int var_index = -1;
    std::string var_name;
    Expr value;

    bool operator==(const Assignment&) const = default;
};

struct UpdateBranch {
    Rational probability;  // constant, in (0,1]; per command they sum to 1
    std::vector<Assignment> assignments;

    bool operator==(const UpdateBranch&) const = default;
};

struct Command {
    std::string action;
    Expr guard;
    std::vector<UpdateBranch> updates;

    bool operator==(const Command&) const = default;
};

struct LabelDef {
    std::string name;
    Expr expr;

    bool operator==(const LabelDef&) const = default;
};

struct RewardDef {
    std::string action;
    Expr guard;
    Expr value;  // rational expression over state variables

    bool operator==(const RewardDef&) const = default;
};

struct ConstantDef {
    std::string name;
    Rational value;

    bool operator==(const ConstantDef&) const = default;
};

// Parsed and fully resolved guarded-command model. Immutable after
// parsing; all queries are pure.
struct FactoredMdp {
    std::string module_name;
    std::vector<ConstantDef> constants;  // re-emitted resolved by pretty_print
    std::vector<VariableDecl> variables;
    std::vector<Command> commands;
    std::vector<LabelDef> labels;
    std::vector<RewardDef> rewards;
    std::vector<std::string> action_names;  // first-declaration order

    bool operator==(const FactoredMdp&) const = default;

    std::size_t dimension() const { return variables.size(); }
    StateVector initial_state() const;
    std::vector<std::string> variable_names() const;
    std::vector<std::string> label_names() const;
};

struct Distribution {
    // successors distinct, probabilities positive and summing to exactly 1
    std::vector<std::pair<StateVector, Rational>> entries;
};

bool in_bounds(const FactoredMdp& m, const StateVector& s);

// Actions with at least one satisfied guard, in first-declaration order.
std::vector<std::string> enabled_actions(const FactoredMdp& m, const StateVector& s);

// Applies the unique satisfied command for `action`. Throws ModelError if
// the action is not enabled, if two commands for it overlap in s, or if a
// successor leaves the declared bounds.
Distribution successor_distribution(const FactoredMdp& m, const StateVector& s,
                                    const std::string& action);

std::vector<std::string> state_labels(const FactoredMdp& m, const StateVector& s);

// Sum of the values of all matching reward items (0 when none match).
Rational reward(const FactoredMdp& m, const StateVector& s, const std::string& action);

// Canonical text; parse(pretty_print(m)) is structurally equal to m.
std::string pretty_print(const FactoredMdp& m);

std::string model_digest(const FactoredMdp& m);

}  // namespace coactiv
