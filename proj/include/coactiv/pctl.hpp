#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coactiv/dtmc.hpp"
#include "coactiv/expr.hpp"
#include "coactiv/rational.hpp"

namespace coactiv {

enum class PropCmp { Eq, Le, Lt, Ge, Gt, Query };

// Reachability fragment: P<cmp><rat> [ F <bexpr> ] or P=? [ F <bexpr> ].
// The target expression ranges over state features and model labels
// (quoted or bare); it is resolved against a concrete chain at check time.
struct ReachabilityProperty {
    PropCmp cmp = PropCmp::Query;
    Rational threshold;  // in [0,1]; unused for Query
    Expr target;
    std::string source_text;
};

ReachabilityProperty parse_property(const std::string& text);
std::string property_to_string(const ReachabilityProperty& p);

enum class CheckMode { Exact, Iterative, Auto };
enum class Selection { AllReachable, PositiveProb, TargetOnly };

Selection selection_from_string(const std::string& s);
std::string selection_to_string(Selection s);

struct CheckResult {
    bool exact = true;
    std::vector<double> values;          // filled in both modes
    std::vector<Rational> exact_values;  // exact mode only
    double initial_value = 0.0;
    Rational exact_initial;
    std::optional<bool> satisfied;  // absent for query properties
    std::vector<std::uint8_t> is_target;
    std::vector<std::uint8_t> is_prob0;  // graph-certified value 0
    std::vector<std::uint8_t> is_prob1;  // graph-certified value 1
    std::size_t iterations = 0;          // Gauss-Seidel sweeps
    bool converged = true;
};

// Computes per-state reachability probabilities. Exact mode eliminates the
// linear system over rationals after the usual prob0/prob1 graph
// precomputation; iterative mode runs Gauss-Seidel until the residual
// drops below epsilon. Auto picks exact up to 50,000 states.
CheckResult check_reachability(const InducedDtmc& d, const ReachabilityProperty& prop,
                               CheckMode mode = CheckMode::Auto,
                               double epsilon = 1e-9,
                               std::size_t max_sweeps = 1000000);

// State indices for dataset extraction, ascending.
std::vector<std::size_t> relevant_states(const InducedDtmc& d, const CheckResult& r,
                                         Selection selection);

// Lines "idx value"; exact rationals in exact mode, shortest-round-trip
// decimals otherwise.
std::string export_state_values(const CheckResult& r);

}  // namespace coactiv
