#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coactiv/model.hpp"
#include "coactiv/policy.hpp"

namespace coactiv {

// Markov chain induced by closing an MDP under a policy's action choices.
// States are indexed in BFS discovery order, which makes exports and
// digests reproducible.
struct InducedDtmc {
    std::vector<StateVector> states;
    std::size_t initial = 0;
    // per-state outgoing transitions (successor index, probability); each
    // row sums to exactly 1
    std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
    std::vector<std::vector<std::string>> state_label_sets;  // sorted per state
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;
    // action the policy chose per state; empty for absorbing dead ends
    std::vector<std::string> chosen_action;
    std::uint64_t fallback_count = 0;     // disabled-argmax incidents
    std::uint64_t deadend_count = 0;      // states made absorbing

    std::size_t size() const { return states.size(); }
};

// Breadth-first closure from the model's initial state, expanding only the
// policy-chosen action per state. States without enabled actions become
// absorbing self-loops. Throws ModelError when max_states is exceeded.
InducedDtmc build_induced_dtmc(const FactoredMdp& m, const MlpPolicy& p,
                               std::size_t max_states = 1000000);

struct DtmcExport {
    std::string transitions;  // lines "src dst prob"
    std::string labels;       // lines "idx name1 name2 ..." (names sorted)
    std::string states;       // lines "idx f1 f2 ... fd"
};

DtmcExport export_dtmc(const InducedDtmc& d);

// Rebuilds a chain from exported text (chosen actions and counters are not
// part of the export and come back empty).
InducedDtmc import_dtmc(const DtmcExport& e);

struct DtmcDigests {
    std::string transitions;
    std::string labels;
    std::string states;
    std::string combined;
};

DtmcDigests dtmc_digest(const InducedDtmc& d);

}  // namespace coactiv
