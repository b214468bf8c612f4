#include "coactiv/dtmc.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "coactiv/digest.hpp"
#include "coactiv/errors.hpp"

namespace coactiv {

namespace {

struct StateHash {
    std::size_t operator()(const StateVector& s) const noexcept {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto v : s) {
            h ^= std::size_t(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

InducedDtmc build_induced_dtmc(const FactoredMdp& m, const MlpPolicy& p,
                               std::size_t max_states) {
    if (std::size_t(p.input_dim) != m.dimension())
        throw ModelError("policy input_dim " + std::to_string(p.input_dim) +
                         " does not match model dimension " + std::to_string(m.dimension()));
    // model action alphabet must be a subset of the policy outputs
    std::vector<int> action_to_output(m.action_names.size(), -1);
    for (std::size_t i = 0; i < m.action_names.size(); ++i) {
        auto it = std::find(p.action_names.begin(), p.action_names.end(), m.action_names[i]);
        if (it == p.action_names.end())
            throw ModelError("model action '" + m.action_names[i] +
                             "' is not a policy output");
        action_to_output[i] = int(it - p.action_names.begin());
    }

    InducedDtmc d;
    d.feature_names = m.variable_names();
    d.label_names = m.label_names();

    std::unordered_map<StateVector, std::size_t, StateHash> index;
    std::deque<std::size_t> frontier;

    auto intern = [&](const StateVector& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        if (d.states.size() >= max_states)
            throw ModelError("state limit " + std::to_string(max_states) +
                             " exceeded during chain construction (frontier size " +
                             std::to_string(frontier.size()) + ")");
        std::size_t id = d.states.size();
        index.emplace(s, id);
        d.states.push_back(s);
        frontier.push_back(id);
        return id;
    };

    d.initial = intern(m.initial_state());

    while (!frontier.empty()) {
        std::size_t si = frontier.front();
        frontier.pop_front();
        StateVector s = d.states[si];  // copy: d.states may reallocate below

        auto labels = state_labels(m, s);
        std::sort(labels.begin(), labels.end());
        d.state_label_sets.resize(d.states.size());
        d.state_label_sets[si] = std::move(labels);
        d.rows.resize(d.states.size());
        d.chosen_action.resize(d.states.size());

        auto enabled = enabled_actions(m, s);
        if (enabled.empty()) {
            d.rows[si] = {{si, Rational(1)}};  // terminal states self-loop
            d.chosen_action[si] = "";
            ++d.deadend_count;
            continue;
        }
        std::vector<int> allowed;
        for (const auto& name : enabled) {
            auto it = std::find(m.action_names.begin(), m.action_names.end(), name);
            allowed.push_back(action_to_output[std::size_t(it - m.action_names.begin())]);
        }
        std::sort(allowed.begin(), allowed.end());
        auto q = forward_raw(p, normalize_state(p, s));
        int choice = select_action_index(p, q, allowed, false, &d.fallback_count);
        const std::string& action = p.action_names[std::size_t(choice)];

        auto dist = successor_distribution(m, s, action);
        d.chosen_action[si] = action;
        for (auto& [succ, prob] : dist.entries) {
            std::size_t ti = intern(succ);
            d.rows[si].emplace_back(ti, prob);
        }
    }
    // the resize calls above may lag behind the last interned states
    d.state_label_sets.resize(d.states.size());
    d.rows.resize(d.states.size());
    d.chosen_action.resize(d.states.size());
    return d;
}

DtmcExport export_dtmc(const InducedDtmc& d) {
    std::ostringstream tra, lab, sta;
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        for (const auto& [j, p] : d.rows[i])
            tra << i << " " << j << " " << rational_to_string(p) << "\n";
    for (std::size_t i = 0; i < d.state_label_sets.size(); ++i) {
        if (d.state_label_sets[i].empty()) continue;
        lab << i;
        for (const auto& name : d.state_label_sets[i]) lab << " " << name;
        lab << "\n";
    }
    for (std::size_t i = 0; i < d.states.size(); ++i) {
        sta << i;
        for (auto v : d.states[i]) sta << " " << v;
        sta << "\n";
    }
    return {tra.str(), lab.str(), sta.str()};
}

InducedDtmc import_dtmc(const DtmcExport& e) {
    InducedDtmc d;
    {
        std::istringstream in(e.states);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::size_t idx;
            ls >> idx;
            StateVector s;
            std::int64_t v;
            while (ls >> v) s.push_back(v);
            if (idx != d.states.size())
                throw Error("state map indices must be consecutive from 0");
            d.states.push_back(std::move(s));
        }
    }
    d.rows.resize(d.states.size());
    d.state_label_sets.resize(d.states.size());
    d.chosen_action.resize(d.states.size());
    if (!d.states.empty())
        for (std::size_t i = 0; i < d.states[0].size(); ++i)
            d.feature_names.push_back("f" + std::to_string(i + 1));
    {
        std::istringstream in(e.transitions);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::size_t src, dst;
            std::string prob;
            if (!(ls >> src >> dst >> prob))
                throw Error("malformed transition line: " + line);
            auto r = rational_from_string(prob);
            if (!r || src >= d.states.size() || dst >= d.states.size())
                throw Error("malformed transition line: " + line);
            d.rows[src].emplace_back(dst, *r);
        }
    }
    {
        std::istringstream in(e.labels);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::size_t idx;
            if (!(ls >> idx) || idx >= d.states.size())
                throw Error("malformed label line: " + line);
            std::string name;
            while (ls >> name) {
                d.state_label_sets[idx].push_back(name);
                if (std::find(d.label_names.begin(), d.label_names.end(), name) ==
                    d.label_names.end())
                    d.label_names.push_back(name);
            }
            std::sort(d.state_label_sets[idx].begin(), d.state_label_sets[idx].end());
        }
    }
    return d;
}

DtmcDigests dtmc_digest(const InducedDtmc& d) {
    DtmcExport e = export_dtmc(d);
    DtmcDigests out;
    out.transitions = sha256_hex(e.transitions);
    out.labels = sha256_hex(e.labels);
    out.states = sha256_hex(e.states);
    Sha256 h;
    h.update("coactiv-dtmc-v1\n");
    h.update(e.transitions);
    h.update("\x1f");
    h.update(e.labels);
    h.update("\x1f");
    h.update(e.states);
    out.combined = h.hex_digest();
    return out;
}

}  // namespace coactiv
