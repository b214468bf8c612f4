#include "coactiv/model.hpp"

#include <algorithm>
#include <sstream>

#include "coactiv/digest.hpp"
#include "coactiv/errors.hpp"

namespace coactiv {

StateVector FactoredMdp::initial_state() const {
    StateVector s;
    s.reserve(variables.size());
    for (const auto& v : variables) s.push_back(v.init);
    return s;
}

std::vector<std::string> FactoredMdp::variable_names() const {
    std::vector<std::string> names;
    names.reserve(variables.size());
    for (const auto& v : variables) names.push_back(v.name);
    return names;
}

std::vector<std::string> FactoredMdp::label_names() const {
    std::vector<std::string> names;
    names.reserve(labels.size());
    for (const auto& l : labels) names.push_back(l.name);
    return names;
}

bool in_bounds(const FactoredMdp& m, const StateVector& s) {
    if (s.size() != m.variables.size()) return false;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] < m.variables[i].lo || s[i] > m.variables[i].hi) return false;
    return true;
}

namespace {

void require_in_bounds(const FactoredMdp& m, const StateVector& s) {
    if (!in_bounds(m, s)) {
        std::string repr = "(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) repr += ",";
            repr += std::to_string(s[i]);
        }
        repr += ")";
        throw ModelError("state " + repr + " is out of bounds for the model");
    }
}

}  // namespace

std::vector<std::string> enabled_actions(const FactoredMdp& m, const StateVector& s) {
    require_in_bounds(m, s);
    std::vector<bool> enabled(m.action_names.size(), false);
    for (const auto& c : m.commands) {
        if (eval_bool(c.guard, s)) {
            auto it = std::find(m.action_names.begin(), m.action_names.end(), c.action);
            enabled[std::size_t(it - m.action_names.begin())] = true;
        }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < enabled.size(); ++i)
        if (enabled[i]) out.push_back(m.action_names[i]);
    return out;
}

Distribution successor_distribution(const FactoredMdp& m, const StateVector& s,
                                    const std::string& action) {
    require_in_bounds(m, s);
    const Command* chosen = nullptr;
    for (const auto& c : m.commands) {
        if (c.action != action || !eval_bool(c.guard, s)) continue;
        if (chosen)
            throw ModelError("overlapping guards: two commands for action '" + action +
                             "' are enabled in the same state");
        chosen = &c;
    }
    if (!chosen) throw ModelError("action '" + action + "' is not enabled in this state");

    Distribution dist;
    for (const auto& u : chosen->updates) {
        StateVector succ = s;  // simultaneous assignment: RHS evaluated on s
        for (const auto& a : u.assignments)
            succ[std::size_t(a.var_index)] = eval_int(a.value, s);
        for (std::size_t i = 0; i < succ.size(); ++i) {
            if (succ[i] < m.variables[i].lo || succ[i] > m.variables[i].hi)
                throw ModelError("successor value " + std::to_string(succ[i]) +
                                 " of variable '" + m.variables[i].name +
                                 "' leaves its declared bounds");
        }
        auto it = std::find_if(dist.entries.begin(), dist.entries.end(),
                               [&](const auto& e) { return e.first == succ; });
        if (it != dist.entries.end())
            it->second += u.probability;  // duplicate successors merge
        else
            dist.entries.emplace_back(std::move(succ), u.probability);
    }
    return dist;
}

std::vector<std::string> state_labels(const FactoredMdp& m, const StateVector& s) {
    require_in_bounds(m, s);
    std::vector<std::string> out;
    for (const auto& l : m.labels)
        if (eval_bool(l.expr, s)) out.push_back(l.name);
    return out;
}

Rational reward(const FactoredMdp& m, const StateVector& s, const std::string& action) {
    require_in_bounds(m, s);
    Rational total = 0;
    for (const auto& r : m.rewards)
        if (r.action == action && eval_bool(r.guard, s)) total += eval_rat(r.value, s);
    return total;
}

std::string pretty_print(const FactoredMdp& m) {
    std::ostringstream out;
    for (const auto& c : m.constants)
        out << "const " << c.name << " = " << rational_to_string(c.value) << ";\n";
    out << "module " << m.module_name << "\n";
    for (const auto& v : m.variables)
        out << "  " << v.name << " : [" << v.lo << ".." << v.hi << "] init " << v.init
            << ";\n";
    for (const auto& c : m.commands) {
        out << "  [" << c.action << "] " << to_string(c.guard) << " -> ";
        for (std::size_t i = 0; i < c.updates.size(); ++i) {
            if (i) out << " + ";
            const auto& u = c.updates[i];
            out << rational_to_string(u.probability) << ":";
            if (u.assignments.empty()) {
                out << "true";
            } else {
                for (std::size_t j = 0; j < u.assignments.size(); ++j) {
                    if (j) out << "&";
                    out << "(" << u.assignments[j].var_name << "'="
                        << to_string(u.assignments[j].value) << ")";
                }
            }
        }
        out << ";\n";
    }
    out << "endmodule\n";
    for (const auto& l : m.labels)
        out << "label \"" << l.name << "\" = " << to_string(l.expr) << ";\n";
    if (!m.rewards.empty()) {
        out << "rewards\n";
        for (const auto& r : m.rewards)
            out << "  [" << r.action << "] " << to_string(r.guard) << " : "
                << to_string(r.value) << ";\n";
        out << "endrewards\n";
    }
    return out.str();
}

std::string model_digest(const FactoredMdp& m) {
    return sha256_hex(pretty_print(m));
}

}  // namespace coactiv
