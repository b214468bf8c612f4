#include "coactiv/pctl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>

#include "coactiv/errors.hpp"

namespace coactiv {

ReachabilityProperty parse_property(const std::string& text) {
    Lexer lex(text);
    Token p = lex.expect(Tok::Ident, "'P'");
    if (p.text != "P") lex.fail_at(p, DiagClass::Syntax, "property must start with 'P'");

    ReachabilityProperty prop;
    prop.source_text = text;
    Token c = lex.next();
    bool query = false;
    switch (c.kind) {
        case Tok::Eq:
            if (lex.accept(Tok::Question)) query = true;
            else prop.cmp = PropCmp::Eq;
            break;
        case Tok::Le: prop.cmp = PropCmp::Le; break;
        case Tok::Lt: prop.cmp = PropCmp::Lt; break;
        case Tok::Ge: prop.cmp = PropCmp::Ge; break;
        case Tok::Gt: prop.cmp = PropCmp::Gt; break;
        default:
            lex.fail_at(c, DiagClass::Syntax, "expected comparison after 'P'");
    }
    if (query) {
        prop.cmp = PropCmp::Query;
    } else {
        Token at = lex.peek();
        Expr t = parse_rat_expr(lex, false);
        Rational v = eval_rat(t, {});
        if (v < 0 || v > 1)
            lex.fail_at(at, DiagClass::Range,
                        "probability threshold " + rational_to_string(v) +
                            " is outside [0,1]");
        prop.threshold = v;
    }
    lex.expect(Tok::LBracket, "'['");
    Token f = lex.expect(Tok::Ident, "'F'");
    if (f.text != "F")
        lex.fail_at(f, DiagClass::Syntax, "only eventually ('F') properties are supported");
    prop.target = parse_bool_expr(lex, /*allow_label_atoms=*/true);
    lex.expect(Tok::RBracket, "']'");
    if (lex.peek().kind != Tok::End)
        lex.fail(DiagClass::Syntax, "trailing input after property");
    return prop;
}

std::string property_to_string(const ReachabilityProperty& p) {
    std::string out = "P";
    switch (p.cmp) {
        case PropCmp::Eq: out += "=" + rational_to_string(p.threshold); break;
        case PropCmp::Le: out += "<=" + rational_to_string(p.threshold); break;
        case PropCmp::Lt: out += "<" + rational_to_string(p.threshold); break;
        case PropCmp::Ge: out += ">=" + rational_to_string(p.threshold); break;
        case PropCmp::Gt: out += ">" + rational_to_string(p.threshold); break;
        case PropCmp::Query: out += "=?"; break;
    }
    out += " [ F " + to_string(p.target) + " ]";
    return out;
}

Selection selection_from_string(const std::string& s) {
    if (s == "all_reachable") return Selection::AllReachable;
    if (s == "positive_prob") return Selection::PositiveProb;
    if (s == "target_only") return Selection::TargetOnly;
    throw Error("unknown selection mode '" + s + "'");
}

std::string selection_to_string(Selection s) {
    switch (s) {
        case Selection::AllReachable: return "all_reachable";
        case Selection::PositiveProb: return "positive_prob";
        case Selection::TargetOnly: return "target_only";
    }
    return "?";
}

namespace {

std::vector<std::uint8_t> eval_target_set(const InducedDtmc& d, const Expr& resolved) {
    std::vector<std::uint8_t> t(d.size(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto holds = [&](int label_index) {
            const auto& name = d.label_names[std::size_t(label_index)];
            const auto& set = d.state_label_sets[i];
            return std::binary_search(set.begin(), set.end(), name);
        };
        t[i] = eval_bool(resolved, d.states[i], holds) ? 1 : 0;
    }
    return t;
}

// exact dense Gaussian elimination on (I - A) x = b, entries rational
std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> a,
                                  std::vector<Rational> b) {
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n)
            throw Error("singular reachability system (unexpected for a DTMC)");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            a[r][col] = 0;
            for (std::size_t k = col + 1; k < n; ++k)
                if (a[col][k] != 0) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        Rational acc = b[ri];
        for (std::size_t k = ri + 1; k < n; ++k)
            if (a[ri][k] != 0) acc -= a[ri][k] * x[k];
        x[ri] = acc / a[ri][ri];
    }
    return x;
}

}  // namespace

CheckResult check_reachability(const InducedDtmc& d, const ReachabilityProperty& prop,
                               CheckMode mode, double epsilon, std::size_t max_sweeps) {
    if (d.size() == 0) throw Error("empty chain");
    Expr target = prop.target;
    try {
        resolve_expr(target, d.feature_names, d.label_names, true);
    } catch (const ParseError& pe) {
        throw Error(std::string("property target does not match the chain: ") + pe.what());
    }

    CheckResult res;
    res.is_target = eval_target_set(d, target);
    std::size_t n = d.size();

    // reverse adjacency for the graph precomputations
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, p] : d.rows[i])
            if (p > 0) pred[j].push_back(i);

    // prob0: complement of backward reachability from the target set
    std::vector<std::uint8_t> can_reach(n, 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (res.is_target[i]) {
            can_reach[i] = 1;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (auto u : pred[v])
            if (!can_reach[u]) {
                can_reach[u] = 1;
                queue.push_back(u);
            }
    }
    res.is_prob0.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) res.is_prob0[i] = can_reach[i] ? 0 : 1;

    // prob1: states that cannot reach prob0 once target states are made absorbing
    std::vector<std::uint8_t> reaches_zero(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (res.is_prob0[i]) {
            reaches_zero[i] = 1;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (auto u : pred[v])
            if (!reaches_zero[u] && !res.is_target[u]) {
                reaches_zero[u] = 1;
                queue.push_back(u);
            }
    }
    res.is_prob1.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) res.is_prob1[i] = reaches_zero[i] ? 0 : 1;

    // unknown block
    std::vector<std::size_t> unknown;
    std::vector<std::size_t> pos(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i)
        if (!res.is_prob0[i] && !res.is_prob1[i]) {
            pos[i] = unknown.size();
            unknown.push_back(i);
        }

    bool exact = mode == CheckMode::Exact || (mode == CheckMode::Auto && n <= 50000);
    res.exact = exact;
    res.values.assign(n, 0.0);
    if (exact) res.exact_values.assign(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (res.is_prob1[i]) {
            res.values[i] = 1.0;
            if (exact) res.exact_values[i] = 1;
        }
    }

    std::size_t m = unknown.size();
    if (m > 0 && exact) {
        std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
        std::vector<Rational> b(m, Rational(0));
        for (std::size_t r = 0; r < m; ++r) {
            a[r][r] = 1;
            for (const auto& [j, p] : d.rows[unknown[r]]) {
                if (res.is_prob1[j]) b[r] += p;
                else if (pos[j] != SIZE_MAX) a[r][pos[j]] -= p;
            }
        }
        auto x = solve_exact(std::move(a), std::move(b));
        for (std::size_t r = 0; r < m; ++r) {
            res.exact_values[unknown[r]] = x[r];
            res.values[unknown[r]] = rational_to_double(x[r]);
        }
    } else if (m > 0) {
        // Gauss-Seidel on the unknown block
        std::vector<std::vector<std::pair<std::size_t, double>>> a(m);
        std::vector<double> b(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            for (const auto& [j, p] : d.rows[unknown[r]]) {
                double pd = rational_to_double(p);
                if (res.is_prob1[j]) b[r] += pd;
                else if (pos[j] != SIZE_MAX) a[r].emplace_back(pos[j], pd);
            }
        }
        std::vector<double> x(m, 0.0);
        res.converged = false;
        for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
            for (std::size_t r = 0; r < m; ++r) {
                double acc = b[r];
                for (const auto& [c, p] : a[r]) acc += p * x[c];
                x[r] = acc;
            }
            double residual = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                double acc = b[r];
                for (const auto& [c, p] : a[r]) acc += p * x[c];
                residual = std::max(residual, std::abs(acc - x[r]));
            }
            res.iterations = sweep + 1;
            if (residual < epsilon) {
                res.converged = true;
                break;
            }
        }
        for (std::size_t r = 0; r < m; ++r) res.values[unknown[r]] = x[r];
    }

    res.initial_value = res.values[d.initial];
    if (exact) res.exact_initial = res.exact_values[d.initial];
    if (prop.cmp != PropCmp::Query) {
        bool sat;
        if (exact) {
            const Rational& v = res.exact_initial;
            switch (prop.cmp) {
                case PropCmp::Eq: sat = v == prop.threshold; break;
                case PropCmp::Le: sat = v <= prop.threshold; break;
                case PropCmp::Lt: sat = v < prop.threshold; break;
                case PropCmp::Ge: sat = v >= prop.threshold; break;
                default: sat = v > prop.threshold; break;
            }
        } else {
            double v = res.initial_value;
            double t = rational_to_double(prop.threshold);
            switch (prop.cmp) {
                case PropCmp::Eq: sat = v == t; break;
                case PropCmp::Le: sat = v <= t; break;
                case PropCmp::Lt: sat = v < t; break;
                case PropCmp::Ge: sat = v >= t; break;
                default: sat = v > t; break;
            }
        }
        res.satisfied = sat;
    }
    return res;
}

std::vector<std::size_t> relevant_states(const InducedDtmc& d, const CheckResult& r,
                                         Selection selection) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        switch (selection) {
            case Selection::AllReachable:
                out.push_back(i);
                break;
            case Selection::PositiveProb:
                if (!r.is_prob0[i]) out.push_back(i);
                break;
            case Selection::TargetOnly:
                if (r.is_target[i]) out.push_back(i);
                break;
        }
    }
    return out;
}

std::string export_state_values(const CheckResult& r) {
    std::ostringstream out;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        out << i << " ";
        if (r.exact) {
            out << rational_to_string(r.exact_values[i]);
        } else {
            char buf[32];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r.values[i]);
            out << std::string_view(buf, std::size_t(ptr - buf));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace coactiv
