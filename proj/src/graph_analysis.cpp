#include "coactiv/graph_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "coactiv/errors.hpp"

namespace coactiv {

namespace {

// adjacency over |w|, neighbor lists sorted for a fixed summation order
std::vector<std::vector<std::pair<int, double>>> abs_adjacency(const CoactivationGraph& g) {
    std::vector<std::vector<std::pair<int, double>>> adj(g.node_count());
    for (const auto& e : g.edges) {
        double w = std::abs(e.weight);
        adj[std::size_t(e.a)].emplace_back(e.b, w);
        adj[std::size_t(e.b)].emplace_back(e.a, w);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
}

}  // namespace

PageRankResult pagerank(const CoactivationGraph& g, const PageRankParams& params) {
    if (params.damping < 0.0 || params.damping >= 1.0)
        throw GraphError("damping factor must lie in [0,1)");
    if (params.epsilon <= 0.0) throw GraphError("epsilon must be positive");

    PageRankResult res;
    res.nodes = g.nodes;
    res.zero_variance.assign(g.zero_variance.begin(), g.zero_variance.end());
    res.damping = params.damping;
    res.epsilon = params.epsilon;
    res.scores.assign(g.node_count(), 0.0);

    auto adj = abs_adjacency(g);
    std::vector<double> degree(g.node_count(), 0.0);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (const auto& [j, w] : adj[i]) degree[i] += w;
        if (!adj[i].empty()) active.push_back(i);
    }
    if (active.empty()) {
        res.converged = true;  // nothing to rank
        return res;
    }
    double n_active = double(active.size());

    // paper initialization: all ones (the fixed point does not depend on it)
    std::vector<double> pr(g.node_count(), 0.0);
    for (auto i : active) pr[i] = 1.0;
    std::vector<double> next(g.node_count(), 0.0);

    const double d = params.damping;
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
        for (auto i : active) {
            double acc = 0.0;
            for (const auto& [j, w] : adj[i]) acc += w * pr[std::size_t(j)] / degree[std::size_t(j)];
            next[i] = (1.0 - d) / n_active + d * acc;
        }
        double l1 = 0.0;
        for (auto i : active) l1 += std::abs(next[i] - pr[i]);
        for (auto i : active) pr[i] = next[i];
        res.iterations = it + 1;
        if (l1 < params.epsilon) {
            res.converged = true;
            break;
        }
    }
    for (auto i : active) res.scores[i] = pr[i];
    return res;
}

std::vector<std::pair<NeuronId, double>> top_k(const PageRankResult& r, std::size_t k) {
    if (k == 0) throw GraphError("top_k requires k >= 1");
    std::vector<std::size_t> order(r.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (r.scores[a] != r.scores[b]) return r.scores[a] > r.scores[b];
        return r.nodes[a] < r.nodes[b];
    });
    std::vector<std::pair<NeuronId, double>> out;
    for (std::size_t i = 0; i < order.size() && i < k; ++i)
        out.emplace_back(r.nodes[order[i]], r.scores[order[i]]);
    return out;
}

std::vector<std::pair<std::string, double>> feature_ranking(
    const PageRankResult& r, const std::vector<std::string>& feature_names) {
    std::vector<std::pair<int, double>> inputs;  // (index, score)
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        if (r.nodes[i].layer == 0)
            inputs.emplace_back(r.nodes[i].index,
                                r.zero_variance[i] ? 0.0 : r.scores[i]);
    if (inputs.empty()) throw GraphError("graph has no input-layer nodes");
    std::stable_sort(inputs.begin(), inputs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [idx, score] : inputs) {
        std::string name = std::size_t(idx) < feature_names.size()
                               ? feature_names[std::size_t(idx)]
                               : "f" + std::to_string(idx + 1);
        out.emplace_back(name, score);
    }
    return out;
}

double modularity(const CoactivationGraph& g, const std::vector<int>& community) {
    if (community.size() != g.node_count())
        throw GraphError("partition size does not match node count");
    std::vector<double> degree(g.node_count(), 0.0);
    double two_m = 0.0;
    for (const auto& e : g.edges) {
        double w = std::abs(e.weight);
        degree[std::size_t(e.a)] += w;
        degree[std::size_t(e.b)] += w;
        two_m += 2.0 * w;
    }
    if (two_m == 0.0) throw GraphError("modularity of an edgeless graph is undefined");
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (degree[i] > 0.0 && community[i] < 0)
            throw GraphError("non-isolated node without a community assignment");

    double intra = 0.0;  // sum over ordered pairs of intra-community weight
    for (const auto& e : g.edges)
        if (community[std::size_t(e.a)] == community[std::size_t(e.b)])
            intra += 2.0 * std::abs(e.weight);
    std::map<int, double> comm_degree;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (degree[i] > 0.0) comm_degree[community[i]] += degree[i];
    double expected = 0.0;
    for (const auto& [c, kd] : comm_degree) expected += kd * kd;
    return intra / two_m - expected / (two_m * two_m);
}

namespace {

// internal aggregated graph for the Louvain phases
struct LouvainGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
    std::vector<double> self_loop;                         // intra weight
    std::vector<double> degree;                            // includes 2*self_loop
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }
};

// Repeated passes of local moves until a full pass changes nothing;
// returns true when any node changed community.
bool local_moves(const LouvainGraph& g, std::vector<int>& comm,
                 std::vector<double>& sigma_tot, const std::vector<int>& order) {
    bool any_move = false;
    std::vector<double> k_in(g.size(), 0.0);
    std::vector<char> touched(g.size(), 0);
    std::vector<int> seen;
    bool moved = true;
    std::size_t pass_guard = 0;
    while (moved && pass_guard++ < 10000) {
        moved = false;
        for (int i : order) {
            auto ui = std::size_t(i);
            int c0 = comm[ui];
            seen.clear();
            for (const auto& [j, w] : g.adj[ui]) {
                int c = comm[std::size_t(j)];
                if (!touched[std::size_t(c)]) {
                    touched[std::size_t(c)] = 1;
                    seen.push_back(c);
                }
                k_in[std::size_t(c)] += w;
            }
            if (!touched[std::size_t(c0)]) {
                touched[std::size_t(c0)] = 1;
                seen.push_back(c0);
            }
            sigma_tot[std::size_t(c0)] -= g.degree[ui];

            // gain(c) ~ k_in[c] - sigma_tot[c] * k_i / 2m  (common factors dropped)
            double best_gain = k_in[std::size_t(c0)] -
                               sigma_tot[std::size_t(c0)] * g.degree[ui] / g.two_m;
            int best = c0;
            std::vector<int> cand(seen);
            std::sort(cand.begin(), cand.end());
            for (int c : cand) {
                if (c == c0) continue;
                double gain = k_in[std::size_t(c)] -
                              sigma_tot[std::size_t(c)] * g.degree[ui] / g.two_m;
                if (gain > best_gain + 1e-15) {
                    best_gain = gain;
                    best = c;
                }
            }
            sigma_tot[std::size_t(best)] += g.degree[ui];
            if (best != c0) {
                comm[ui] = best;
                moved = true;
                any_move = true;
            }
            for (int c : seen) {
                k_in[std::size_t(c)] = 0.0;
                touched[std::size_t(c)] = 0;
            }
        }
    }
    return any_move;
}

LouvainGraph aggregate(const LouvainGraph& g, const std::vector<int>& comm,
                       std::vector<int>& renumber) {
    // contiguous community ids in order of first appearance
    renumber.assign(g.size(), -1);
    std::vector<int> comm_id(g.size(), -1);
    int next_id = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        int c = comm[i];
        if (comm_id[std::size_t(c)] < 0) comm_id[std::size_t(c)] = next_id++;
        renumber[i] = comm_id[std::size_t(c)];
    }
    LouvainGraph out;
    out.adj.resize(std::size_t(next_id));
    out.self_loop.assign(std::size_t(next_id), 0.0);
    out.degree.assign(std::size_t(next_id), 0.0);
    out.two_m = g.two_m;

    std::map<std::pair<int, int>, double> between;
    for (std::size_t i = 0; i < g.size(); ++i) {
        int ci = renumber[i];
        out.self_loop[std::size_t(ci)] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            int cj = renumber[std::size_t(j)];
            if (ci == cj) {
                if (std::size_t(j) > i) out.self_loop[std::size_t(ci)] += w;
            } else if (ci < cj) {
                between[{ci, cj}] += w;
            }
        }
    }
    for (const auto& [key, w] : between) {
        out.adj[std::size_t(key.first)].emplace_back(key.second, w);
        out.adj[std::size_t(key.second)].emplace_back(key.first, w);
    }
    for (auto& row : out.adj) std::sort(row.begin(), row.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.degree[i] = 2.0 * out.self_loop[i];
        for (const auto& [j, w] : out.adj[i]) {
            (void)j;
            out.degree[i] += w;
        }
    }
    return out;
}

}  // namespace

Partition louvain(const CoactivationGraph& g, std::optional<std::uint64_t> seed) {
    if (g.edges.empty()) throw GraphError("Louvain requires at least one edge");

    Partition part;
    part.nodes = g.nodes;

    LouvainGraph cur;
    cur.adj = abs_adjacency(g);
    cur.self_loop.assign(g.node_count(), 0.0);
    cur.degree.assign(g.node_count(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i)
        for (const auto& [j, w] : cur.adj[i]) {
            (void)j;
            cur.degree[i] += w;
            cur.two_m += w;
        }

    // node -> community of the ORIGINAL graph, updated after each phase
    std::vector<int> node_comm(g.node_count());
    std::iota(node_comm.begin(), node_comm.end(), 0);

    std::mt19937_64 rng(seed.value_or(0));
    while (true) {
        std::vector<int> comm(cur.size());
        std::iota(comm.begin(), comm.end(), 0);
        std::vector<double> sigma_tot = cur.degree;

        std::vector<int> order(cur.size());
        std::iota(order.begin(), order.end(), 0);
        if (seed) std::shuffle(order.begin(), order.end(), rng);

        bool improved = local_moves(cur, comm, sigma_tot, order);
        if (!improved) break;

        std::vector<int> renumber;
        LouvainGraph next = aggregate(cur, comm, renumber);
        // renumber[old aggregated node] = new aggregated node (= its community)
        for (auto& c : node_comm) c = renumber[std::size_t(c)];
        cur = std::move(next);

        part.phase_q.push_back(modularity(g, node_comm));
        if (cur.size() <= 1) break;
    }

    // contiguous ids over the original nodes, in canonical node order;
    // untouched isolated nodes keep their singleton communities
    std::map<int, int> remap;
    for (std::size_t i = 0; i < node_comm.size(); ++i) {
        auto [it, fresh] = remap.try_emplace(node_comm[i], int(remap.size()));
        node_comm[i] = it->second;
        (void)fresh;
    }
    part.community = std::move(node_comm);
    part.modularity_q = modularity(g, part.community);
    return part;
}

OverlapReport community_overlap(const Partition& a, const Partition& b) {
    // canonical argument order makes the greedy matching symmetric
    auto key = [](const Partition& p) {
        std::ostringstream s;
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
            s << p.nodes[i].layer << ":" << p.nodes[i].index << "=" << p.community[i] << ";";
        return s.str();
    };
    if (key(b) < key(a)) {
        OverlapReport r = community_overlap(b, a);
        for (auto& [x, y] : r.matched_pairs) std::swap(x, y);
        return r;
    }

    std::map<NeuronId, int> comm_b;
    for (std::size_t i = 0; i < b.nodes.size(); ++i) comm_b[b.nodes[i]] = b.community[i];

    std::map<std::pair<int, int>, std::size_t> contingency;
    std::size_t shared = 0;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        auto it = comm_b.find(a.nodes[i]);
        if (it == comm_b.end()) continue;
        ++shared;
        contingency[{a.community[i], it->second}] += 1;
    }
    if (shared == 0) throw GraphError("partitions share no nodes");

    std::vector<std::pair<std::pair<int, int>, std::size_t>> pairs(contingency.begin(),
                                                                   contingency.end());
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });

    OverlapReport rep;
    rep.shared_nodes = shared;
    std::map<int, bool> used_a, used_b;
    std::size_t agree = 0;
    for (const auto& [cc, count] : pairs) {
        if (used_a[cc.first] || used_b[cc.second]) continue;
        used_a[cc.first] = used_b[cc.second] = true;
        rep.matched_pairs.push_back(cc);
        agree += count;
    }
    rep.agreement = double(agree) / double(shared);
    return rep;
}

}  // namespace coactiv
