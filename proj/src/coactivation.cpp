#include "coactiv/coactivation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "coactiv/errors.hpp"

namespace coactiv {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

ActivationMatrix collect_activations(const MlpPolicy& p,
                                     const std::vector<StateVector>& subset) {
    if (subset.size() < 3)
        throw GraphError("need at least 3 samples to correlate, got " +
                         std::to_string(subset.size()));
    ActivationMatrix m;
    m.sample_count = subset.size();
    if (subset.size() < 30)
        m.warnings.push_back("only " + std::to_string(subset.size()) +
                             " samples; correlations will be noisy");
    auto widths = p.layer_widths();
    for (std::size_t layer = 0; layer < widths.size(); ++layer)
        for (std::size_t idx = 0; idx < widths[layer]; ++idx)
            m.columns.push_back({int(layer), int(idx)});
    m.col_data.assign(m.columns.size(), {});
    for (auto& col : m.col_data) col.reserve(subset.size());

    for (const auto& s : subset) {
        auto fr = forward(p, s);
        std::size_t col = 0;
        for (const auto& layer_vals : fr.record.layers)
            for (double v : layer_vals) m.col_data[col++].push_back(v);
    }
    m.zero_variance.resize(m.columns.size());
    for (std::size_t c = 0; c < m.col_data.size(); ++c) {
        auto [mn, mx] = std::minmax_element(m.col_data[c].begin(), m.col_data[c].end());
        m.zero_variance[c] = (*mn == *mx) ? 1 : 0;
    }
    return m;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw GraphError("correlation series lengths differ: " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
    if (x.size() < 3)
        throw GraphError("need at least 3 samples to correlate");
    // single-pass bivariate Welford co-moments
    double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double n1 = double(k + 1);
        double dx = x[k] - mean_x;
        mean_x += dx / n1;
        double dy = y[k] - mean_y;
        mean_y += dy / n1;
        m2x += dx * (x[k] - mean_x);
        m2y += dy * (y[k] - mean_y);
        cxy += dx * (y[k] - mean_y);
    }
    if (m2x <= 0.0 || m2y <= 0.0) return std::nullopt;
    return cxy / std::sqrt(m2x * m2y);
}

CoactivationGraph build_graph(const ActivationMatrix& m, const GraphOptions& options,
                              const std::string& dataset_label) {
    CoactivationGraph g;
    g.nodes = m.columns;
    g.zero_variance.assign(m.zero_variance.begin(), m.zero_variance.end());
    g.dataset_label = dataset_label;
    for (std::size_t i = 0; i < m.columns.size(); ++i) {
        if (m.zero_variance[i]) continue;
        for (std::size_t j = i + 1; j < m.columns.size(); ++j) {
            if (m.zero_variance[j]) continue;
            if (options.layer_scope == LayerScope::AdjacentLayers &&
                std::abs(m.columns[i].layer - m.columns[j].layer) != 1)
                continue;
            auto r = pearson(m.col_data[i], m.col_data[j]);
            if (!r) continue;
            if (std::abs(*r) >= options.min_abs_weight)
                g.edges.push_back({int(i), int(j), *r});
        }
    }
    return g;
}

std::string graph_to_graphml(const CoactivationGraph& g) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"layer\" for=\"node\" attr.name=\"layer\" attr.type=\"int\"/>\n"
        << "  <key id=\"index\" for=\"node\" attr.name=\"index\" attr.type=\"int\"/>\n"
        << "  <key id=\"zero_variance\" for=\"node\" attr.name=\"zero_variance\" "
           "attr.type=\"boolean\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"coactivation\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        out << "    <node id=\"n" << g.nodes[i].layer << "_" << g.nodes[i].index << "\">"
            << "<data key=\"layer\">" << g.nodes[i].layer << "</data>"
            << "<data key=\"index\">" << g.nodes[i].index << "</data>"
            << "<data key=\"zero_variance\">" << (g.zero_variance[i] ? "true" : "false")
            << "</data></node>\n";
    }
    for (const auto& e : g.edges) {
        const auto& a = g.nodes[std::size_t(e.a)];
        const auto& b = g.nodes[std::size_t(e.b)];
        out << "    <edge source=\"n" << a.layer << "_" << a.index << "\" target=\"n"
            << b.layer << "_" << b.index << "\"><data key=\"weight\">"
            << fmt_double(e.weight) << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

std::string graph_to_dot(const CoactivationGraph& g) {
    std::ostringstream out;
    out << "graph coactivation {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        out << "  n" << g.nodes[i].layer << "_" << g.nodes[i].index << " [layer="
            << g.nodes[i].layer << ", index=" << g.nodes[i].index;
        if (g.zero_variance[i]) out << ", zero_variance=true";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        const auto& a = g.nodes[std::size_t(e.a)];
        const auto& b = g.nodes[std::size_t(e.b)];
        out << "  n" << a.layer << "_" << a.index << " -- n" << b.layer << "_" << b.index
            << " [weight=" << fmt_double(e.weight) << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string graph_to_adjacency_csv(const CoactivationGraph& g) {
    std::ostringstream out;
    out << "i_layer,i_idx,j_layer,j_idx,weight\n";
    for (const auto& e : g.edges) {
        const auto& a = g.nodes[std::size_t(e.a)];
        const auto& b = g.nodes[std::size_t(e.b)];
        out << a.layer << "," << a.index << "," << b.layer << "," << b.index << ","
            << fmt_double(e.weight) << "\n";
    }
    return out.str();
}

std::string graph_to_json(const CoactivationGraph& g) {
    nlohmann::ordered_json j;
    j["label"] = g.dataset_label;
    auto nodes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        nodes.push_back({{"layer", g.nodes[i].layer},
                         {"index", g.nodes[i].index},
                         {"zero_variance", bool(g.zero_variance[i])}});
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) edges.push_back({e.a, e.b, e.weight});
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
}

CoactivationGraph graph_from_json(const std::string& text) {
    CoactivationGraph g;
    try {
        auto j = nlohmann::json::parse(text);
        g.dataset_label = j.at("label").get<std::string>();
        for (const auto& nj : j.at("nodes")) {
            g.nodes.push_back({nj.at("layer").get<int>(), nj.at("index").get<int>()});
            g.zero_variance.push_back(nj.at("zero_variance").get<bool>() ? 1 : 0);
        }
        for (const auto& ej : j.at("edges")) {
            CoactivationGraph::Edge e;
            e.a = ej.at(0).get<int>();
            e.b = ej.at(1).get<int>();
            e.weight = ej.at(2).get<double>();
            if (e.a < 0 || e.b < 0 || std::size_t(e.a) >= g.nodes.size() ||
                std::size_t(e.b) >= g.nodes.size() || e.a == e.b)
                throw GraphError("edge endpoints out of range");
            g.edges.push_back(e);
        }
    } catch (const nlohmann::json::exception& e) {
        throw GraphError(std::string("malformed graph file: ") + e.what());
    }
    return g;
}

}  // namespace coactiv
