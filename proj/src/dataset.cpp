#include "coactiv/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coactiv/digest.hpp"
#include "coactiv/errors.hpp"

namespace coactiv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_states(const std::vector<StateVector>& states,
                  const std::vector<std::string>& feature_names) {
    if (states.empty()) throw DatasetError("cannot build a dataset from zero states");
    for (const auto& s : states)
        if (s.size() != feature_names.size())
            throw DatasetError("state dimension " + std::to_string(s.size()) +
                               " does not match " + std::to_string(feature_names.size()) +
                               " feature names");
}

}  // namespace

LabeledDataset make_property_dataset(const std::vector<StateVector>& states,
                                     const std::vector<std::string>& feature_names,
                                     const std::string& property_label,
                                     DatasetProvenance provenance) {
    check_states(states, feature_names);
    LabeledDataset ds;
    ds.feature_names = feature_names;
    ds.label_alphabet = {property_label};
    ds.provenance = std::move(provenance);
    for (const auto& s : states) ds.rows.emplace_back(s, property_label);
    return ds;
}

LabeledDataset label_critical(const MlpPolicy& p, const std::vector<StateVector>& states,
                              const std::vector<std::string>& feature_names, double tau,
                              DatasetProvenance provenance) {
    if (tau < 0) throw DatasetError("critical threshold must be nonnegative");
    check_states(states, feature_names);
    LabeledDataset ds;
    ds.feature_names = feature_names;
    ds.label_alphabet = {"critical", "non-critical"};
    ds.provenance = std::move(provenance);
    ds.provenance.labeler = "critical_q_gap tau=" + std::to_string(tau);
    for (const auto& s : states) {
        auto q = forward_raw(p, normalize_state(p, s));
        double gap = *std::max_element(q.begin(), q.end()) -
                     *std::min_element(q.begin(), q.end());
        // boundary gap == tau counts as critical
        ds.rows.emplace_back(s, gap >= tau ? "critical" : "non-critical");
    }
    return ds;
}

LabeledDataset label_by_predicate(const std::vector<StateVector>& states,
                                  const std::vector<std::string>& feature_names,
                                  const std::string& predicate_text,
                                  const std::string& true_label,
                                  const std::string& false_label,
                                  DatasetProvenance provenance) {
    check_states(states, feature_names);
    Expr pred = parse_bool_expr_text(predicate_text);
    resolve_expr(pred, feature_names, {}, false);
    LabeledDataset ds;
    ds.feature_names = feature_names;
    ds.label_alphabet = {true_label, false_label};
    ds.provenance = std::move(provenance);
    ds.provenance.labeler = "predicate " + predicate_text;
    for (const auto& s : states)
        ds.rows.emplace_back(s, eval_bool(pred, s) ? true_label : false_label);
    return ds;
}

void write_dataset(const LabeledDataset& ds, const std::string& csv_path) {
    if (ds.rows.empty()) throw DatasetError("refusing to write an empty dataset");
    std::ofstream out(csv_path);
    if (!out) throw DatasetError("cannot write '" + csv_path + "'");
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i)
        out << ds.feature_names[i] << ",";
    out << "label\n";
    for (const auto& [s, label] : ds.rows) {
        for (auto v : s) out << v << ",";
        out << label << "\n";
    }

    ordered_json j;
    j["feature_names"] = ds.feature_names;
    j["label_alphabet"] = ds.label_alphabet;
    j["rows"] = ds.rows.size();
    j["provenance"] = {{"model_digest", ds.provenance.model_digest},
                       {"policy_digest", ds.provenance.policy_digest},
                       {"property", ds.provenance.property_text},
                       {"selection", ds.provenance.selection_mode},
                       {"labeler", ds.provenance.labeler},
                       {"created_at", ds.provenance.created_at}};
    std::ofstream side(csv_path + ".provenance.json");
    if (!side) throw DatasetError("cannot write '" + csv_path + ".provenance.json'");
    side << j.dump(2) << "\n";
}

LabeledDataset read_dataset(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw DatasetError("cannot open '" + csv_path + "'");
    LabeledDataset ds;

    auto split = [](const std::string& line) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
        return parts;
    };

    std::string line;
    if (!std::getline(in, line)) throw DatasetError("empty dataset file");
    auto header = split(line);
    if (header.size() < 2 || header.back() != "label")
        throw DatasetError("line 1: header must end with 'label'");
    ds.feature_names.assign(header.begin(), header.end() - 1);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto parts = split(line);
        if (parts.size() != header.size())
            throw DatasetError("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(parts.size()));
        StateVector s;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            try {
                std::size_t used = 0;
                s.push_back(std::stoll(parts[i], &used));
                if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
            } catch (const std::exception&) {
                throw DatasetError("line " + std::to_string(lineno) +
                                   ": malformed integer '" + parts[i] + "'");
            }
        }
        ds.rows.emplace_back(std::move(s), parts.back());
        if (std::find(ds.label_alphabet.begin(), ds.label_alphabet.end(), parts.back()) ==
            ds.label_alphabet.end())
            ds.label_alphabet.push_back(parts.back());
    }
    if (ds.rows.empty()) throw DatasetError("dataset has a header but no rows");

    std::ifstream side(csv_path + ".provenance.json");
    if (side) {
        try {
            json j = json::parse(side);
            auto alpha = j.at("label_alphabet").get<std::vector<std::string>>();
            for (const auto& l : ds.label_alphabet)
                if (std::find(alpha.begin(), alpha.end(), l) == alpha.end())
                    throw DatasetError("label '" + l + "' is not in the declared alphabet");
            ds.label_alphabet = alpha;
            auto names = j.at("feature_names").get<std::vector<std::string>>();
            if (names != ds.feature_names)
                throw DatasetError("feature names in sidecar do not match the CSV header");
            const auto& p = j.at("provenance");
            ds.provenance.model_digest = p.value("model_digest", "");
            ds.provenance.policy_digest = p.value("policy_digest", "");
            ds.provenance.property_text = p.value("property", "");
            ds.provenance.selection_mode = p.value("selection", "");
            ds.provenance.labeler = p.value("labeler", "");
            ds.provenance.created_at = p.value("created_at", "");
        } catch (const json::exception& e) {
            throw DatasetError(std::string("malformed provenance sidecar: ") + e.what());
        }
    }
    return ds;
}

std::string dataset_digest(const LabeledDataset& ds) {
    Sha256 h;
    h.update("coactiv-dataset-v1");
    h.update_u64(ds.feature_names.size());
    for (const auto& n : ds.feature_names) {
        h.update_u64(n.size());
        h.update(n);
    }
    h.update_u64(ds.label_alphabet.size());
    for (const auto& n : ds.label_alphabet) {
        h.update_u64(n.size());
        h.update(n);
    }
    h.update_u64(ds.rows.size());
    for (const auto& [s, label] : ds.rows) {
        for (auto v : s) h.update_u64(std::uint64_t(v));
        h.update_u64(label.size());
        h.update(label);
    }
    return h.hex_digest();
}

}  // namespace coactiv
