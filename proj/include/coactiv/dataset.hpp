#pragma once

#include <string>
#include <vector>

#include "coactiv/model.hpp"
#include "coactiv/policy.hpp"

namespace coactiv {

struct DatasetProvenance {
    std::string model_digest;
    std::string policy_digest;
    std::string property_text;
    std::string selection_mode;
    std::string labeler;     // free-form description of the labeling rule
    std::string created_at;  // wall clock; excluded from digests
};

// State vectors with one string label each, plus the provenance needed to
// reproduce them. The label alphabet is declared up front so per-label
// analysis works over a closed set.
struct LabeledDataset {
    std::vector<std::string> feature_names;
    std::vector<std::pair<StateVector, std::string>> rows;
    std::vector<std::string> label_alphabet;
    DatasetProvenance provenance;

    std::size_t dimension() const { return feature_names.size(); }
};

// Option 1: every state carries the property label.
LabeledDataset make_property_dataset(const std::vector<StateVector>& states,
                                     const std::vector<std::string>& feature_names,
                                     const std::string& property_label,
                                     DatasetProvenance provenance);

// Option 2: "critical" iff max(q) - min(q) >= tau over raw Q-values.
LabeledDataset label_critical(const MlpPolicy& p, const std::vector<StateVector>& states,
                              const std::vector<std::string>& feature_names, double tau,
                              DatasetProvenance provenance);

// Option 2, user predicate over feature names.
LabeledDataset label_by_predicate(const std::vector<StateVector>& states,
                                  const std::vector<std::string>& feature_names,
                                  const std::string& predicate_text,
                                  const std::string& true_label,
                                  const std::string& false_label,
                                  DatasetProvenance provenance);

// CSV with header "<f1>,...,<fd>,label"; provenance goes to a JSON sidecar
// next to the CSV ("<path>.provenance.json").
void write_dataset(const LabeledDataset& ds, const std::string& csv_path);
LabeledDataset read_dataset(const std::string& csv_path);

// Content hash over feature names, rows and alphabet (provenance excluded,
// so equal data hashes equal regardless of when it was produced).
std::string dataset_digest(const LabeledDataset& ds);

}  // namespace coactiv
