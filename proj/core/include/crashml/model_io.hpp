#pragma once

#include <memory>
#include <string>

#include "crashml/dataset.hpp"
#include "crashml/ensemble.hpp"

namespace crashml {

/// Serializes a voting model (SvmClassifier / BagClassifier members only)
/// together with its schema into a self-contained JSON document. Identical
/// models produce identical bytes.
std::string model_to_json(const VotingModel& model, const Schema& schema,
                          std::string_view kind);

struct LoadedModel {
  std::shared_ptr<const Schema> schema;
  VotingModel model;
  std::string kind;
};

LoadedModel model_from_json(const std::string& text);

/// Standalone serializers for the member model types.
std::string tree_to_json(const DecisionTree& tree, const Schema& schema);
DecisionTree tree_from_json(const std::string& text, const Schema& schema);
std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const std::string& text);

}  // namespace crashml
