#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "crashml/classifier.hpp"
#include "crashml/dataset.hpp"
#include "crashml/dtree.hpp"
#include "crashml/resample.hpp"
#include "crashml/rng.hpp"
#include "crashml/svm.hpp"

namespace crashml {

/// Homogeneous bag of decision trees, one per bootstrap sample.
struct BaggedModel {
  TreeParams params;
  std::vector<DecisionTree> members;
  std::vector<std::uint64_t> member_seeds;
};

enum class BootstrapMode {
  resample,  // size-n sample with replacement (the real thing)
  identity,  // test hook: every member sees the training set unchanged
};

/// n indices drawn uniformly with replacement from [0, n).
std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng);

/// Trains n_bags trees, member m on a bootstrap sample drawn from the
/// sub-seed derive_seed(seed, bag, m); members are therefore independent of
/// the degree of parallelism.
BaggedModel bag_train(const Dataset& train, int n_bags, const TreeParams& params,
                      std::uint64_t seed, int threads = 1,
                      BootstrapMode mode = BootstrapMode::resample);

/// Arithmetic mean of the member distributions.
ClassProbs bag_predict_proba(const BaggedModel& model, const CrashRecord& record);

/// Adapts an SvmModel to records of a fixed schema.
class SvmClassifier : public ProbabilityClassifier {
 public:
  SvmClassifier(SvmModel model, std::shared_ptr<const Schema> schema);
  ClassProbs predict_proba(const CrashRecord& record) const override;
  const SvmModel& model() const { return model_; }
  const Schema& schema() const { return *schema_; }

 private:
  SvmModel model_;
  std::shared_ptr<const Schema> schema_;
};

class BagClassifier : public ProbabilityClassifier {
 public:
  explicit BagClassifier(BaggedModel model) : model_(std::move(model)) {}
  ClassProbs predict_proba(const CrashRecord& record) const override;
  const BaggedModel& model() const { return model_; }

 private:
  BaggedModel model_;
};

/// Heterogeneous averaging vote over probability-emitting members.
struct VotingModel {
  std::vector<std::unique_ptr<ProbabilityClassifier>> members;
};

/// Unweighted mean of the member distributions.
ClassProbs vote_predict_proba(const VotingModel& model, const CrashRecord& record);

/// Owns a VotingModel behind the ProbabilityClassifier interface.
class VotingClassifier : public ProbabilityClassifier {
 public:
  explicit VotingClassifier(VotingModel model) : model_(std::move(model)) {}
  ClassProbs predict_proba(const CrashRecord& record) const override {
    return vote_predict_proba(model_, record);
  }
  const VotingModel& model() const { return model_; }

 private:
  VotingModel model_;
};

/// Argmax of the averaged distribution; an exact tie goes to the majority
/// class (not fatal).
Fatality vote_predict(const VotingModel& model, const CrashRecord& record);

/// SMO + 100-tree bag voting ensemble fitted on `train` as given (callers
/// resample beforehand when they want to). Sub-seeds: smo and bag streams of
/// `seed`.
VotingModel fit_voting(const Dataset& train, const SmoParams& smo,
                       const KernelSpec& kernel, const TreeParams& tree, int n_bags,
                       std::uint64_t seed, int threads = 1);

/// The full training recipe: rebalance(train, plan), then fit_voting on the
/// result. The plan's own seed field is ignored in favor of `seed`.
VotingModel train_pipeline(const Dataset& train, const ResamplePlan& plan,
                           const SmoParams& smo, const KernelSpec& kernel,
                           const TreeParams& tree, int n_bags, std::uint64_t seed,
                           int threads = 1);

}  // namespace crashml
