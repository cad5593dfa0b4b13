#include "crashml/ensemble.hpp"

#include <numeric>

#include "crashml/rng.hpp"
#include "parallel.hpp"

namespace crashml {

std::vector<std::size_t> bootstrap_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = rng.next_index(n);
  return idx;
}

BaggedModel bag_train(const Dataset& train, int n_bags, const TreeParams& params,
                      std::uint64_t seed, int threads, BootstrapMode mode) {
  if (train.empty()) throw ArgumentError("bag_train: dataset is empty");
  if (n_bags < 1) throw ArgumentError("bag_train: n_bags must be >= 1");

  BaggedModel model;
  model.params = params;
  model.members.resize(static_cast<std::size_t>(n_bags));
  model.member_seeds.resize(static_cast<std::size_t>(n_bags));
  for (int m = 0; m < n_bags; ++m) {
    model.member_seeds[static_cast<std::size_t>(m)] =
        derive_seed(seed, SeedStream::bag, static_cast<std::uint64_t>(m));
  }

  detail::parallel_for(static_cast<std::size_t>(n_bags), threads, [&](std::size_t m) {
    if (mode == BootstrapMode::identity) {
      model.members[m] = train_tree(train, params);
      return;
    }
    Rng rng(model.member_seeds[m]);
    const std::vector<std::size_t> sample = bootstrap_indices(train.size(), rng);
    model.members[m] = train_tree(train.subset(sample), params);
  });
  return model;
}

ClassProbs bag_predict_proba(const BaggedModel& model, const CrashRecord& record) {
  if (model.members.empty()) throw StateError("bag_predict_proba: empty bag");
  ClassProbs sum{0.0, 0.0};
  for (const DecisionTree& tree : model.members) {
    const ClassProbs p = tree_predict_proba(tree, record);
    sum[0] += p[0];
    sum[1] += p[1];
  }
  const double n = static_cast<double>(model.members.size());
  return {sum[0] / n, sum[1] / n};
}

SvmClassifier::SvmClassifier(SvmModel model, std::shared_ptr<const Schema> schema)
    : model_(std::move(model)), schema_(std::move(schema)) {
  if (!schema_) throw ArgumentError("SvmClassifier: missing schema");
  if (schema_->one_hot_width() != model_.n_features) {
    throw ArgumentError("SvmClassifier: schema width does not match the model");
  }
}

ClassProbs SvmClassifier::predict_proba(const CrashRecord& record) const {
  if (model_.category_stride == schema_->attribute_count() &&
      model_.category_stride > 0) {
    return svm_predict_proba(model_, std::span<const std::uint16_t>(record.values));
  }
  const std::vector<double> x = encode_record(*schema_, record);
  return svm_predict_proba(model_, std::span<const double>(x));
}

ClassProbs BagClassifier::predict_proba(const CrashRecord& record) const {
  return bag_predict_proba(model_, record);
}

ClassProbs vote_predict_proba(const VotingModel& model, const CrashRecord& record) {
  if (model.members.empty()) throw StateError("vote_predict_proba: no members");
  ClassProbs sum{0.0, 0.0};
  for (const auto& member : model.members) {
    const ClassProbs p = member->predict_proba(record);
    sum[0] += p[0];
    sum[1] += p[1];
  }
  const double n = static_cast<double>(model.members.size());
  return {sum[0] / n, sum[1] / n};
}

Fatality vote_predict(const VotingModel& model, const CrashRecord& record) {
  const ClassProbs p = vote_predict_proba(model, record);
  return p[1] > p[0] ? Fatality::fatal : Fatality::not_fatal;
}

VotingModel fit_voting(const Dataset& train, const SmoParams& smo,
                       const KernelSpec& kernel, const TreeParams& tree, int n_bags,
                       std::uint64_t seed, int threads) {
  // train_smo and bag_train namespace the shared seed into their own
  // streams, so passing it straight through cannot collide.
  const FeatureMatrix features = one_hot_encode(train);
  SvmModel svm = train_calibrated_smo(features, smo, kernel, seed);
  BaggedModel bag = bag_train(train, n_bags, tree, seed, threads);

  VotingModel model;
  model.members.push_back(
      std::make_unique<SvmClassifier>(std::move(svm), train.schema_ptr()));
  model.members.push_back(std::make_unique<BagClassifier>(std::move(bag)));
  return model;
}

VotingModel train_pipeline(const Dataset& train, const ResamplePlan& plan,
                           const SmoParams& smo, const KernelSpec& kernel,
                           const TreeParams& tree, int n_bags, std::uint64_t seed,
                           int threads) {
  ResamplePlan seeded = plan;
  seeded.seed = seed;  // rebalance namespaces it into its own streams
  const Dataset balanced = rebalance(train, seeded);
  return fit_voting(balanced, smo, kernel, tree, n_bags, seed, threads);
}

}  // namespace crashml
