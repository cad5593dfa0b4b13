#include "crashml/crossval.hpp"

#include <numeric>

#include "crashml/rng.hpp"
#include "parallel.hpp"

namespace crashml {

std::vector<int> stratified_folds(const Dataset& dataset, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("stratified_folds: need at least 2 folds");
  for (const Fatality f : {Fatality::not_fatal, Fatality::fatal}) {
    if (dataset.count(f) < static_cast<std::size_t>(folds)) {
      throw DegenerateDataError(
          "stratified_folds: a class has fewer rows than folds");
    }
  }
  Rng rng(derive_seed(seed, SeedStream::folds));
  std::vector<int> fold_of(dataset.size(), 0);
  for (const Fatality f : {Fatality::not_fatal, Fatality::fatal}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.row(i).label == f) rows.push_back(i);
    }
    rng.shuffle(rows);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      fold_of[rows[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

MetricsReport cross_validate(const Learner& learner, const Dataset& dataset, int folds,
                             const ResamplePlan& plan, std::uint64_t seed, int threads,
                             const FoldObserver* observer) {
  const std::vector<int> fold_of = stratified_folds(dataset, folds, seed);

  // Out-of-fold scores live in dataset row order; every row is validated
  // exactly once, so pooling is order-independent.
  std::vector<double> oof_scores(dataset.size(), 0.0);
  std::vector<std::int8_t> labels(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    labels[i] = static_cast<std::int8_t>(label_pm(dataset.row(i).label));
  }

  detail::parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t f) {
    std::vector<std::size_t> train_idx, valid_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      (fold_of[i] == static_cast<int>(f) ? valid_idx : train_idx).push_back(i);
    }
    const Dataset train_raw = dataset.subset(train_idx);
    const Dataset validation = dataset.subset(valid_idx);

    ResamplePlan fold_plan = plan;
    fold_plan.seed = derive_seed(seed, SeedStream::fold_train, f);
    const Dataset train = rebalance(train_raw, fold_plan);
    if (observer && observer->on_fold) {
      observer->on_fold(static_cast<int>(f), train, validation);
    }

    const auto model = learner(train, derive_seed(seed, SeedStream::fold_train, f));
    for (std::size_t v = 0; v < valid_idx.size(); ++v) {
      oof_scores[valid_idx[v]] = fatal_probability(model->predict_proba(validation.row(v)));
    }
  });

  return compute_report(oof_scores, labels);
}

}  // namespace crashml
