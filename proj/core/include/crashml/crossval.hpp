#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "crashml/classifier.hpp"
#include "crashml/dataset.hpp"
#include "crashml/metrics.hpp"
#include "crashml/resample.hpp"

namespace crashml {

/// Seeded stratified fold assignment: returns fold_of_row in [0, folds).
/// Within every class the fold sizes differ by at most one; the folds
/// partition the dataset. Requires each class to have at least `folds` rows.
std::vector<int> stratified_folds(const Dataset& dataset, int folds,
                                  std::uint64_t seed);

/// Test-only observation point: sees each fold's resampled training data and
/// untouched validation data.
struct FoldObserver {
  std::function<void(int fold, const Dataset& rebalanced_train, const Dataset& validation)>
      on_fold;
};

/// K-fold cross-validation with leak-free resampling: per fold, `plan` is
/// applied to the training portion only, the learner is fitted on the result
/// (sub-seed fold_train stream of `seed`, indexed by fold) and scored on the
/// untouched validation fold. Metrics are computed once over the pooled
/// out-of-fold predictions, assembled in dataset row order so the result is
/// independent of fold scheduling.
MetricsReport cross_validate(const Learner& learner, const Dataset& dataset, int folds,
                             const ResamplePlan& plan, std::uint64_t seed,
                             int threads = 1, const FoldObserver* observer = nullptr);

}  // namespace crashml
