#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "crashml/crossval.hpp"
#include "test_support.hpp"

using namespace crashml;
using crashml::testing::toy_schema;

namespace {

// A learner that predicts a constant probability.
Learner constant_learner(double p_fatal) {
  return [p_fatal](const Dataset&, std::uint64_t) {
    class Constant : public ProbabilityClassifier {
     public:
      explicit Constant(double p) : p_(p) {}
      ClassProbs predict_proba(const CrashRecord&) const override {
        return {1.0 - p_, p_};
      }

     private:
      double p_;
    };
    return std::unique_ptr<ProbabilityClassifier>(new Constant(p_fatal));
  };
}

// Memorizes its training rows; out-of-fold rows score at the base rate.
class Memorizer : public ProbabilityClassifier {
 public:
  explicit Memorizer(const Dataset& train) {
    for (const CrashRecord& r : train.rows()) {
      seen_[r.values] = (r.label == Fatality::fatal);
    }
  }
  ClassProbs predict_proba(const CrashRecord& r) const override {
    const auto it = seen_.find(r.values);
    if (it == seen_.end()) return {0.5, 0.5};
    return it->second ? ClassProbs{0.05, 0.95} : ClassProbs{0.95, 0.05};
  }

 private:
  std::map<std::vector<std::uint16_t>, bool> seen_;
};

}  // namespace

TEST_CASE("stratified folds partition the dataset with balanced classes") {
  const Dataset d = crashml::testing::random_dataset(toy_schema(), 157, 43, 3);
  const std::vector<int> fold_of = stratified_folds(d, 10, 5);
  REQUIRE(fold_of.size() == d.size());

  std::vector<std::size_t> fatal_per(10, 0), total_per(10, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    REQUIRE(fold_of[i] >= 0);
    REQUIRE(fold_of[i] < 10);
    ++total_per[static_cast<std::size_t>(fold_of[i])];
    if (d.row(i).label == Fatality::fatal) {
      ++fatal_per[static_cast<std::size_t>(fold_of[i])];
    }
  }
  // Per class, fold sizes differ by at most one.
  const auto [fmin, fmax] = std::minmax_element(fatal_per.begin(), fatal_per.end());
  CHECK(*fmax - *fmin <= 1);
  std::size_t sum = 0;
  for (const std::size_t t : total_per) sum += t;
  CHECK(sum == d.size());
}

TEST_CASE("folds reject classes smaller than the fold count") {
  const Dataset d = crashml::testing::random_dataset(toy_schema(), 50, 4, 9);
  CHECK_THROWS_AS(stratified_folds(d, 10, 1), DegenerateDataError);
}

TEST_CASE("every record is validated exactly once") {
  const Dataset d = crashml::testing::random_dataset(toy_schema(), 80, 20, 11);
  FoldObserver observer;
  std::size_t validated_total = 0;
  observer.on_fold = [&](int, const Dataset&, const Dataset& validation) {
    validated_total += validation.size();
  };
  cross_validate(constant_learner(0.3), d, 8, ResamplePlan{}, 2, 1, &observer);
  CHECK(validated_total == d.size());
}

TEST_CASE("resampling never touches the validation fold") {
  // Give one fatal record a unique signature; whenever it sits in the
  // validation fold, the rebalanced training data must not contain it.
  const auto schema = toy_schema();
  std::vector<CrashRecord> rows;
  Rng rng(13);
  for (int i = 0; i < 120; ++i) {
    CrashRecord r = crashml::testing::rec({static_cast<int>(rng.next_below(2)),
                                           static_cast<int>(rng.next_below(2)),
                                           static_cast<int>(rng.next_below(2))},
                                          i % 6 == 0 ? Fatality::fatal
                                                     : Fatality::not_fatal);
    rows.push_back(r);
  }
  // The canary: category 2 of attributes 0 and 2 appears nowhere else.
  rows.push_back(crashml::testing::rec({2, 1, 2}, Fatality::fatal));
  const Dataset d(schema, std::move(rows));

  bool canary_validated = false;
  FoldObserver observer;
  observer.on_fold = [&](int, const Dataset& train, const Dataset& validation) {
    bool canary_here = false;
    for (const CrashRecord& r : validation.rows()) {
      if (r.values == std::vector<std::uint16_t>{2, 1, 2}) canary_here = true;
    }
    if (!canary_here) return;
    canary_validated = true;
    for (const CrashRecord& r : train.rows()) {
      // Per-attribute provenance: no training row (real or synthetic) may
      // use the canary's unique categories.
      CHECK(r.values[0] != 2);
      CHECK(r.values[2] != 2);
    }
  };
  cross_validate(constant_learner(0.5), d, 5, ResamplePlan{}, 3, 1, &observer);
  CHECK(canary_validated);
}

TEST_CASE("a memorizing learner generalizes worse than it trains") {
  // Noisy labels: out-of-fold accuracy of a memorizer must fall below its
  // (perfect) training accuracy.
  const Dataset d = crashml::testing::random_dataset(toy_schema(), 150, 75, 17);
  const Learner memorizer = [](const Dataset& train, std::uint64_t) {
    return std::unique_ptr<ProbabilityClassifier>(new Memorizer(train));
  };
  const MetricsReport r = cross_validate(memorizer, d, 5, ResamplePlan{}, 7);
  CHECK(r.accuracy < 1.0);
}

TEST_CASE("cross_validate is deterministic and thread-count independent") {
  const Dataset d = crashml::testing::random_dataset(toy_schema(), 140, 35, 19);
  const Learner learner = [](const Dataset& train, std::uint64_t seed) {
    // A trivially data-dependent learner: probability = minority share.
    const double p = static_cast<double>(train.count(Fatality::fatal)) /
                     static_cast<double>(train.size());
    (void)seed;
    return constant_learner(p)(train, seed);
  };
  const MetricsReport a = cross_validate(learner, d, 7, ResamplePlan{}, 23, 1);
  const MetricsReport b = cross_validate(learner, d, 7, ResamplePlan{}, 23, 4);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.kappa == b.kappa);
  CHECK(a.auc_pr == b.auc_pr);
  CHECK(a.auc_roc == b.auc_roc);
}
