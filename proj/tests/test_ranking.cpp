#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crashml/crossval.hpp"
#include "crashml/ranking.hpp"
#include "test_support.hpp"

using namespace crashml;

TEST_CASE("chi-squared of the worked 2x2 table") {
  const std::vector<std::array<std::int64_t, 2>> table = {{10, 20}, {20, 10}};
  const Chi2Result r = chi_squared_table(table);
  // Expected counts are all 15: 4 * 25/15.
  CHECK(r.statistic == doctest::Approx(6.6667).epsilon(1e-3));
  CHECK(r.df == 1);
}

TEST_CASE("perfect balanced 2x2 association gives statistic = n") {
  const std::vector<std::array<std::int64_t, 2>> table = {{25, 0}, {0, 25}};
  const Chi2Result r = chi_squared_table(table);
  CHECK(r.statistic == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(r.df == 1);
}

TEST_CASE("proportional conditionals give a statistic of zero") {
  // Identical class distribution in every category: O = E.
  const std::vector<std::array<std::int64_t, 2>> table = {{10, 5}, {20, 10}, {40, 20}};
  const Chi2Result r = chi_squared_table(table);
  CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.df == 2);
}

TEST_CASE("chi-squared scales linearly when the table is duplicated") {
  const std::vector<std::array<std::int64_t, 2>> base = {{12, 4}, {7, 9}, {3, 15}};
  const Chi2Result one = chi_squared_table(base);
  for (const std::int64_t k : {2, 3, 5}) {
    std::vector<std::array<std::int64_t, 2>> scaled = base;
    for (auto& row : scaled) {
      row[0] *= k;
      row[1] *= k;
    }
    const Chi2Result r = chi_squared_table(scaled);
    CHECK(r.statistic ==
          doctest::Approx(static_cast<double>(k) * one.statistic).epsilon(1e-9));
    CHECK(r.df == one.df);
  }
}

TEST_CASE("chi-squared is invariant under category permutation") {
  std::vector<std::array<std::int64_t, 2>> table = {{12, 4}, {7, 9}, {3, 15}};
  const double original = chi_squared_table(table).statistic;
  std::sort(table.begin(), table.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  CHECK(chi_squared_table(table).statistic == doctest::Approx(original).epsilon(1e-12));
}

TEST_CASE("zero-expected cells are skipped, empty categories drop from df") {
  const std::vector<std::array<std::int64_t, 2>> table = {{10, 5}, {0, 0}, {5, 10}};
  const Chi2Result r = chi_squared_table(table);
  CHECK(r.df == 1);  // only two observed categories
  CHECK(std::isfinite(r.statistic));
}

TEST_CASE("constant attribute: statistic zero, df floored at one") {
  const std::vector<std::array<std::int64_t, 2>> table = {{30, 10}};
  const Chi2Result r = chi_squared_table(table);
  CHECK(r.statistic == 0.0);
  CHECK(r.df == 1);
  CHECK(r.statistic < chi2_critical(r.df, 0.05));  // never significant
}

TEST_CASE("chi2_critical reproduces standard table values") {
  CHECK(chi2_critical(1, 0.05) == doctest::Approx(3.841).epsilon(0.005));
  CHECK(std::fabs(chi2_critical(1, 0.05) - 3.841) < 0.02);
  CHECK(std::fabs(chi2_critical(10, 0.05) - 18.307) < 0.1);
  CHECK(std::fabs(chi2_critical(50, 0.5) - 50.0) < 1.0);
  CHECK_THROWS_AS(chi2_critical(0, 0.05), ArgumentError);
  CHECK_THROWS_AS(chi2_critical(1, 0.7), ArgumentError);
}

TEST_CASE("chi_squared on a dataset equals the table route") {
  const Dataset d =
      crashml::testing::random_dataset(crashml::testing::toy_schema(), 200, 60, 5);
  for (std::size_t a = 0; a < d.schema().attribute_count(); ++a) {
    const Chi2Result via_name = chi_squared(d, d.schema().inputs()[a].name);
    const Chi2Result via_table = chi_squared_table(contingency_table(d, a));
    CHECK(via_name.statistic == via_table.statistic);
    CHECK(via_name.df == via_table.df);
  }
  CHECK_THROWS_AS(chi_squared(d, "no_such_attribute"), ArgumentError);
}

TEST_CASE("rank_attributes ranks a planted dependency first") {
  DependencyPlan plan;
  plan.effects = {{"crash_type", "vehicle_pedestrian", 10.0}};
  const Dataset d = generate_synthetic(4000, 0.08, plan, 31);
  const auto ranking = rank_attributes(d, 10, 0.05, 3);
  REQUIRE(ranking.size() == 9);
  CHECK(ranking[0].name == "crash_type");
  CHECK(ranking[0].rank == 1);
  CHECK(ranking[0].significant);
  // Ranks are a permutation of 1..9.
  std::vector<int> ranks;
  for (const RankedAttribute& r : ranking) ranks.push_back(r.rank);
  std::sort(ranks.begin(), ranks.end());
  for (int i = 0; i < 9; ++i) CHECK(ranks[static_cast<std::size_t>(i)] == i + 1);
  // Sorted descending by mean statistic.
  for (std::size_t i = 1; i < ranking.size(); ++i) {
    CHECK(ranking[i - 1].chi2 >= ranking[i].chi2);
  }
}

TEST_CASE("mean-over-folds equals the arithmetic mean of per-fold statistics") {
  const Dataset d =
      crashml::testing::random_dataset(crashml::testing::toy_schema(), 300, 60, 7);
  const int folds = 6;
  const std::uint64_t seed = 11;
  const auto ranking = rank_attributes(d, folds, 0.05, seed);

  // Recompute the folds exactly as the library does.
  const std::vector<int> fold_of =
      stratified_folds(d, folds, derive_seed(seed, SeedStream::ranking));
  for (const RankedAttribute& r : ranking) {
    const auto attr = *d.schema().input_index(r.name);
    double mean = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (fold_of[i] != f) train_idx.push_back(i);
      }
      const Dataset train = d.subset(train_idx);
      mean += chi_squared_table(contingency_table(train, attr)).statistic;
    }
    mean /= folds;
    CHECK(r.chi2 == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("rank_attributes is deterministic in the seed") {
  const Dataset d = generate_synthetic(1500, 0.1, demo_dependency_plan(), 9);
  const auto a = rank_attributes(d, 5, 0.05, 42);
  const auto b = rank_attributes(d, 5, 0.05, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].chi2 == b[i].chi2);
    CHECK(a[i].significant == b[i].significant);
  }
}
