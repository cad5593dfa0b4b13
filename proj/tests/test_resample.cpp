#include <doctest.h>

#include <set>

#include "crashml/resample.hpp"
#include "test_support.hpp"

using namespace crashml;

namespace {

Dataset toy_minority(std::size_t n, std::uint64_t seed) {
  return crashml::testing::random_dataset(crashml::testing::toy_schema(), n, n, seed);
}

}  // namespace

TEST_CASE("smote percent 0 is a no-op") {
  const Dataset minority = toy_minority(10, 1);
  CHECK(smote(minority, 0.0, 5, 1).empty());
}

TEST_CASE("smote 100% doubles the minority") {
  const Dataset minority = toy_minority(50, 2);
  const auto synthetic = smote(minority, 100.0, 5, 7);
  CHECK(synthetic.size() == 50);
  for (const CrashRecord& rec : synthetic) CHECK(rec.label == Fatality::fatal);
}

TEST_CASE("smote count follows floor(percent/100 * m)") {
  const Dataset minority = toy_minority(7, 3);
  CHECK(smote(minority, 50.0, 3, 1).size() == 3);    // floor(3.5)
  CHECK(smote(minority, 250.0, 3, 1).size() == 17);  // floor(17.5)
}

TEST_CASE("smote on identical records reproduces them") {
  const auto schema = crashml::testing::toy_schema();
  std::vector<CrashRecord> rows;
  rows.push_back(crashml::testing::rec({1, 0, 2}, Fatality::fatal));
  rows.push_back(crashml::testing::rec({1, 0, 2}, Fatality::fatal));
  const Dataset minority(schema, std::move(rows));
  const auto synthetic = smote(minority, 200.0, 5, 99);
  REQUIRE(synthetic.size() == 4);
  for (const CrashRecord& rec : synthetic) {
    CHECK(rec.values == std::vector<std::uint16_t>{1, 0, 2});
  }
}

TEST_CASE("smote attribute provenance: every value comes from a real record") {
  const Dataset minority = toy_minority(30, 4);
  const auto synthetic = smote(minority, 300.0, 4, 5);
  const std::size_t n_attr = minority.schema().attribute_count();
  for (std::size_t a = 0; a < n_attr; ++a) {
    std::set<std::uint16_t> seen;
    for (const CrashRecord& rec : minority.rows()) seen.insert(rec.values[a]);
    for (const CrashRecord& rec : synthetic) {
      CHECK(seen.count(rec.values[a]) == 1);
    }
  }
}

TEST_CASE("smote rejects a single-record minority") {
  const Dataset minority = toy_minority(1, 5);
  CHECK_THROWS_AS(smote(minority, 100.0, 5, 1), DegenerateDataError);
}

TEST_CASE("smote is deterministic per seed") {
  const Dataset minority = toy_minority(25, 6);
  const auto a = smote(minority, 100.0, 5, 42);
  const auto b = smote(minority, 100.0, 5, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}

TEST_CASE("undersample basics") {
  CHECK(undersample(10, 10, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto a = undersample(100, 37, 5);
  const auto b = undersample(100, 37, 5);
  CHECK(a == b);
  CHECK(a.size() == 37);
  std::set<std::size_t> uniq(a.begin(), a.end());
  CHECK(uniq.size() == 37);
  for (const std::size_t i : a) CHECK(i < 100);
  CHECK_THROWS_AS(undersample(5, 6, 1), ArgumentError);
}

TEST_CASE("rebalance reaches 100 fatal and 488 majority from 950:50") {
  const Dataset train =
      crashml::testing::random_dataset(crashml::testing::toy_schema(), 1000, 50, 8);
  REQUIRE(train.count(Fatality::fatal) == 50);
  REQUIRE(train.count(Fatality::not_fatal) == 950);
  ResamplePlan plan;  // defaults: 100%, k=5, 0.83
  plan.seed = 17;
  const Dataset out = rebalance(train, plan);
  CHECK(out.count(Fatality::fatal) == 100);
  CHECK(out.count(Fatality::not_fatal) == 488);  // round(100 * 83/17)
}

TEST_CASE("rebalance keeps every original minority record") {
  const Dataset train =
      crashml::testing::random_dataset(crashml::testing::toy_schema(), 400, 20, 9);
  ResamplePlan plan;
  plan.seed = 3;
  const Dataset out = rebalance(train, plan);
  // The first 20 fatal rows of the output are the originals in order.
  std::vector<std::vector<std::uint16_t>> original;
  for (const CrashRecord& rec : train.rows()) {
    if (rec.label == Fatality::fatal) original.push_back(rec.values);
  }
  std::vector<std::vector<std::uint16_t>> kept;
  for (const CrashRecord& rec : out.rows()) {
    if (rec.label == Fatality::fatal && kept.size() < original.size()) {
      kept.push_back(rec.values);
    }
  }
  CHECK(kept == original);
}

TEST_CASE("rebalance minority fraction lands within one record of target") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Dataset train =
        crashml::testing::random_dataset(crashml::testing::toy_schema(), 760, 40, seed);
    ResamplePlan plan;
    plan.seed = seed;
    const Dataset out = rebalance(train, plan);
    const double frac = static_cast<double>(out.count(Fatality::fatal)) /
                        static_cast<double>(out.size());
    CHECK(frac > 0.17 - 1.0 / static_cast<double>(out.size()) - 1e-12);
    CHECK(frac < 0.17 + 1.0 / static_cast<double>(out.size()) + 1e-12);
  }
}

TEST_CASE("rebalance with a pass-through plan is the identity") {
  // 83 majority on 17 minority is already at target; no smote, no trimming.
  const auto schema = crashml::testing::toy_schema();
  std::vector<CrashRecord> rows;
  for (int i = 0; i < 83; ++i) rows.push_back(crashml::testing::rec({i % 3, i % 2, i % 3}, Fatality::not_fatal));
  for (int i = 0; i < 17; ++i) rows.push_back(crashml::testing::rec({i % 3, i % 2, i % 3}, Fatality::fatal));
  const Dataset train(schema, std::move(rows));
  ResamplePlan plan;
  plan.smote_percent = 0.0;
  plan.seed = 5;
  const Dataset out = rebalance(train, plan);
  REQUIRE(out.size() == train.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.row(i).values == train.row(i).values);
    CHECK(out.row(i).label == train.row(i).label);
  }
}

TEST_CASE("rebalance never fabricates majority rows") {
  // Minority-heavy input: target majority beyond what exists gets capped.
  const auto schema = crashml::testing::toy_schema();
  std::vector<CrashRecord> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(crashml::testing::rec({0, 0, 0}, Fatality::not_fatal));
  for (int i = 0; i < 40; ++i) rows.push_back(crashml::testing::rec({i % 3, i % 2, i % 3}, Fatality::fatal));
  const Dataset train(schema, std::move(rows));
  ResamplePlan plan;
  plan.seed = 2;
  const Dataset out = rebalance(train, plan);
  CHECK(out.count(Fatality::not_fatal) == 10);
  CHECK(out.count(Fatality::fatal) == 80);
}
