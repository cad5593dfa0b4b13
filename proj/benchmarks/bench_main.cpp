#include <benchmark/benchmark.h>

#include "crashml/dtree.hpp"
#include "crashml/ensemble.hpp"
#include "crashml/metrics.hpp"
#include "crashml/ranking.hpp"
#include "crashml/resample.hpp"
#include "crashml/rng.hpp"
#include "crashml/spatial.hpp"
#include "crashml/svm.hpp"

namespace {

using namespace crashml;

Dataset sized_dataset(std::size_t n) {
  return generate_synthetic(n, 0.17, demo_dependency_plan(), 1234);
}

void BM_Smote(benchmark::State& state) {
  const Dataset data = sized_dataset(static_cast<std::size_t>(state.range(0)));
  std::vector<std::size_t> fatal_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.row(i).label == Fatality::fatal) fatal_rows.push_back(i);
  }
  const Dataset minority = data.subset(fatal_rows);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smote(minority, 100.0, 5, 7));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Smote)->RangeMultiplier(2)->Range(512, 4096)->Complexity();

void BM_Rebalance(benchmark::State& state) {
  const Dataset data = generate_synthetic(static_cast<std::size_t>(state.range(0)),
                                          0.05, demo_dependency_plan(), 5);
  ResamplePlan plan;
  plan.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rebalance(data, plan));
  }
}
BENCHMARK(BM_Rebalance)->Arg(2000)->Arg(8482);

void BM_KmeansFit(benchmark::State& state) {
  Rng rng(9);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < state.range(0); ++i) {
    pts.push_back({33.0 + 1.7 * rng.next_double(), 35.1 + 1.5 * rng.next_double()});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans_fit(pts, 10, 42));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KmeansFit)->RangeMultiplier(4)->Range(512, 8192)->Complexity();

void BM_TrainTree(benchmark::State& state) {
  const Dataset data = sized_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_tree(data, {}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainTree)->RangeMultiplier(2)->Range(512, 4096)->Complexity();

void BM_TrainSmo(benchmark::State& state) {
  const Dataset data = sized_dataset(static_cast<std::size_t>(state.range(0)));
  const FeatureMatrix fm = one_hot_encode(data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_smo(fm, {}, {}, 11));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainSmo)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

void BM_BagTrain100(benchmark::State& state) {
  const Dataset data = sized_dataset(1024);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bag_train(data, 100, {}, 3));
  }
}
BENCHMARK(BM_BagTrain100);

void BM_AucPr(benchmark::State& state) {
  Rng rng(21);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<std::int8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.next_double();
    labels[i] = rng.next_below(20) == 0 ? +1 : -1;
  }
  labels[0] = +1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(auc_pr(pr_curve(scores, labels)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucPr)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

void BM_RankAttributes(benchmark::State& state) {
  const Dataset data = sized_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_attributes(data, 10, 0.05, 5));
  }
}
BENCHMARK(BM_RankAttributes)->Arg(2048)->Arg(8192);

}  // namespace

BENCHMARK_MAIN();
