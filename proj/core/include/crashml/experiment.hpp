#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crashml/crossval.hpp"
#include "crashml/dataset.hpp"
#include "crashml/dtree.hpp"
#include "crashml/ranking.hpp"
#include "crashml/resample.hpp"
#include "crashml/svm.hpp"

namespace crashml {

enum class ModelChoice { smo, bag, vote };

ModelChoice model_choice_from_string(std::string_view name);
std::string_view to_string(ModelChoice choice);

/// Everything a run needs; one root seed governs all randomness.
struct RunConfig {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  int folds = 10;
  ResamplePlan resample;
  SmoParams smo;
  KernelSpec kernel;
  TreeParams tree;
  int n_bags = 100;
  int k_clusters = 10;
  double alpha = 0.05;
  ModelChoice model = ModelChoice::vote;
  int threads = 1;
  bool recluster = false;
};

/// Parse the JSON config file mirroring RunConfig; unknown keys are
/// rejected. Every field is optional and defaults as above.
RunConfig config_from_json(const std::string& text);

struct RunPaths {
  std::filesystem::path metrics_json;
  std::filesystem::path pr_csv;
  std::filesystem::path ranking_csv;
  std::filesystem::path ranking_json;
  std::filesystem::path model_json;
};

/// Derives the standard artifact names inside a directory.
RunPaths run_paths(const std::filesystem::path& out_dir);

struct RunResult {
  MetricsReport validation;  // pooled 10-fold CV on the training 80%
  MetricsReport test;        // single evaluation on the held-out 20%
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<RankedAttribute> ranking;  // computed on the training portion
};

/// The end-to-end protocol: stratified holdout split, optional re-clustering
/// of the spatial ids (fit on training coordinates only), cross-validated
/// validation metrics for the chosen model, retrain on the full training
/// portion with rebalancing, one evaluation on the untouched test portion,
/// attribute ranking on the training portion; writes the four artifacts.
/// `log`, when given, receives progress lines; `observer` sees the CV folds.
RunResult run_experiment(const Dataset& input, const RunConfig& config,
                         const RunPaths& paths, std::ostream* log = nullptr,
                         const FoldObserver* observer = nullptr);

/// The learner the config's model choice denotes, fitting on already
/// resampled data.
Learner make_learner(const RunConfig& config);

}  // namespace crashml
