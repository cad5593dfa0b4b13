#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "crashml/experiment.hpp"

using namespace crashml;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("crashml_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig small_config() {
  RunConfig cfg;
  cfg.seed = 5;
  cfg.folds = 4;
  cfg.n_bags = 8;
  return cfg;
}

}  // namespace

TEST_CASE("config JSON mirrors RunConfig with overrides") {
  const std::string text = R"({
    "seed": 99,
    "test_fraction": 0.25,
    "folds": 5,
    "resample": {"smote_percent": 200, "k_neighbors": 3},
    "smo": {"c": 2.5, "tol": 0.002},
    "kernel": {"kind": "polynomial", "degree": 2, "coef0": 1.0},
    "tree": {"min_leaf": 4, "use_laplace": false},
    "n_bags": 25,
    "model": "bag",
    "threads": 2,
    "recluster": true
  })";
  const RunConfig cfg = config_from_json(text);
  CHECK(cfg.seed == 99);
  CHECK(cfg.test_fraction == 0.25);
  CHECK(cfg.folds == 5);
  CHECK(cfg.resample.smote_percent == 200);
  CHECK(cfg.resample.k_neighbors == 3);
  CHECK(cfg.resample.target_majority_fraction == 0.83);  // default survives
  CHECK(cfg.smo.c == 2.5);
  CHECK(cfg.kernel.kind == KernelSpec::Kind::polynomial);
  CHECK(cfg.kernel.degree == 2);
  CHECK(cfg.tree.min_leaf == 4);
  CHECK(cfg.tree.use_laplace == false);
  CHECK(cfg.n_bags == 25);
  CHECK(cfg.model == ModelChoice::bag);
  CHECK(cfg.threads == 2);
  CHECK(cfg.recluster == true);

  CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), ParseError);
  CHECK_THROWS_AS(config_from_json(R"({"smo": {"zzz": 1}})"), ParseError);
  CHECK_THROWS_AS(config_from_json("nope"), ParseError);
}

TEST_CASE("run_experiment produces all artifacts and sane reports") {
  const Dataset data = generate_synthetic(900, 0.1, demo_dependency_plan(), 21);
  const TempDir dir("run_smoke");
  const RunPaths paths = run_paths(dir.path);
  const RunResult result = run_experiment(data, small_config(), paths);

  CHECK(fs::exists(paths.metrics_json));
  CHECK(fs::exists(paths.pr_csv));
  CHECK(fs::exists(paths.ranking_csv));
  CHECK(fs::exists(paths.ranking_json));
  CHECK(fs::exists(paths.model_json));

  CHECK(result.ranking.size() == 9);
  CHECK(result.validation.pr_baseline > 0.0);
  CHECK(result.test.pr_baseline > 0.0);
  CHECK(result.train_indices.size() + result.test_indices.size() == data.size());

  const std::string metrics = slurp(paths.metrics_json);
  CHECK(metrics.find("\"validation\"") != std::string::npos);
  CHECK(metrics.find("\"test\"") != std::string::npos);
  CHECK(metrics.find("\"kappa_band\"") != std::string::npos);
  const std::string pr = slurp(paths.pr_csv);
  CHECK(pr.rfind("threshold,recall,precision\n", 0) == 0);
  const std::string ranking = slurp(paths.ranking_csv);
  CHECK(ranking.rfind("rank,attribute,chi2,df,critical,significant\n", 0) == 0);
}

TEST_CASE("identical configs give byte-identical artifacts, any thread count") {
  const Dataset data = generate_synthetic(700, 0.1, demo_dependency_plan(), 33);
  const TempDir dir_a("det_a"), dir_b("det_b"), dir_c("det_c");
  RunConfig cfg = small_config();
  cfg.threads = 1;
  run_experiment(data, cfg, run_paths(dir_a.path));
  run_experiment(data, cfg, run_paths(dir_b.path));
  cfg.threads = 4;
  run_experiment(data, cfg, run_paths(dir_c.path));

  for (const char* name :
       {"metrics.json", "pr_curve.csv", "ranking.csv", "ranking.json", "model.json"}) {
    CHECK(slurp(dir_a.path / name) == slurp(dir_b.path / name));
    CHECK(slurp(dir_a.path / name) == slurp(dir_c.path / name));
  }
}

TEST_CASE("the held-out test rows never reach training or resampling") {
  const Dataset data = generate_synthetic(600, 0.1, {}, 44);
  const RunConfig cfg = small_config();

  // Recompute the split the runner will use and pick a test-row canary.
  const SplitResult split = stratified_split(data, cfg.test_fraction, cfg.seed);
  REQUIRE(!split.test_indices.empty());

  // Observe every fold's rebalanced training data: none may exceed the
  // training portion's row budget or contain test rows. Identity is checked
  // via the (unique enough) lat/lon signature of the records.
  std::set<std::pair<double, double>> test_coords;
  for (const std::size_t i : split.test_indices) {
    const auto& loc = data.row(i).location;
    REQUIRE(loc.has_value());
    test_coords.insert({loc->lat, loc->lon});
  }

  FoldObserver observer;
  int folds_seen = 0;
  observer.on_fold = [&](int, const Dataset& train, const Dataset& validation) {
    ++folds_seen;
    for (const CrashRecord& r : train.rows()) {
      if (!r.location) continue;  // synthetic smote rows carry no location
      CHECK(test_coords.count({r.location->lat, r.location->lon}) == 0);
    }
    for (const CrashRecord& r : validation.rows()) {
      REQUIRE(r.location.has_value());
      CHECK(test_coords.count({r.location->lat, r.location->lon}) == 0);
    }
  };

  const TempDir dir("canary");
  const RunResult result =
      run_experiment(data, cfg, run_paths(dir.path), nullptr, &observer);
  CHECK(folds_seen == cfg.folds);
  CHECK(result.test_indices == split.test_indices);
}

TEST_CASE("every model choice runs end to end") {
  const Dataset data = generate_synthetic(500, 0.12, {}, 55);
  for (const ModelChoice choice : {ModelChoice::smo, ModelChoice::bag, ModelChoice::vote}) {
    RunConfig cfg = small_config();
    cfg.model = choice;
    cfg.n_bags = 5;
    const TempDir dir(std::string("model_") + std::string(to_string(choice)));
    const RunResult result = run_experiment(data, cfg, run_paths(dir.path));
    CHECK(std::isfinite(result.test.kappa));
    const std::string model_text = slurp(dir.path / "model.json");
    CHECK(model_text.find("\"kind\": \"" + std::string(to_string(choice)) + "\"") !=
          std::string::npos);
  }
}

TEST_CASE("recluster rewrites spatial ids from training coordinates only") {
  const Dataset data = generate_synthetic(400, 0.15, {}, 66);
  RunConfig cfg = small_config();
  cfg.recluster = true;
  cfg.k_clusters = 5;
  const TempDir dir("recluster");
  const RunResult result = run_experiment(data, cfg, run_paths(dir.path));
  CHECK(std::isfinite(result.test.kappa));
}
