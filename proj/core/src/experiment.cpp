#include "crashml/experiment.hpp"

#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "crashml/ensemble.hpp"
#include "crashml/model_io.hpp"
#include "crashml/reports.hpp"
#include "crashml/rng.hpp"
#include "crashml/spatial.hpp"

namespace crashml {

ModelChoice model_choice_from_string(std::string_view name) {
  if (name == "smo") return ModelChoice::smo;
  if (name == "bag") return ModelChoice::bag;
  if (name == "vote") return ModelChoice::vote;
  throw ArgumentError("unknown model '" + std::string(name) + "' (expected smo|bag|vote)");
}

std::string_view to_string(ModelChoice choice) {
  switch (choice) {
    case ModelChoice::smo: return "smo";
    case ModelChoice::bag: return "bag";
    case ModelChoice::vote: return "vote";
  }
  return "vote";
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }

  RunConfig cfg;
  const auto take = [&](nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return nlohmann::json();
    nlohmann::json v = *it;
    obj.erase(it);
    return v;
  };
  const auto reject_unknown = [](const nlohmann::json& obj, const char* where) {
    if (!obj.empty()) {
      throw ParseError(std::string("config JSON: unknown key '") +
                       obj.begin().key() + "' in " + where);
    }
  };

  nlohmann::json root = doc;
  if (auto v = take(root, "seed"); !v.is_null()) cfg.seed = v.get<std::uint64_t>();
  if (auto v = take(root, "test_fraction"); !v.is_null()) cfg.test_fraction = v.get<double>();
  if (auto v = take(root, "folds"); !v.is_null()) cfg.folds = v.get<int>();
  if (auto v = take(root, "n_bags"); !v.is_null()) cfg.n_bags = v.get<int>();
  if (auto v = take(root, "k_clusters"); !v.is_null()) cfg.k_clusters = v.get<int>();
  if (auto v = take(root, "alpha"); !v.is_null()) cfg.alpha = v.get<double>();
  if (auto v = take(root, "model"); !v.is_null()) {
    cfg.model = model_choice_from_string(v.get<std::string>());
  }
  if (auto v = take(root, "threads"); !v.is_null()) cfg.threads = v.get<int>();
  if (auto v = take(root, "recluster"); !v.is_null()) cfg.recluster = v.get<bool>();

  if (auto v = take(root, "resample"); !v.is_null()) {
    if (auto s = take(v, "smote_percent"); !s.is_null()) cfg.resample.smote_percent = s.get<double>();
    if (auto s = take(v, "k_neighbors"); !s.is_null()) cfg.resample.k_neighbors = s.get<int>();
    if (auto s = take(v, "target_majority_fraction"); !s.is_null()) {
      cfg.resample.target_majority_fraction = s.get<double>();
    }
    reject_unknown(v, "resample");
  }
  if (auto v = take(root, "smo"); !v.is_null()) {
    if (auto s = take(v, "c"); !s.is_null()) cfg.smo.c = s.get<double>();
    if (auto s = take(v, "tol"); !s.is_null()) cfg.smo.tol = s.get<double>();
    if (auto s = take(v, "max_passes"); !s.is_null()) cfg.smo.max_passes = s.get<int>();
    if (auto s = take(v, "max_updates"); !s.is_null()) cfg.smo.max_updates = s.get<long>();
    reject_unknown(v, "smo");
  }
  if (auto v = take(root, "kernel"); !v.is_null()) {
    if (auto s = take(v, "kind"); !s.is_null()) {
      const std::string kind = s.get<std::string>();
      if (kind == "linear") {
        cfg.kernel.kind = KernelSpec::Kind::linear;
      } else if (kind == "polynomial") {
        cfg.kernel.kind = KernelSpec::Kind::polynomial;
      } else {
        throw ParseError("config JSON: unknown kernel kind '" + kind + "'");
      }
    }
    if (auto s = take(v, "degree"); !s.is_null()) cfg.kernel.degree = s.get<int>();
    if (auto s = take(v, "coef0"); !s.is_null()) cfg.kernel.coef0 = s.get<double>();
    reject_unknown(v, "kernel");
  }
  if (auto v = take(root, "tree"); !v.is_null()) {
    if (auto s = take(v, "min_leaf"); !s.is_null()) cfg.tree.min_leaf = s.get<int>();
    if (auto s = take(v, "pruning_confidence"); !s.is_null()) {
      cfg.tree.pruning_confidence = s.get<double>();
    }
    if (auto s = take(v, "use_laplace"); !s.is_null()) cfg.tree.use_laplace = s.get<bool>();
    reject_unknown(v, "tree");
  }
  reject_unknown(root, "config");
  return cfg;
}

RunPaths run_paths(const std::filesystem::path& out_dir) {
  RunPaths paths;
  paths.metrics_json = out_dir / "metrics.json";
  paths.pr_csv = out_dir / "pr_curve.csv";
  paths.ranking_csv = out_dir / "ranking.csv";
  paths.ranking_json = out_dir / "ranking.json";
  paths.model_json = out_dir / "model.json";
  return paths;
}

Learner make_learner(const RunConfig& config) {
  // Learners fit on data the CV harness has already resampled.
  switch (config.model) {
    case ModelChoice::smo:
      return [cfg = config](const Dataset& train, std::uint64_t seed)
                 -> std::unique_ptr<ProbabilityClassifier> {
        SvmModel svm =
            train_calibrated_smo(one_hot_encode(train), cfg.smo, cfg.kernel, seed);
        VotingModel model;
        model.members.push_back(
            std::make_unique<SvmClassifier>(std::move(svm), train.schema_ptr()));
        return std::make_unique<VotingClassifier>(std::move(model));
      };
    case ModelChoice::bag:
      return [cfg = config](const Dataset& train, std::uint64_t seed)
                 -> std::unique_ptr<ProbabilityClassifier> {
        VotingModel model;
        model.members.push_back(std::make_unique<BagClassifier>(
            bag_train(train, cfg.n_bags, cfg.tree, seed, cfg.threads)));
        return std::make_unique<VotingClassifier>(std::move(model));
      };
    case ModelChoice::vote:
    default:
      return [cfg = config](const Dataset& train, std::uint64_t seed)
                 -> std::unique_ptr<ProbabilityClassifier> {
        return std::make_unique<VotingClassifier>(fit_voting(
            train, cfg.smo, cfg.kernel, cfg.tree, cfg.n_bags, seed, cfg.threads));
      };
  }
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace

RunResult run_experiment(const Dataset& input, const RunConfig& config,
                         const RunPaths& paths, std::ostream* log,
                         const FoldObserver* observer) {
  const auto note = [&](const std::string& line) {
    if (log) *log << line << '\n';
  };

  // Stage 1: holdout split.
  SplitResult split = stratified_split(input, config.test_fraction, config.seed);
  note("split: " + std::to_string(split.train.size()) + " train / " +
       std::to_string(split.test.size()) + " test rows");

  // Stage 2 (optional): refit the spatial cluster ids. The model is fitted
  // on training coordinates only and then applied everywhere.
  if (config.recluster) {
    std::vector<GeoPoint> coords;
    for (const CrashRecord& rec : split.train.rows()) {
      if (rec.location) coords.push_back(*rec.location);
    }
    if (coords.size() < static_cast<std::size_t>(config.k_clusters)) {
      throw DegenerateDataError("recluster: too few located training rows");
    }
    const KmeansResult km = kmeans_fit(coords, config.k_clusters, config.seed);
    const auto cluster_attr = input.schema().input_index("spatial_cluster_id");
    if (!cluster_attr) {
      throw ArgumentError("recluster: schema has no spatial_cluster_id attribute");
    }
    const auto reassign = [&](const Dataset& d) {
      std::vector<CrashRecord> rows = d.rows();
      for (CrashRecord& rec : rows) {
        if (rec.location) {
          rec.values[*cluster_attr] =
              static_cast<std::uint16_t>(kmeans_assign(km.model, *rec.location) - 1);
        }
      }
      return Dataset(d.schema_ptr(), std::move(rows));
    };
    split.train = reassign(split.train);
    split.test = reassign(split.test);
    note("recluster: k=" + std::to_string(config.k_clusters) +
         " fitted on training coordinates");
  }

  RunResult result;
  result.train_indices = split.train_indices;
  result.test_indices = split.test_indices;

  // Stage 3: cross-validated validation metrics on the training portion.
  result.validation =
      cross_validate(make_learner(config), split.train, config.folds, config.resample,
                     config.seed, config.threads, observer);
  note("validation (pooled " + std::to_string(config.folds) +
       "-fold): kappa=" + std::to_string(result.validation.kappa) + " (" +
       std::string(to_string(result.validation.kappa_band)) + ")");

  // Stage 4: retrain on the whole training portion, rebalanced.
  ResamplePlan plan = config.resample;
  plan.seed = config.seed;
  const Dataset balanced = rebalance(split.train, plan);
  const auto final_model = make_learner(config)(balanced, config.seed);

  // Stage 5: single evaluation on the untouched test portion.
  std::vector<double> scores(split.test.size());
  std::vector<std::int8_t> labels(split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    scores[i] = fatal_probability(final_model->predict_proba(split.test.row(i)));
    labels[i] = static_cast<std::int8_t>(label_pm(split.test.row(i).label));
  }
  result.test = compute_report(scores, labels);
  note("test: kappa=" + std::to_string(result.test.kappa) + " (" +
       std::string(to_string(result.test.kappa_band)) + ")" +
       ", f1=" + std::to_string(result.test.f1) +
       ", auc_pr=" + std::to_string(result.test.auc_pr));

  // Stage 6: attribute ranking on the training portion.
  result.ranking =
      rank_attributes(split.train, config.folds, config.alpha, config.seed);

  // Stage 7: artifacts.
  write_text_file(paths.metrics_json, run_metrics_to_json(result.validation, result.test));
  {
    std::ofstream out(paths.pr_csv, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + paths.pr_csv.string() + "'");
    write_pr_csv(pr_curve(scores, labels), out);
  }
  {
    std::ofstream out(paths.ranking_csv, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + paths.ranking_csv.string() + "'");
    write_ranking_csv(result.ranking, out);
  }
  write_text_file(paths.ranking_json, ranking_to_json(result.ranking));
  const auto* voting = dynamic_cast<const VotingClassifier*>(final_model.get());
  write_text_file(paths.model_json, model_to_json(voting->model(), input.schema(),
                                                  to_string(config.model)));
  note("artifacts written");
  return result;
}

}  // namespace crashml
