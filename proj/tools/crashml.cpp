// crashml: fatal-crash analysis pipeline.
//
// Subcommands: synth, cluster, rebalance, run, rank, eval. Every command is
// deterministic given its seed; CRASHML_SEED is the fallback when no --seed
// is given.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crashml/ensemble.hpp"
#include "crashml/experiment.hpp"
#include "crashml/model_io.hpp"
#include "crashml/reports.hpp"
#include "crashml/spatial.hpp"

namespace {

using namespace crashml;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           std::optional<std::uint64_t> config_seed = std::nullopt) {
  if (flag_seed) return *flag_seed;
  if (config_seed) return *config_seed;
  if (const char* env = std::getenv("CRASHML_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

void print_class_counts(const Dataset& data) {
  std::cout << "rows: " << data.size() << " ("
            << data.count(Fatality::not_fatal) << " not_fatal, "
            << data.count(Fatality::fatal) << " fatal)\n";
}

int cmd_synth(std::size_t n, double rate, std::optional<std::uint64_t> seed,
              const std::string& plan_path, bool demo_plan,
              const std::filesystem::path& out) {
  DependencyPlan plan;
  if (demo_plan) plan = demo_dependency_plan();
  if (!plan_path.empty()) plan = plan_from_json(read_file(plan_path));
  const Dataset data = generate_synthetic(n, rate, plan, resolve_seed(seed));
  write_csv_file(data, out);
  print_class_counts(data);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_cluster(int k, std::optional<std::uint64_t> seed,
                const std::filesystem::path& in, const std::filesystem::path& out) {
  const Dataset data = parse_csv_file(in, lrap_schema());
  std::vector<GeoPoint> coords;
  for (const CrashRecord& rec : data.rows()) {
    if (rec.location) coords.push_back(*rec.location);
  }
  if (coords.empty()) {
    throw DegenerateDataError("cluster: no rows carry coordinates");
  }
  const KmeansResult km = kmeans_fit(coords, k, resolve_seed(seed));
  const auto attr = data.schema().input_index("spatial_cluster_id");
  if (!attr) throw ArgumentError("cluster: schema has no spatial_cluster_id attribute");

  std::vector<CrashRecord> rows = data.rows();
  std::size_t located = 0;
  for (CrashRecord& rec : rows) {
    if (!rec.location) continue;  // keeps its explicit cluster id
    rec.values[*attr] =
        static_cast<std::uint16_t>(kmeans_assign(km.model, *rec.location) - 1);
    ++located;
  }
  write_csv_file(Dataset(data.schema_ptr(), std::move(rows)), out);
  std::cout << "clustered " << located << " of " << data.size() << " rows into k=" << k
            << " (inertia " << km.model.inertia << ")\n";
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_rebalance(const ResamplePlan& plan, std::optional<std::uint64_t> seed,
                  const std::filesystem::path& in, const std::filesystem::path& out) {
  const Dataset data = parse_csv_file(in, lrap_schema());
  ResamplePlan seeded = plan;
  seeded.seed = resolve_seed(seed);
  const Dataset balanced = rebalance(data, seeded);
  write_csv_file(balanced, out);
  std::cout << "input: ";
  print_class_counts(data);
  std::cout << "output: ";
  print_class_counts(balanced);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_run(const std::filesystem::path& in, const std::filesystem::path& out_dir,
            RunConfig config) {
  const Dataset data = parse_csv_file(in, lrap_schema());
  std::filesystem::create_directories(out_dir);
  const RunPaths paths = run_paths(out_dir);
  const RunResult result = run_experiment(data, config, paths, &std::cout);
  std::cout << "validation kappa " << result.validation.kappa << " ("
            << to_string(result.validation.kappa_band) << "), test kappa "
            << result.test.kappa << " (" << to_string(result.test.kappa_band) << ")\n";
  return 0;
}

int cmd_rank(const std::filesystem::path& in, const std::filesystem::path& out_csv,
             const std::filesystem::path& out_json, int folds, double alpha,
             std::optional<std::uint64_t> seed) {
  const Dataset data = parse_csv_file(in, lrap_schema());
  const auto ranking = rank_attributes(data, folds, alpha, resolve_seed(seed));
  {
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + out_csv.string() + "'");
    write_ranking_csv(ranking, out);
  }
  {
    std::ofstream out(out_json, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + out_json.string() + "'");
    out << ranking_to_json(ranking);
  }
  for (const RankedAttribute& r : ranking) {
    std::cout << r.rank << ". " << r.name << " chi2=" << r.chi2
              << (r.significant ? " (significant)" : "") << "\n";
  }
  std::cout << "wrote " << out_csv.string() << " and " << out_json.string() << "\n";
  return 0;
}

int cmd_eval(const std::filesystem::path& model_path, const std::filesystem::path& in,
             const std::filesystem::path& metrics_path,
             const std::filesystem::path& pr_path) {
  const LoadedModel loaded = model_from_json(read_file(model_path));
  const Dataset data = parse_csv_file(in, loaded.schema);

  std::vector<double> scores(data.size());
  std::vector<std::int8_t> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    scores[i] = fatal_probability(vote_predict_proba(loaded.model, data.row(i)));
    labels[i] = static_cast<std::int8_t>(label_pm(data.row(i).label));
  }
  const MetricsReport report = compute_report(scores, labels);
  {
    std::ofstream out(metrics_path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + metrics_path.string() + "'");
    out << metrics_to_json(report);
  }
  {
    std::ofstream out(pr_path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + pr_path.string() + "'");
    write_pr_csv(pr_curve(scores, labels), out);
  }
  std::cout << "kappa " << report.kappa << " (" << to_string(report.kappa_band)
            << "), f1 " << report.f1 << ", auc_pr " << report.auc_pr << " (baseline "
            << report.pr_baseline << ")\n";
  std::cout << "wrote " << metrics_path.string() << " and " << pr_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crashml: hybrid-ensemble fatal crash analysis"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic crash CSV");
  std::size_t synth_n = 8482;
  double synth_rate = 0.05;
  std::optional<std::uint64_t> synth_seed;
  std::string synth_plan;
  bool synth_demo = false;
  std::filesystem::path synth_out;
  synth->add_option("--n", synth_n, "Number of rows");
  synth->add_option("--rate", synth_rate, "Fatality rate in (0,1)");
  synth->add_option("--seed", synth_seed, "Root seed");
  synth->add_option("--plan", synth_plan, "Planted-effect plan JSON file");
  synth->add_flag("--demo-plan", synth_demo, "Use the built-in planted-effect plan");
  synth->add_option("out", synth_out, "Output CSV path")->required();

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Refit spatial cluster ids with k-means");
  int cluster_k = 10;
  std::optional<std::uint64_t> cluster_seed;
  std::filesystem::path cluster_in, cluster_out;
  cluster->add_option("--k", cluster_k, "Number of clusters");
  cluster->add_option("--seed", cluster_seed, "Root seed");
  cluster->add_option("in", cluster_in, "Input CSV")->required();
  cluster->add_option("out", cluster_out, "Output CSV")->required();

  // rebalance
  auto* rebal = app.add_subcommand("rebalance", "SMOTE + undersample a training CSV");
  ResamplePlan rebal_plan;
  std::optional<std::uint64_t> rebal_seed;
  std::filesystem::path rebal_in, rebal_out;
  rebal->add_option("--smote-percent", rebal_plan.smote_percent, "SMOTE percentage");
  rebal->add_option("--k", rebal_plan.k_neighbors, "SMOTE neighbors");
  rebal->add_option("--majority-frac", rebal_plan.target_majority_fraction,
                    "Target majority fraction");
  rebal->add_option("--seed", rebal_seed, "Root seed");
  rebal->add_option("in", rebal_in, "Input CSV")->required();
  rebal->add_option("out", rebal_out, "Output CSV")->required();

  // run
  auto* run = app.add_subcommand("run", "Full pipeline: split, CV, train, test, rank");
  std::filesystem::path run_in, run_out_dir = ".";
  std::string run_config_path, run_model = "";
  std::optional<std::uint64_t> run_seed;
  std::optional<double> run_test_fraction;
  std::optional<int> run_folds, run_bags, run_threads;
  bool run_recluster = false;
  run->add_option("--config", run_config_path, "RunConfig JSON file");
  run->add_option("--seed", run_seed, "Root seed (overrides config)");
  run->add_option("--model", run_model, "smo|bag|vote (overrides config)");
  run->add_option("--test-fraction", run_test_fraction, "Holdout fraction");
  run->add_option("--folds", run_folds, "Cross-validation folds");
  run->add_option("--bags", run_bags, "Bagged tree count");
  run->add_option("--threads", run_threads, "Worker threads (1 = sequential)");
  run->add_flag("--recluster", run_recluster, "Refit spatial ids from coordinates");
  run->add_option("--out-dir", run_out_dir, "Artifact directory");
  run->add_option("in", run_in, "Input CSV")->required();

  // rank
  auto* rank = app.add_subcommand("rank", "Cross-validated chi-squared ranking");
  std::filesystem::path rank_in, rank_csv = "ranking.csv", rank_json = "ranking.json";
  int rank_folds = 10;
  double rank_alpha = 0.05;
  std::optional<std::uint64_t> rank_seed;
  rank->add_option("--folds", rank_folds, "Folds");
  rank->add_option("--alpha", rank_alpha, "Significance level");
  rank->add_option("--seed", rank_seed, "Root seed");
  rank->add_option("--out-csv", rank_csv, "Ranking CSV path");
  rank->add_option("--out-json", rank_json, "Ranking JSON path");
  rank->add_option("in", rank_in, "Input CSV")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score a saved model on a CSV");
  std::filesystem::path eval_model, eval_in, eval_metrics = "metrics.json",
                                             eval_pr = "pr_curve.csv";
  eval->add_option("--model", eval_model, "Model JSON")->required();
  eval->add_option("--metrics", eval_metrics, "Metrics JSON output");
  eval->add_option("--pr", eval_pr, "PR curve CSV output");
  eval->add_option("in", eval_in, "Input CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      return cmd_synth(synth_n, synth_rate, synth_seed, synth_plan, synth_demo, synth_out);
    }
    if (cluster->parsed()) {
      return cmd_cluster(cluster_k, cluster_seed, cluster_in, cluster_out);
    }
    if (rebal->parsed()) {
      return cmd_rebalance(rebal_plan, rebal_seed, rebal_in, rebal_out);
    }
    if (run->parsed()) {
      RunConfig config;
      if (!run_config_path.empty()) config = config_from_json(read_file(run_config_path));
      config.seed = resolve_seed(run_seed, run_config_path.empty()
                                               ? std::nullopt
                                               : std::optional<std::uint64_t>(config.seed));
      if (!run_model.empty()) config.model = model_choice_from_string(run_model);
      if (run_test_fraction) config.test_fraction = *run_test_fraction;
      if (run_folds) config.folds = *run_folds;
      if (run_bags) config.n_bags = *run_bags;
      if (run_threads) config.threads = *run_threads;
      if (run_recluster) config.recluster = true;
      return cmd_run(run_in, run_out_dir, config);
    }
    if (rank->parsed()) {
      return cmd_rank(rank_in, rank_csv, rank_json, rank_folds, rank_alpha, rank_seed);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_model, eval_in, eval_metrics, eval_pr);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << app.get_subcommands().front()->get_name() << "]: "
              << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
