#include "crashml/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "crashml/crossval.hpp"
#include "crashml/mathutil.hpp"
#include "crashml/rng.hpp"

namespace crashml {

Chi2Result chi_squared_table(const std::vector<std::array<std::int64_t, 2>>& observed) {
  std::int64_t total = 0;
  std::array<std::int64_t, 2> col_sum{0, 0};
  std::vector<std::int64_t> row_sum(observed.size(), 0);
  for (std::size_t r = 0; r < observed.size(); ++r) {
    for (int c = 0; c < 2; ++c) {
      if (observed[r][static_cast<std::size_t>(c)] < 0) {
        throw ArgumentError("chi_squared_table: negative count");
      }
      row_sum[r] += observed[r][static_cast<std::size_t>(c)];
      col_sum[static_cast<std::size_t>(c)] += observed[r][static_cast<std::size_t>(c)];
      total += observed[r][static_cast<std::size_t>(c)];
    }
  }

  Chi2Result result;
  if (total == 0) return result;

  int observed_rows = 0;
  double stat = 0.0;
  for (std::size_t r = 0; r < observed.size(); ++r) {
    if (row_sum[r] == 0) continue;
    ++observed_rows;
    for (int c = 0; c < 2; ++c) {
      const double expected = static_cast<double>(row_sum[r]) *
                              static_cast<double>(col_sum[static_cast<std::size_t>(c)]) /
                              static_cast<double>(total);
      if (expected <= 0.0) continue;
      const double diff =
          static_cast<double>(observed[r][static_cast<std::size_t>(c)]) - expected;
      stat += diff * diff / expected;
    }
  }
  const int observed_cols = (col_sum[0] > 0) + (col_sum[1] > 0);
  result.statistic = stat;
  result.df = std::max(1, (observed_rows - 1) * (observed_cols - 1));
  return result;
}

std::vector<std::array<std::int64_t, 2>> contingency_table(const Dataset& dataset,
                                                           std::size_t attribute) {
  const std::size_t domain = dataset.schema().inputs()[attribute].domain.size();
  std::vector<std::array<std::int64_t, 2>> table(domain, {0, 0});
  for (const CrashRecord& rec : dataset.rows()) {
    ++table[rec.values[attribute]][static_cast<std::size_t>(class_index(rec.label))];
  }
  return table;
}

Chi2Result chi_squared(const Dataset& dataset, std::string_view attribute) {
  const auto attr = dataset.schema().input_index(attribute);
  if (!attr) {
    throw ArgumentError("chi_squared: unknown attribute '" + std::string(attribute) + "'");
  }
  return chi_squared_table(contingency_table(dataset, *attr));
}

double chi2_critical(int df, double alpha) {
  if (df < 1) throw ArgumentError("chi2_critical: df must be >= 1");
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw ArgumentError("chi2_critical: alpha must lie in (0, 0.5]");
  }
  return chi_squared_upper_quantile(static_cast<double>(df), alpha);
}

std::vector<RankedAttribute> rank_attributes(const Dataset& dataset, int folds,
                                             double alpha, std::uint64_t seed) {
  const std::vector<int> fold_of =
      stratified_folds(dataset, folds, derive_seed(seed, SeedStream::ranking));
  const std::size_t n_attr = dataset.schema().attribute_count();

  // Mean statistic per attribute over the fold training portions (the raw
  // rows; resampling would make the statistic circular).
  std::vector<double> mean_stat(n_attr, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (fold_of[i] != f) train_idx.push_back(i);
    }
    const Dataset train = dataset.subset(train_idx);
    for (std::size_t a = 0; a < n_attr; ++a) {
      mean_stat[a] += chi_squared_table(contingency_table(train, a)).statistic;
    }
  }
  for (double& s : mean_stat) s /= static_cast<double>(folds);

  // df and critical value come from the categories observed on the full
  // dataset; unobserved categories carry no evidence.
  std::vector<RankedAttribute> out(n_attr);
  for (std::size_t a = 0; a < n_attr; ++a) {
    const Chi2Result full = chi_squared_table(contingency_table(dataset, a));
    out[a].name = dataset.schema().inputs()[a].name;
    out[a].chi2 = mean_stat[a];
    out[a].df = full.df;
    out[a].critical = chi2_critical(full.df, alpha);
    out[a].significant = mean_stat[a] > out[a].critical;
  }

  std::vector<std::size_t> order(n_attr);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out[a].chi2 > out[b].chi2;  // ties keep schema order
  });
  std::vector<RankedAttribute> ranked;
  ranked.reserve(n_attr);
  for (std::size_t r = 0; r < n_attr; ++r) {
    ranked.push_back(out[order[r]]);
    ranked.back().rank = static_cast<int>(r) + 1;
  }
  return ranked;
}

}  // namespace crashml
