#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crashml/dataset.hpp"

namespace crashml {

struct Chi2Result {
  double statistic = 0.0;
  int df = 1;
};

/// Pearson chi-squared of an observed categories-by-classes table. Cells
/// with zero expected count are skipped; df counts observed (nonzero)
/// rows and columns, floored at 1.
Chi2Result chi_squared_table(const std::vector<std::array<std::int64_t, 2>>& observed);

/// Contingency table of an attribute against the fatality class, one row
/// per domain category (observed or not).
std::vector<std::array<std::int64_t, 2>> contingency_table(const Dataset& dataset,
                                                           std::size_t attribute);

/// Chi-squared statistic of `attribute` against the class over the whole
/// dataset.
Chi2Result chi_squared(const Dataset& dataset, std::string_view attribute);

/// Critical value: the upper-alpha quantile of the chi-squared distribution
/// (Wilson-Hilferty seeded, Newton-polished; well inside 0.5% of tabulated
/// values for df <= 100).
double chi2_critical(int df, double alpha = 0.05);

struct RankedAttribute {
  std::string name;
  double chi2 = 0.0;      // mean statistic across folds
  int rank = 0;           // 1-based
  bool significant = false;
  int df = 1;             // observed categories on the full dataset, minus 1
  double critical = 0.0;  // chi2_critical(df, alpha)
};

/// Cross-validated attribute ranking: for every fold of a seeded stratified
/// partition, the statistic of each attribute is computed on the raw
/// (non-resampled) training portion; the per-attribute statistics are
/// averaged, sorted descending (ties by schema order) and flagged against
/// chi2_critical(df, alpha).
std::vector<RankedAttribute> rank_attributes(const Dataset& dataset, int folds = 10,
                                             double alpha = 0.05,
                                             std::uint64_t seed = 0);

}  // namespace crashml
