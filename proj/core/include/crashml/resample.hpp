#pragma once

#include <cstdint>
#include <vector>

#include "crashml/dataset.hpp"

namespace crashml {

/// SMOTE-then-undersample configuration. Defaults: oversample the minority
/// class 100% using up to 5 nearest neighbors, then cut the majority class
/// down to an 83:17 distribution.
struct ResamplePlan {
  double smote_percent = 100.0;
  int k_neighbors = 5;
  double target_majority_fraction = 0.83;
  std::uint64_t seed = 0;
};

/// Synthetic minority records: floor(percent/100 * |minority|) of them.
/// Every attribute of a synthetic record is copied from either its source
/// record or one of the source's k nearest minority neighbors (Hamming
/// distance over the categorical attributes, ties by row index, source
/// excluded from its own neighborhood). k is capped at |minority| - 1.
/// Coordinates are not synthesized. Requires |minority| >= 2.
std::vector<CrashRecord> smote(const Dataset& minority, double percent, int k,
                               std::uint64_t seed);

/// Uniform subset of the majority rows without replacement, in original row
/// order. target_count must not exceed |majority|.
std::vector<std::size_t> undersample(std::size_t majority_count,
                                     std::size_t target_count, std::uint64_t seed);

/// SMOTE the minority class, then undersample the majority class to
/// round(|minority_after| * maj/(1-maj)) rows (capped at the available
/// majority; no majority record is ever fabricated and no minority record is
/// ever dropped). Retained rows keep their original order; synthetic records
/// are appended at the end.
Dataset rebalance(const Dataset& train, const ResamplePlan& plan);

}  // namespace crashml
