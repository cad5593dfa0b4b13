#include "crashml/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crashml/rng.hpp"

namespace crashml {

namespace {

int hamming(const CrashRecord& a, const CrashRecord& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d += (a.values[i] != b.values[i]);
  return d;
}

// The k nearest minority neighbors of `source`, by (hamming, row index).
std::vector<std::size_t> nearest_neighbors(const Dataset& minority, std::size_t source,
                                           int k) {
  std::vector<std::size_t> idx;
  idx.reserve(minority.size() - 1);
  for (std::size_t j = 0; j < minority.size(); ++j) {
    if (j != source) idx.push_back(j);
  }
  const CrashRecord& src = minority.row(source);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const int da = hamming(src, minority.row(a));
    const int db = hamming(src, minority.row(b));
    return da != db ? da < db : a < b;
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

std::vector<CrashRecord> smote(const Dataset& minority, double percent, int k,
                               std::uint64_t seed) {
  if (percent < 0.0) throw ArgumentError("smote: percent must be >= 0");
  if (k < 1) throw ArgumentError("smote: k must be >= 1");
  if (percent == 0.0) return {};
  const std::size_t m = minority.size();
  if (m < 2) throw DegenerateDataError("smote: need at least 2 minority records");
  const std::size_t count =
      static_cast<std::size_t>(std::floor(percent / 100.0 * static_cast<double>(m)));
  if (count == 0) return {};
  k = std::min<int>(k, static_cast<int>(m) - 1);

  // Neighborhoods are computed once per source record.
  std::vector<std::vector<std::size_t>> neighborhoods(m);
  for (std::size_t s = 0; s < std::min(count, m); ++s) {
    neighborhoods[s] = nearest_neighbors(minority, s, k);
  }

  std::vector<CrashRecord> synthetic;
  synthetic.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t s = i % m;  // cycle through source records
    // Per-record sub-seed keeps the output independent of evaluation order.
    Rng rng(derive_seed(seed, SeedStream::smote, i));
    const std::vector<std::size_t>& nns = neighborhoods[s];
    const std::size_t neighbor = nns[rng.next_index(nns.size())];

    CrashRecord rec;
    rec.label = Fatality::fatal;
    rec.values.resize(minority.row(s).values.size());
    const CrashRecord& a = minority.row(s);
    const CrashRecord& b = minority.row(neighbor);
    for (std::size_t attr = 0; attr < rec.values.size(); ++attr) {
      rec.values[attr] = rng.next_bool() ? b.values[attr] : a.values[attr];
    }
    synthetic.push_back(std::move(rec));
  }
  return synthetic;
}

std::vector<std::size_t> undersample(std::size_t majority_count,
                                     std::size_t target_count, std::uint64_t seed) {
  if (target_count > majority_count) {
    throw ArgumentError("undersample: target_count exceeds available majority rows");
  }
  std::vector<std::size_t> idx(majority_count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, SeedStream::undersample));
  // Partial Fisher-Yates: the first target_count slots are a uniform sample.
  for (std::size_t i = 0; i < target_count && i + 1 < majority_count; ++i) {
    const std::size_t j = i + rng.next_index(majority_count - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(target_count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Dataset rebalance(const Dataset& train, const ResamplePlan& plan) {
  if (!(plan.target_majority_fraction > 0.5 && plan.target_majority_fraction < 1.0)) {
    throw ArgumentError("rebalance: target_majority_fraction must lie in (0.5, 1)");
  }
  if (train.count(Fatality::fatal) == 0 || train.count(Fatality::not_fatal) == 0) {
    throw DegenerateDataError("rebalance: both classes must be present");
  }

  std::vector<std::size_t> minority_rows, majority_rows;
  for (std::size_t i = 0; i < train.size(); ++i) {
    (train.row(i).label == Fatality::fatal ? minority_rows : majority_rows).push_back(i);
  }

  const Dataset minority = train.subset(minority_rows);
  std::vector<CrashRecord> synthetic;
  if (plan.smote_percent > 0.0) {
    synthetic = smote(minority, plan.smote_percent, plan.k_neighbors,
                      derive_seed(plan.seed, SeedStream::rebalance, 0));
  }

  const std::size_t minority_after = minority.size() + synthetic.size();
  const double maj = plan.target_majority_fraction;
  std::size_t majority_target = static_cast<std::size_t>(
      std::floor(static_cast<double>(minority_after) * maj / (1.0 - maj) + 0.5));
  majority_target = std::min(majority_target, majority_rows.size());

  const std::vector<std::size_t> kept = undersample(
      majority_rows.size(), majority_target, derive_seed(plan.seed, SeedStream::rebalance, 1));
  std::vector<bool> keep_majority(train.size(), false);
  for (const std::size_t j : kept) keep_majority[majority_rows[j]] = true;

  std::vector<CrashRecord> out;
  out.reserve(minority_after + majority_target);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const CrashRecord& rec = train.row(i);
    if (rec.label == Fatality::fatal || keep_majority[i]) out.push_back(rec);
  }
  for (CrashRecord& rec : synthetic) out.push_back(std::move(rec));
  return Dataset(train.schema_ptr(), std::move(out));
}

}  // namespace crashml
