#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>

#include "crashml/dataset.hpp"

namespace crashml {

/// Class distribution: [0] = not fatal, [1] = fatal. Components sum to 1.
using ClassProbs = std::array<double, 2>;

constexpr double fatal_probability(const ClassProbs& p) { return p[1]; }

/// Anything that can turn a crash record into a class distribution.
class ProbabilityClassifier {
 public:
  virtual ~ProbabilityClassifier() = default;
  virtual ClassProbs predict_proba(const CrashRecord& record) const = 0;
};

/// A training procedure: fits a probability classifier on the given
/// (already resampled, when applicable) training data. The seed is the only
/// source of randomness.
using Learner = std::function<std::unique_ptr<ProbabilityClassifier>(
    const Dataset& train, std::uint64_t seed)>;

}  // namespace crashml
