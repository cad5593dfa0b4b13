#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crashml/classifier.hpp"
#include "crashml/dataset.hpp"

namespace crashml {

struct KernelSpec {
  enum class Kind { linear, polynomial };
  Kind kind = Kind::linear;
  int degree = 1;      // polynomial only
  double coef0 = 0.0;  // polynomial only
};

struct SmoParams {
  double c = 1.0;
  double tol = 1e-3;
  int max_passes = 10;              // consecutive violation-free sweeps required
  long max_updates = 10'000'000;    // safety bound on accepted pair updates
};

struct PlattCalibration {
  double a = 0.0;
  double b = 0.0;
};

/// Trained SVM: support vectors with their dual coefficients, bias, kernel,
/// and (once fitted) the sigmoid that turns margins into probabilities.
struct SvmModel {
  std::size_t n_features = 0;
  KernelSpec kernel;
  double c = 1.0;
  double bias = 0.0;
  std::vector<double> sv_alpha;             // nonzero dual coefficients
  std::vector<std::int8_t> sv_label;        // +/-1 per support vector
  std::vector<double> sv_rows;              // dense rows, support_count x n_features
  std::vector<std::uint16_t> sv_categories; // compact one-hot rows (may be empty)
  std::size_t category_stride = 0;          // attributes per compact row
  std::optional<PlattCalibration> calibration;
  bool converged = true;

  std::size_t support_count() const { return sv_alpha.size(); }
  std::span<const double> sv_row(std::size_t i) const {
    return {sv_rows.data() + i * n_features, n_features};
  }
};

struct SmoResult {
  SvmModel model;
  std::vector<double> alphas;           // per training row (support and not)
  std::vector<double> train_decisions;  // f(x_i) for every training row
  int sweeps = 0;
  long updates = 0;
};

/// Sequential minimal optimization on the soft-margin dual. Each step picks
/// a KKT-violating row, pairs it with the row maximizing |E1 - E2| (falling
/// back to a seeded random sweep), clips the two coefficients to their box
/// and updates the bias and error cache. Terminates after max_passes
/// consecutive sweeps without a violation beyond tol; if the update budget
/// runs out first the model is returned with converged = false.
SmoResult train_smo(const FeatureMatrix& features, const SmoParams& params,
                    const KernelSpec& kernel, std::uint64_t seed);

/// Signed functional margin: sum of alpha_i y_i K(x_i, x) plus bias.
double decision_value(const SvmModel& model, std::span<const double> x);

/// Margin for a record given as per-attribute category indices; usable only
/// when the model was trained on one-hot data. Bit-identical to the dense
/// path.
double decision_value(const SvmModel& model, std::span<const std::uint16_t> categories);

/// Fit P(y=+1 | f) = 1 / (1 + exp(a f + b)) by regularized maximum
/// likelihood with Platt's smoothed targets, Newton iterations to gradient
/// norm 1e-8 (at most 100).
PlattCalibration platt_calibrate(std::span<const double> decisions,
                                 std::span<const std::int8_t> labels);

/// (1 - p, p) with p from the calibration sigmoid; throws StateError on an
/// uncalibrated model.
ClassProbs svm_predict_proba(const SvmModel& model, std::span<const double> x);
ClassProbs svm_predict_proba(const SvmModel& model,
                             std::span<const std::uint16_t> categories);

/// train_smo followed by platt_calibrate on the training decision values.
SvmModel train_calibrated_smo(const FeatureMatrix& features, const SmoParams& params,
                              const KernelSpec& kernel, std::uint64_t seed);

}  // namespace crashml
