#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace crashml {

/// Counts with "fatal" as the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

/// Tally of (score >= threshold) predictions against +/-1 labels.
ConfusionMatrix confusion(std::span<const double> scores,
                          std::span<const std::int8_t> labels, double threshold);

double accuracy(const ConfusionMatrix& cm);
/// tp / (tp + fp); 0 when no positive predictions were made.
double precision(const ConfusionMatrix& cm);
/// tp / (tp + fn); 0 when there are no positive labels.
double recall(const ConfusionMatrix& cm);
/// Harmonic mean of precision and recall; 0 when both are 0.
double f1(const ConfusionMatrix& cm);

struct AgreementStats {
  double p_o = 0.0;  // observed agreement
  double p_e = 0.0;  // expected agreement under independent marginals
};

AgreementStats agreement(const ConfusionMatrix& cm);

/// Cohen's kappa, 1 - (1 - p_o)/(1 - p_e). Throws DegenerateDataError when
/// p_e = 1 (both raters constant and identical).
double kappa(const ConfusionMatrix& cm);

enum class KappaBand {
  poor,           // below 0
  slight,         // [0.00, 0.20]
  fair,           // [0.21, 0.40]
  moderate,       // [0.41, 0.60]
  substantial,    // [0.61, 0.80]
  almost_perfect  // [0.81, 1.00]
};

/// Landis-Koch band; the value is rounded to two decimals first so gap
/// values such as 0.205 land deterministically.
KappaBand kappa_band(double kappa_value);
std::string_view to_string(KappaBand band);

struct PRPoint {
  double threshold = 0.0;
  double recall = 0.0;
  double precision = 0.0;
};

/// One point per distinct score, thresholds strictly decreasing; the final
/// point always has recall 1. The conceptual recall-0 anchor has precision 1
/// by convention but is not materialized as a point.
struct PRCurve {
  std::vector<PRPoint> points;
};

/// Requires at least one positive label.
PRCurve pr_curve(std::span<const double> scores, std::span<const std::int8_t> labels);

/// Step-wise average precision: sum of (recall_i - recall_{i-1}) * precision_i.
/// No linear interpolation between points, which is invalid in PR space.
double auc_pr(const PRCurve& curve);

/// Precision of a no-skill classifier: positives / total.
double pr_baseline(std::span<const std::int8_t> labels);

/// Rank-sum AUROC: probability a random positive outscores a random
/// negative, ties counted one half. Requires both classes.
double auc_roc(std::span<const double> scores, std::span<const std::int8_t> labels);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double kappa = 0.0;
  KappaBand kappa_band = KappaBand::slight;
  double auc_pr = 0.0;
  double auc_roc = 0.0;
  double pr_baseline = 0.0;
};

/// Full report from fatal-class probabilities. Thresholded metrics use the
/// model decision rule (predict fatal iff score > 0.5, ties to the majority
/// class); ranking metrics use the raw scores.
MetricsReport compute_report(std::span<const double> scores,
                             std::span<const std::int8_t> labels);

}  // namespace crashml
