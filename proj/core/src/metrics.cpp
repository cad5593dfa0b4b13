#include "crashml/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crashml/errors.hpp"

namespace crashml {

ConfusionMatrix confusion(std::span<const double> scores,
                          std::span<const std::int8_t> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("confusion: scores and labels differ in length");
  }
  if (scores.empty()) throw ArgumentError("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] > 0;
    if (pred && truth) ++cm.tp;
    else if (pred && !truth) ++cm.fp;
    else if (!pred && truth) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double precision(const ConfusionMatrix& cm) {
  const std::int64_t denom = cm.tp + cm.fp;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm) {
  const std::int64_t denom = cm.tp + cm.fn;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f1(const ConfusionMatrix& cm) {
  const double p = precision(cm);
  const double r = recall(cm);
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

AgreementStats agreement(const ConfusionMatrix& cm) {
  const double total = static_cast<double>(cm.total());
  AgreementStats s;
  s.p_o = static_cast<double>(cm.tp + cm.tn) / total;
  s.p_e = (static_cast<double>(cm.tp + cm.fp) * static_cast<double>(cm.tp + cm.fn) +
           static_cast<double>(cm.fn + cm.tn) * static_cast<double>(cm.fp + cm.tn)) /
          (total * total);
  return s;
}

double kappa(const ConfusionMatrix& cm) {
  const AgreementStats s = agreement(cm);
  if (s.p_e >= 1.0) {
    throw DegenerateDataError("kappa: expected agreement is 1, kappa undefined");
  }
  return 1.0 - (1.0 - s.p_o) / (1.0 - s.p_e);
}

KappaBand kappa_band(double kappa_value) {
  const long cents = std::lround(kappa_value * 100.0);
  if (cents < 0) return KappaBand::poor;
  if (cents <= 20) return KappaBand::slight;
  if (cents <= 40) return KappaBand::fair;
  if (cents <= 60) return KappaBand::moderate;
  if (cents <= 80) return KappaBand::substantial;
  return KappaBand::almost_perfect;
}

std::string_view to_string(KappaBand band) {
  switch (band) {
    case KappaBand::poor: return "poor";
    case KappaBand::slight: return "slight";
    case KappaBand::fair: return "fair";
    case KappaBand::moderate: return "moderate";
    case KappaBand::substantial: return "substantial";
    case KappaBand::almost_perfect: return "almost_perfect";
  }
  return "unknown";
}

namespace {

// Indices sorted by descending score; stable on ties.
std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

PRCurve pr_curve(std::span<const double> scores, std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("pr_curve: scores and labels differ in length");
  }
  std::int64_t positives = 0;
  for (const std::int8_t y : labels) positives += (y > 0);
  if (positives == 0) {
    throw DegenerateDataError("pr_curve: no positive labels, curve undefined");
  }

  const std::vector<std::size_t> order = order_by_score(scores);
  PRCurve curve;
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Consume the whole tie group; every tied score crosses the threshold.
    while (i < order.size() && scores[order[i]] == threshold) {
      if (labels[order[i]] > 0) ++tp;
      else ++fp;
      ++i;
    }
    PRPoint point;
    point.threshold = threshold;
    point.recall = static_cast<double>(tp) / static_cast<double>(positives);
    point.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.points.push_back(point);
  }
  return curve;
}

double auc_pr(const PRCurve& curve) {
  double area = 0.0;
  double prev_recall = 0.0;
  for (const PRPoint& p : curve.points) {
    area += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return area;
}

double pr_baseline(std::span<const std::int8_t> labels) {
  if (labels.empty()) throw ArgumentError("pr_baseline: empty labels");
  std::int64_t positives = 0;
  for (const std::int8_t y : labels) positives += (y > 0);
  return static_cast<double>(positives) / static_cast<double>(labels.size());
}

double auc_roc(std::span<const double> scores, std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("auc_roc: scores and labels differ in length");
  }
  std::int64_t positives = 0, negatives = 0;
  for (const std::int8_t y : labels) (y > 0 ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) {
    throw DegenerateDataError("auc_roc: needs both classes");
  }

  // Sum of positive ranks with midranks on ties (ascending scores).
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] > 0) rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

MetricsReport compute_report(std::span<const double> scores,
                             std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ArgumentError("compute_report: bad input sizes");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] > 0.5;  // ties go to the majority class
    const bool truth = labels[i] > 0;
    if (pred && truth) ++cm.tp;
    else if (pred && !truth) ++cm.fp;
    else if (!pred && truth) ++cm.fn;
    else ++cm.tn;
  }

  MetricsReport report;
  report.accuracy = accuracy(cm);
  report.precision = precision(cm);
  report.recall = recall(cm);
  report.f1 = f1(cm);
  report.kappa = kappa(cm);
  report.kappa_band = kappa_band(report.kappa);
  report.auc_pr = auc_pr(pr_curve(scores, labels));
  report.auc_roc = auc_roc(scores, labels);
  report.pr_baseline = pr_baseline(labels);
  return report;
}

}  // namespace crashml
