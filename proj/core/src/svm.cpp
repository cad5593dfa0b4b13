#include "crashml/svm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "crashml/rng.hpp"

namespace crashml {

namespace {

// Integer-exponent power by repeated multiplication; exact for the small
// degrees a polynomial kernel uses and independent of libm.
double int_pow(double base, int degree) {
  double r = 1.0;
  for (int i = 0; i < degree; ++i) r *= base;
  return r;
}

double apply_kernel(const KernelSpec& spec, double dot) {
  if (spec.kind == KernelSpec::Kind::linear) return dot;
  return int_pow(dot + spec.coef0, spec.degree);
}

double dense_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// SMO working state over one feature matrix.
class SmoTrainer {
 public:
  SmoTrainer(const FeatureMatrix& fm, const SmoParams& params, const KernelSpec& kernel,
             std::uint64_t seed)
      : fm_(fm),
        params_(params),
        kernel_(kernel),
        n_(fm.rows()),
        rng_(derive_seed(seed, SeedStream::smo)),
        alpha_(fm.rows(), 0.0),
        error_(fm.rows()) {
    // With all alphas zero, f(x) = 0 and E_i = -y_i.
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -static_cast<double>(fm_.label(i));
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_ij(i, i);
  }

  SmoResult run() {
    int clean = 0;
    bool converged = false;
    int sweeps = 0;
    while (true) {
      ++sweeps;
      std::size_t violators = 0;
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!violates(i)) continue;
        ++violators;
        if (examine(i)) ++changed;
      }
      if (violators == 0) {
        if (++clean >= params_.max_passes) {
          converged = true;
          break;
        }
        continue;
      }
      clean = 0;
      if (changed == 0) {
        // No pair could move. The remaining violations are often a bias
        // artifact: any b inside the feasible interval clears them.
        if (recenter_bias()) continue;
        break;  // a genuinely violating pair is stuck
      }
      if (updates_ >= params_.max_updates) break;
    }
    return finish(converged, sweeps);
  }

 private:
  double kernel_ij(std::size_t i, std::size_t j) const {
    double dot;
    if (fm_.has_categories()) {
      // One-hot rows: the dot product is the number of matching attributes.
      const auto a = fm_.categories(i);
      const auto b = fm_.categories(j);
      int overlap = 0;
      for (std::size_t t = 0; t < a.size(); ++t) overlap += (a[t] == b[t]);
      dot = static_cast<double>(overlap);
    } else {
      dot = dense_dot(fm_.row(i), fm_.row(j));
    }
    return apply_kernel(kernel_, dot);
  }

  double y(std::size_t i) const { return static_cast<double>(fm_.label(i)); }

  bool violates(std::size_t i) const {
    const double margin_err = y(i) * error_[i];  // y f(x) - 1
    return (alpha_[i] < params_.c && margin_err < -params_.tol) ||
           (alpha_[i] > 0.0 && margin_err > params_.tol);
  }

  // Dual objective restricted to the pair (i1, i2) as a function of the
  // candidate alpha2 = t, with alpha1 following the equality constraint.
  // Only differences between candidates matter, so the constant part of the
  // full objective is dropped.
  double pair_objective(std::size_t i1, std::size_t i2, double t) const {
    const double y1 = y(i1), y2 = y(i2);
    const double s = y1 * y2;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const double k11 = diag_[i1], k22 = diag_[i2];
    const double k12 = kernel_ij(i1, i2);
    // Raw sums u = f - b; v strips the pair's own contribution.
    const double u1 = error_[i1] + y1 - bias_;
    const double u2 = error_[i2] + y2 - bias_;
    const double v1 = u1 - a1 * y1 * k11 - a2 * y2 * k12;
    const double v2 = u2 - a1 * y1 * k12 - a2 * y2 * k22;
    const double t1 = a1 + s * (a2 - t);  // alpha1 at candidate t
    return t1 + t -
           0.5 * (t1 * t1 * k11 + t * t * k22 + 2.0 * s * t1 * t * k12) -
           y1 * t1 * v1 - y2 * t * v2;
  }

  // When no pair can move, the leftover violations may only reflect a bias
  // sitting outside its feasible interval; shifting b clears them. Returns
  // false when a real violating pair remains.
  bool recenter_bias() {
    const double inf = std::numeric_limits<double>::infinity();
    double up = inf;    // min E over rows whose E must stay >= -tol
    double low = -inf;  // max E over rows whose E must stay <= +tol
    for (std::size_t i = 0; i < n_; ++i) {
      const bool positive = fm_.label(i) > 0;
      const bool not_upper = alpha_[i] < params_.c;
      const bool not_lower = alpha_[i] > 0.0;
      if ((positive && not_upper) || (!positive && not_lower)) {
        up = std::min(up, error_[i]);
      }
      if ((!positive && not_upper) || (positive && not_lower)) {
        low = std::max(low, error_[i]);
      }
    }
    double shift;
    if (up == inf && low == -inf) return false;
    if (up == inf) {
      shift = params_.tol - low;
    } else if (low == -inf) {
      shift = -params_.tol - up;
    } else if (low - up <= 2.0 * params_.tol) {
      shift = -(low + up) / 2.0;
    } else {
      return false;
    }
    if (shift == 0.0) return false;
    bias_ += shift;
    for (std::size_t i = 0; i < n_; ++i) error_[i] += shift;
    return true;
  }

  bool examine(std::size_t i) {
    // Partner maximizing |E_i - E_j| first, then a seeded random sweep.
    const double e1 = error_[i];
    std::size_t best = i;
    double best_gap = -1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double gap = std::fabs(e1 - error_[j]);
      if (gap > best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best != i && step(i, best)) return true;

    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_.shuffle(order);
    for (const std::size_t j : order) {
      if (j == i || j == best) continue;
      if (step(i, j)) return true;
    }
    return false;
  }

  bool step(std::size_t i1, std::size_t i2) {
    const double y1 = y(i1), y2 = y(i2);
    const double a1_old = alpha_[i1], a2_old = alpha_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(params_.c, params_.c + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - params_.c);
      hi = std::min(params_.c, a1_old + a2_old);
    }
    if (lo >= hi) return false;

    const double k11 = diag_[i1];
    const double k22 = diag_[i2];
    const double k12 = kernel_ij(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      const double a2_free = a2_old + y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_free, lo, hi);
      // Clipping moves toward the unconstrained optimum, so the dual
      // objective cannot decrease.
      assert((a2_new - a2_free) * (a2_new - a2_free) <=
             (a2_old - a2_free) * (a2_old - a2_free) + 1e-9);
    } else {
      // Zero or negative curvature: the objective is convex along the
      // constraint segment, so the maximum sits at an endpoint.
      const double w_lo = pair_objective(i1, i2, lo);
      const double w_hi = pair_objective(i1, i2, hi);
      if (w_lo > w_hi + 1e-12) {
        a2_new = lo;
      } else if (w_hi > w_lo + 1e-12) {
        a2_new = hi;
      } else {
        return false;
      }
    }
    // Snap to the box: rounding in the constrained update otherwise leaves
    // ~1e-16 residue on alphas that are exactly at a bound, and such rows
    // then pose as interior points forever.
    const double snap = 1e-12 * std::max(1.0, params_.c);
    const auto snapped = [&](double a) {
      if (a < snap) return 0.0;
      if (a > params_.c - snap) return params_.c;
      return a;
    };
    a2_new = snapped(a2_new);
    if (std::fabs(a2_new - a2_old) < 1e-12) return false;
    const double a1_new = snapped(a1_old + s * (a2_old - a2_new));

    const double d1 = a1_new - a1_old;
    const double d2 = a2_new - a2_old;

    const double b1 = bias_ - e1 - y1 * d1 * k11 - y2 * d2 * k12;
    const double b2 = bias_ - e2 - y1 * d1 * k12 - y2 * d2 * k22;
    double b_new;
    if (a1_new > 0.0 && a1_new < params_.c) {
      b_new = b1;
    } else if (a2_new > 0.0 && a2_new < params_.c) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - bias_;

    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    bias_ = b_new;
    for (std::size_t k = 0; k < n_; ++k) {
      error_[k] += y1 * d1 * kernel_ij(i1, k) + y2 * d2 * kernel_ij(i2, k) + db;
    }

#ifndef NDEBUG
    double constraint = 0.0;
    for (std::size_t k = 0; k < n_; ++k) constraint += alpha_[k] * y(k);
    assert(std::fabs(constraint) < 1e-8);
#endif

    ++updates_;
    return true;
  }

  SmoResult finish(bool converged, int sweeps) {
    SmoResult result;
    SvmModel& model = result.model;
    model.n_features = fm_.cols();
    model.kernel = kernel_;
    model.c = params_.c;
    model.bias = bias_;
    model.converged = converged;

    const std::size_t stride = fm_.has_categories() ? fm_.attribute_count() : 0;
    model.category_stride = stride;
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] <= 0.0) continue;
      model.sv_alpha.push_back(alpha_[i]);
      model.sv_label.push_back(fm_.label(i));
      const auto row = fm_.row(i);
      model.sv_rows.insert(model.sv_rows.end(), row.begin(), row.end());
      if (stride > 0) {
        const auto cats = fm_.categories(i);
        model.sv_categories.insert(model.sv_categories.end(), cats.begin(), cats.end());
      }
    }

    result.alphas = alpha_;
    result.train_decisions.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      result.train_decisions[i] = error_[i] + y(i);  // f(x_i) = E_i + y_i
    }
    result.sweeps = sweeps;
    result.updates = updates_;
    return result;
  }

  const FeatureMatrix& fm_;
  const SmoParams params_;
  const KernelSpec kernel_;
  const std::size_t n_;
  Rng rng_;
  std::vector<double> alpha_;
  std::vector<double> error_;  // E_i = f(x_i) - y_i
  std::vector<double> diag_;
  double bias_ = 0.0;
  long updates_ = 0;
};

}  // namespace

SmoResult train_smo(const FeatureMatrix& features, const SmoParams& params,
                    const KernelSpec& kernel, std::uint64_t seed) {
  if (features.rows() < 2) throw ArgumentError("train_smo: need at least 2 rows");
  if (!(params.c > 0.0)) throw ArgumentError("train_smo: C must be positive");
  if (!(params.tol > 0.0)) throw ArgumentError("train_smo: tol must be positive");
  bool has_pos = false, has_neg = false;
  for (const std::int8_t l : features.labels()) {
    (l > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DegenerateDataError("train_smo: both classes must be present");
  }
  SmoTrainer trainer(features, params, kernel, seed);
  return trainer.run();
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw ArgumentError("decision_value: feature width mismatch");
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_count(); ++i) {
    const double dot = dense_dot(model.sv_row(i), x);
    f += model.sv_alpha[i] * static_cast<double>(model.sv_label[i]) *
         apply_kernel(model.kernel, dot);
  }
  return f;
}

double decision_value(const SvmModel& model, std::span<const std::uint16_t> categories) {
  if (model.category_stride == 0 || categories.size() != model.category_stride) {
    throw ArgumentError("decision_value: model has no matching category view");
  }
  double f = model.bias;
  const std::size_t stride = model.category_stride;
  for (std::size_t i = 0; i < model.support_count(); ++i) {
    const std::uint16_t* sv = model.sv_categories.data() + i * stride;
    int overlap = 0;
    for (std::size_t t = 0; t < stride; ++t) overlap += (sv[t] == categories[t]);
    f += model.sv_alpha[i] * static_cast<double>(model.sv_label[i]) *
         apply_kernel(model.kernel, static_cast<double>(overlap));
  }
  return f;
}

PlattCalibration platt_calibrate(std::span<const double> decisions,
                                 std::span<const std::int8_t> labels) {
  if (decisions.size() != labels.size() || decisions.empty()) {
    throw ArgumentError("platt_calibrate: bad input sizes");
  }
  double n_pos = 0.0, n_neg = 0.0;
  for (const std::int8_t l : labels) (l > 0 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw DegenerateDataError("platt_calibrate: both classes must be present");
  }

  // Smoothed targets and the Lin-Weng-Keerthi Newton scheme, which evaluates
  // the cross entropy in a form stable for large |a f + b|.
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  const std::size_t n = decisions.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] > 0 ? hi : lo;

  // The cross entropy is evaluated in extended precision: near the optimum
  // the Newton step's predicted decrease can sit below double resolution,
  // and the line search must still be able to observe it.
  const auto objective = [&](double a, double b) {
    long double v = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = a * decisions[i] + b;
      if (z >= 0.0) {
        v += static_cast<long double>(target[i]) * z + std::log1p(std::exp(-z));
      } else {
        v += static_cast<long double>(target[i] - 1.0) * z + std::log1p(std::exp(z));
      }
    }
    return v;
  };

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  long double fval = objective(a, b);
  const double sigma = 1e-12;  // Hessian ridge
  const int max_iter = 100;

  for (int iter = 0; iter < max_iter; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0.0;
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = a * decisions[i] + b;
      double p, q;  // p = P(y=+1), q = 1-p
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += decisions[i] * decisions[i] * d2;
      h22 += d2;
      h21 += decisions[i] * d2;
      const double d1 = target[i] - p;
      g1 += decisions[i] * d1;
      g2 += d1;
    }
    if (std::max(std::fabs(g1), std::fabs(g2)) < 1e-8) {
      return PlattCalibration{a, b};
    }

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double stepsize = 1.0;
    while (stepsize >= 1e-10) {
      const double a_new = a + stepsize * da;
      const double b_new = b + stepsize * db;
      const long double f_new = objective(a_new, b_new);
      if (f_new < fval + static_cast<long double>(1e-4 * stepsize * gd)) {
        a = a_new;
        b = b_new;
        fval = f_new;
        break;
      }
      stepsize /= 2.0;
    }
    if (stepsize < 1e-10) {
      throw ConvergenceError("platt_calibrate: line search failed");
    }
  }
  throw ConvergenceError("platt_calibrate: no convergence in 100 iterations");
}

namespace {

ClassProbs sigmoid_probs(const SvmModel& model, double f) {
  if (!model.calibration) {
    throw StateError("svm_predict_proba: model is not calibrated");
  }
  const double z = model.calibration->a * f + model.calibration->b;
  double p;
  if (z >= 0.0) {
    p = std::exp(-z) / (1.0 + std::exp(-z));
  } else {
    p = 1.0 / (1.0 + std::exp(z));
  }
  return {1.0 - p, p};
}

}  // namespace

ClassProbs svm_predict_proba(const SvmModel& model, std::span<const double> x) {
  return sigmoid_probs(model, decision_value(model, x));
}

ClassProbs svm_predict_proba(const SvmModel& model,
                             std::span<const std::uint16_t> categories) {
  return sigmoid_probs(model, decision_value(model, categories));
}

SvmModel train_calibrated_smo(const FeatureMatrix& features, const SmoParams& params,
                              const KernelSpec& kernel, std::uint64_t seed) {
  SmoResult result = train_smo(features, params, kernel, seed);
  result.model.calibration = platt_calibrate(result.train_decisions, features.labels());
  return std::move(result.model);
}

}  // namespace crashml
