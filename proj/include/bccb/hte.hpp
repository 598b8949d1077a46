#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bccb {

struct HteConfig {
  double learning_rate = 0.01;
  double l2 = 1e-4;
  int warmup_min = 50;         // per-arm observations before the models are trusted
  double warmup_prior = 0.002; // optimistic effect reported during warm-up
};

// Online logistic regression: sigmoid(w.x + b), trained by constant-rate SGD
// on log loss with L2 on the weights (bias unpenalized).
class LinearLogisticScorer {
 public:
  LinearLogisticScorer(int dim, double learning_rate, double l2);

  // Probability in the open interval (0, 1); expects standardized features.
  double predict_prob(std::span<const double> features) const;

  // w -= lr * ((p - y) * x + l2 * w),  b -= lr * (p - y)
  void sgd_step(std::span<const double> features, int outcome);

  std::span<const double> weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  std::int64_t updates_seen() const noexcept { return updates_seen_; }
  int dim() const noexcept { return static_cast<int>(weights_.size()); }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  double learning_rate_;
  double l2_;
  std::int64_t updates_seen_ = 0;
};

// Per-feature running mean/variance (Welford), shared by both arm models so
// their inputs live on one scale. Variance is floored at 1e-8 when
// standardizing, which maps constant features to zero.
class RunningStandardizer {
 public:
  explicit RunningStandardizer(int dim);

  void update(std::span<const double> x);
  void standardize(std::span<const double> x, std::span<double> out) const;

  std::int64_t count() const noexcept { return n_; }
  int dim() const noexcept { return static_cast<int>(mean_.size()); }
  std::span<const double> mean() const noexcept { return mean_; }
  std::span<const double> m2() const noexcept { return m2_; }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::int64_t n_ = 0;
};

// Two-model treatment effect estimator: separate treated/control conversion
// models; tau_hat is their probability difference. Returns the optimistic
// prior until both arms have warmup_min observations.
class TwoModelHte {
 public:
  TwoModelHte(int dim, HteConfig config = {});

  double predict_tau(std::span<const double> features) const;
  void observe(std::span<const double> features, int arm, int outcome);

  bool warmup_active() const noexcept;
  std::int64_t treated_count() const noexcept { return treated_count_; }
  std::int64_t control_count() const noexcept { return control_count_; }
  const LinearLogisticScorer& treated_model() const noexcept { return treated_; }
  const LinearLogisticScorer& control_model() const noexcept { return control_; }
  const RunningStandardizer& standardizer() const noexcept { return standardizer_; }
  const HteConfig& config() const noexcept { return config_; }
  int dim() const noexcept { return treated_.dim(); }

 private:
  LinearLogisticScorer treated_;
  LinearLogisticScorer control_;
  RunningStandardizer standardizer_;
  std::int64_t treated_count_ = 0;
  std::int64_t control_count_ = 0;
  HteConfig config_;
  mutable std::vector<double> scratch_;  // instances are single-owner, see module contract
};

}  // namespace bccb
