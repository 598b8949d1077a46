#include "bccb/hte.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bccb {

namespace {

// Margins beyond +-36 round sigmoid to exactly 0 or 1 in double precision;
// clamping keeps the output strictly inside (0, 1).
double sigmoid(double z) {
  z = std::clamp(z, -36.0, 36.0);
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_dim(int expected, std::size_t got, const char* where) {
  if (static_cast<std::size_t>(expected) != got) {
    throw std::invalid_argument(std::string(where) + ": feature dimension mismatch");
  }
}

}  // namespace

LinearLogisticScorer::LinearLogisticScorer(int dim, double learning_rate, double l2)
    : weights_(static_cast<std::size_t>(dim), 0.0), learning_rate_(learning_rate), l2_(l2) {
  if (dim <= 0) throw std::invalid_argument("LinearLogisticScorer: dim must be positive");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("LinearLogisticScorer: learning rate must be positive");
  }
  if (l2 < 0.0) throw std::invalid_argument("LinearLogisticScorer: l2 must be nonnegative");
}

double LinearLogisticScorer::predict_prob(std::span<const double> features) const {
  check_dim(dim(), features.size(), "predict_prob");
  double z = bias_;
  for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * features[j];
  return sigmoid(z);
}

void LinearLogisticScorer::sgd_step(std::span<const double> features, int outcome) {
  check_dim(dim(), features.size(), "sgd_step");
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("sgd_step: outcome must be 0 or 1");
  }
  for (const double x : features) {
    if (!std::isfinite(x)) throw std::invalid_argument("sgd_step: non-finite feature");
  }
  const double p = predict_prob(features);
  const double g = p - static_cast<double>(outcome);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    weights_[j] -= learning_rate_ * (g * features[j] + l2_ * weights_[j]);
  }
  bias_ -= learning_rate_ * g;
  ++updates_seen_;
}

RunningStandardizer::RunningStandardizer(int dim)
    : mean_(static_cast<std::size_t>(dim), 0.0), m2_(static_cast<std::size_t>(dim), 0.0) {
  if (dim <= 0) throw std::invalid_argument("RunningStandardizer: dim must be positive");
}

void RunningStandardizer::update(std::span<const double> x) {
  check_dim(dim(), x.size(), "standardizer update");
  ++n_;
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double delta = x[j] - mean_[j];
    mean_[j] += delta / static_cast<double>(n_);
    m2_[j] += delta * (x[j] - mean_[j]);
  }
}

void RunningStandardizer::standardize(std::span<const double> x, std::span<double> out) const {
  check_dim(dim(), x.size(), "standardize");
  check_dim(dim(), out.size(), "standardize output");
  constexpr double kVarFloor = 1e-8;
  for (std::size_t j = 0; j < mean_.size(); ++j) {
    const double var = n_ > 1 ? m2_[j] / static_cast<double>(n_ - 1) : 0.0;
    out[j] = (x[j] - mean_[j]) / std::sqrt(std::max(var, kVarFloor));
  }
}

TwoModelHte::TwoModelHte(int dim, HteConfig config)
    : treated_(dim, config.learning_rate, config.l2),
      control_(dim, config.learning_rate, config.l2),
      standardizer_(dim),
      config_(config),
      scratch_(static_cast<std::size_t>(dim), 0.0) {
  if (config.warmup_min < 0) throw std::invalid_argument("TwoModelHte: warmup_min must be >= 0");
}

bool TwoModelHte::warmup_active() const noexcept {
  return treated_count_ < config_.warmup_min || control_count_ < config_.warmup_min;
}

double TwoModelHte::predict_tau(std::span<const double> features) const {
  check_dim(dim(), features.size(), "predict_tau");
  if (warmup_active()) return config_.warmup_prior;
  standardizer_.standardize(features, scratch_);
  return treated_.predict_prob(scratch_) - control_.predict_prob(scratch_);
}

void TwoModelHte::observe(std::span<const double> features, int arm, int outcome) {
  check_dim(dim(), features.size(), "observe");
  if (arm != 0 && arm != 1) throw std::invalid_argument("observe: arm must be 0 or 1");
  standardizer_.update(features);
  standardizer_.standardize(features, scratch_);
  if (arm == 1) {
    treated_.sgd_step(scratch_, outcome);
    ++treated_count_;
  } else {
    control_.sgd_step(scratch_, outcome);
    ++control_count_;
  }
}

}  // namespace bccb
