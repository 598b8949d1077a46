#include "bccb/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bccb {

namespace {

constexpr std::uint64_t kOfflineFitStream = 0x0FF1A7E5;

nlohmann::json scorer_json(const LinearLogisticScorer& m) {
  return {{"weights", std::vector<double>(m.weights().begin(), m.weights().end())},
          {"bias", m.bias()},
          {"updates_seen", m.updates_seen()}};
}

nlohmann::json standardizer_json(const RunningStandardizer& s) {
  return {{"mean", std::vector<double>(s.mean().begin(), s.mean().end())},
          {"m2", std::vector<double>(s.m2().begin(), s.m2().end())},
          {"count", s.count()}};
}

nlohmann::json hte_json(const TwoModelHte& h) {
  return {{"treated", scorer_json(h.treated_model())},
          {"control", scorer_json(h.control_model())},
          {"standardizer", standardizer_json(h.standardizer())},
          {"treated_count", h.treated_count()},
          {"control_count", h.control_count()}};
}

nlohmann::json posterior_json(const BetaPosterior& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}};
}

Rng& ctx_rng(const PolicyContext& ctx) {
  if (ctx.rng == nullptr) throw std::invalid_argument("PolicyContext: rng is required");
  return *ctx.rng;
}

// Pace for decision diagnostics only; degenerate budgets report 0 instead of
// violating the strict pace() contract.
double diagnostic_pace(const BudgetState& b) {
  if (!(b.initial > 0.0) || b.horizon <= 0 || b.round >= b.horizon) return 0.0;
  return pace(b);
}

}  // namespace

double pace(const BudgetState& budget) {
  if (budget.horizon <= 0) throw std::invalid_argument("pace: horizon must be positive");
  if (budget.round >= budget.horizon) {
    throw std::invalid_argument("pace: round must precede the horizon");
  }
  if (!(budget.initial > 0.0)) throw std::invalid_argument("pace: initial budget must be positive");
  const double budget_fraction = budget.remaining / budget.initial;
  const double horizon_fraction =
      static_cast<double>(budget.horizon - budget.round) / static_cast<double>(budget.horizon);
  return budget_fraction / horizon_fraction;
}

double exploration_bonus(const BetaPosterior& treated, const BetaPosterior& control, double eta,
                         Rng& rng) {
  if (eta < 0.0) throw std::invalid_argument("exploration_bonus: eta must be nonnegative");
  const double theta_treated = posterior_sample(treated, rng);
  const double theta_control = posterior_sample(control, rng);
  return (theta_treated - theta_control) * eta;
}

// ---------------------------------------------------------------------------
// BCCB

BccbPolicy::BccbPolicy(int feature_dim, BccbConfig config)
    : hte_(feature_dim, config.hte), config_(config) {
  if (config.eta < 0.0 || !(config.lambda > 0.0) || !(config.epsilon > 0.0)) {
    throw std::invalid_argument("BccbConfig: eta must be >= 0, lambda and epsilon positive");
  }
}

Decision BccbPolicy::decide(const PolicyContext& ctx) {
  Decision d;
  if (ctx.cost > ctx.budget.remaining) {
    d.pace = diagnostic_pace(ctx.budget);
    d.reason = DecisionReason::BudgetExceeded;
    return d;
  }
  d.pace = pace(ctx.budget);
  d.tau_hat = hte_.predict_tau(ctx.features);
  d.bonus = exploration_bonus(treated_post_, control_post_, config_.eta, ctx_rng(ctx));
  d.score = d.tau_hat + d.bonus;
  d.value_per_dollar = d.score / ctx.cost;
  d.threshold = config_.lambda / std::max(d.pace, config_.epsilon);
  d.treat = d.value_per_dollar > d.threshold ? 1 : 0;
  d.reason = d.treat ? DecisionReason::Treated : DecisionReason::BelowThreshold;
  return d;
}

void BccbPolicy::observe(std::span<const double> features, int arm, int outcome) {
  hte_.observe(features, arm, outcome);
  if (arm == 1) {
    treated_post_ = posterior_update(treated_post_, outcome);
  } else {
    control_post_ = posterior_update(control_post_, outcome);
  }
}

nlohmann::json BccbPolicy::checkpoint() const {
  return {{"policy", "bccb"},
          {"treated_posterior", posterior_json(treated_post_)},
          {"control_posterior", posterior_json(control_post_)},
          {"hte", hte_json(hte_)}};
}

// ---------------------------------------------------------------------------
// Standard Thompson Sampling

Decision TsPolicy::decide(const PolicyContext& ctx) {
  Decision d;
  d.pace = diagnostic_pace(ctx.budget);
  const double theta_treated = posterior_sample(treated_post_, ctx_rng(ctx));
  const double theta_control = posterior_sample(control_post_, ctx_rng(ctx));
  d.bonus = theta_treated - theta_control;
  d.score = d.bonus;
  d.value_per_dollar = d.score / ctx.cost;
  d.threshold = 0.0;
  d.treat = theta_treated > theta_control ? 1 : 0;
  d.reason = d.treat ? DecisionReason::Treated : DecisionReason::BelowThreshold;
  return d;
}

void TsPolicy::observe(std::span<const double> /*features*/, int arm, int outcome) {
  if (arm == 1) {
    treated_post_ = posterior_update(treated_post_, outcome);
  } else {
    control_post_ = posterior_update(control_post_, outcome);
  }
}

nlohmann::json TsPolicy::checkpoint() const {
  return {{"policy", "ts"},
          {"treated_posterior", posterior_json(treated_post_)},
          {"control_posterior", posterior_json(control_post_)}};
}

// ---------------------------------------------------------------------------
// Budgeted Thompson Sampling

BudgetedTsPolicy::BudgetedTsPolicy(BudgetedTsConfig config) : config_(config) {
  if (config.lambda_b < 0.0 || !(config.epsilon > 0.0)) {
    throw std::invalid_argument("BudgetedTsConfig: lambda_b >= 0 and epsilon > 0 required");
  }
}

Decision BudgetedTsPolicy::decide(const PolicyContext& ctx) {
  Decision d;
  // affordability first: an unaffordable round consumes no posterior samples
  if (ctx.cost > ctx.budget.remaining) {
    d.pace = diagnostic_pace(ctx.budget);
    d.reason = DecisionReason::BudgetExceeded;
    return d;
  }
  d.pace = pace(ctx.budget);
  const double theta_treated = posterior_sample(treated_post_, ctx_rng(ctx));
  const double theta_control = posterior_sample(control_post_, ctx_rng(ctx));
  d.bonus = theta_treated - theta_control;
  d.score = d.bonus;
  d.value_per_dollar = d.score / ctx.cost;
  d.threshold = config_.lambda_b / std::max(d.pace, config_.epsilon);
  d.treat = d.score > d.threshold ? 1 : 0;
  d.reason = d.treat ? DecisionReason::Treated : DecisionReason::BelowThreshold;
  return d;
}

void BudgetedTsPolicy::observe(std::span<const double> /*features*/, int arm, int outcome) {
  if (arm == 1) {
    treated_post_ = posterior_update(treated_post_, outcome);
  } else {
    control_post_ = posterior_update(control_post_, outcome);
  }
}

nlohmann::json BudgetedTsPolicy::checkpoint() const {
  return {{"policy", "budgeted_ts"},
          {"treated_posterior", posterior_json(treated_post_)},
          {"control_posterior", posterior_json(control_post_)}};
}

// ---------------------------------------------------------------------------
// HTE Greedy

HteGreedyPolicy::HteGreedyPolicy(int feature_dim, HteConfig config) : hte_(feature_dim, config) {}

Decision HteGreedyPolicy::decide(const PolicyContext& ctx) {
  Decision d;
  if (ctx.cost > ctx.budget.remaining) {
    d.pace = diagnostic_pace(ctx.budget);
    d.reason = DecisionReason::BudgetExceeded;
    return d;
  }
  d.pace = pace(ctx.budget);
  d.tau_hat = hte_.predict_tau(ctx.features);
  d.score = d.tau_hat;
  d.value_per_dollar = d.score / ctx.cost;
  d.threshold = 0.0;
  d.treat = d.tau_hat > 0.0 ? 1 : 0;
  d.reason = d.treat ? DecisionReason::Treated : DecisionReason::BelowThreshold;
  return d;
}

void HteGreedyPolicy::observe(std::span<const double> features, int arm, int outcome) {
  hte_.observe(features, arm, outcome);
}

nlohmann::json HteGreedyPolicy::checkpoint() const {
  return {{"policy", "hte_greedy"}, {"hte", hte_json(hte_)}};
}

// ---------------------------------------------------------------------------
// Offline uplift

std::variant<OfflineUpliftModel, FitFailure> offline_uplift_fit(
    std::span<const Observation> train, int epochs, const OfflineUpliftConfig& config,
    std::uint64_t seed) {
  if (train.empty()) return FitFailure{"empty training set"};
  if (epochs <= 0) throw std::invalid_argument("offline_uplift_fit: epochs must be positive");
  const int dim = static_cast<int>(train.front().features.size());

  std::int64_t positives[2] = {0, 0};
  std::int64_t negatives[2] = {0, 0};
  for (const Observation& o : train) {
    if (static_cast<int>(o.features.size()) != dim) {
      throw std::invalid_argument("offline_uplift_fit: inconsistent feature dimension");
    }
    if ((o.logged_arm != 0 && o.logged_arm != 1) || (o.outcome != 0 && o.outcome != 1)) {
      throw std::invalid_argument("offline_uplift_fit: arm and outcome must be 0 or 1");
    }
    (o.outcome == 1 ? positives : negatives)[o.logged_arm] += 1;
  }
  for (int arm = 0; arm < 2; ++arm) {
    const char* arm_name = arm == 1 ? "treated" : "control";
    if (positives[arm] == 0) {
      return FitFailure{std::string(arm_name) + " subset has zero positive examples"};
    }
    if (negatives[arm] == 0) {
      return FitFailure{std::string(arm_name) + " subset has zero negative examples"};
    }
  }

  OfflineUpliftModel model{RunningStandardizer(dim),
                           LinearLogisticScorer(dim, config.hte.learning_rate, config.hte.l2),
                           LinearLogisticScorer(dim, config.hte.learning_rate, config.hte.l2)};
  for (const Observation& o : train) model.standardizer.update(o.features);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> z(static_cast<std::size_t>(dim));
  Rng rng(seed, kOfflineFitStream);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.next_below(i)]);
    }
    for (const std::size_t idx : order) {
      const Observation& o = train[idx];
      model.standardizer.standardize(o.features, z);
      (o.logged_arm == 1 ? model.treated : model.control).sgd_step(z, o.outcome);
    }
  }
  return model;
}

OfflineUpliftPolicy::OfflineUpliftPolicy(std::variant<OfflineUpliftModel, FitFailure> fit,
                                         double lambda_off)
    : lambda_off_(lambda_off) {
  if (auto* m = std::get_if<OfflineUpliftModel>(&fit)) {
    scratch_.resize(static_cast<std::size_t>(m->treated.dim()), 0.0);
    model_.emplace(std::move(*m));
  } else {
    failure_reason_ = std::get<FitFailure>(fit).reason;
  }
}

Decision OfflineUpliftPolicy::decide(const PolicyContext& ctx) {
  Decision d;
  if (ctx.cost > ctx.budget.remaining) {
    d.pace = diagnostic_pace(ctx.budget);
    d.reason = DecisionReason::BudgetExceeded;
    return d;
  }
  d.pace = pace(ctx.budget);
  d.threshold = lambda_off_;
  if (!model_.has_value()) {
    d.reason = DecisionReason::BelowThreshold;
    return d;
  }
  model_->standardizer.standardize(ctx.features, scratch_);
  d.tau_hat = model_->treated.predict_prob(scratch_) - model_->control.predict_prob(scratch_);
  d.score = d.tau_hat;
  d.value_per_dollar = d.score / ctx.cost;
  d.treat = d.value_per_dollar > lambda_off_ ? 1 : 0;
  d.reason = d.treat ? DecisionReason::Treated : DecisionReason::BelowThreshold;
  return d;
}

void OfflineUpliftPolicy::observe(std::span<const double> /*features*/, int /*arm*/,
                                  int /*outcome*/) {
  // intentionally a no-op: the offline policy never learns online
}

nlohmann::json OfflineUpliftPolicy::checkpoint() const {
  nlohmann::json j{{"policy", "offline_uplift"}, {"lambda_off", lambda_off_}};
  if (model_.has_value()) {
    j["treated"] = scorer_json(model_->treated);
    j["control"] = scorer_json(model_->control);
    j["standardizer"] = standardizer_json(model_->standardizer);
  } else {
    j["fit_failure"] = failure_reason_;
  }
  return j;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(std::string_view name, const PolicySettings& settings,
                                    int feature_dim, std::span<const Observation> offline_train,
                                    std::uint64_t fit_seed) {
  if (name == "bccb") {
    return std::make_unique<BccbPolicy>(
        feature_dim, BccbConfig{settings.eta, settings.lambda, settings.epsilon, settings.hte});
  }
  if (name == "ts") {
    return std::make_unique<TsPolicy>();
  }
  if (name == "budgeted_ts") {
    return std::make_unique<BudgetedTsPolicy>(
        BudgetedTsConfig{settings.lambda_b, settings.epsilon});
  }
  if (name == "hte_greedy") {
    return std::make_unique<HteGreedyPolicy>(feature_dim, settings.hte);
  }
  if (name == "offline_uplift") {
    OfflineUpliftConfig cfg{settings.lambda_off, settings.offline_epochs, settings.hte};
    auto fit = offline_uplift_fit(offline_train, cfg.epochs, cfg, fit_seed);
    return std::make_unique<OfflineUpliftPolicy>(std::move(fit), cfg.lambda_off);
  }
  throw std::invalid_argument("unknown policy name: " + std::string(name));
}

}  // namespace bccb
