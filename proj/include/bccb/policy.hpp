#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "bccb/domain.hpp"
#include "bccb/hte.hpp"
#include "bccb/rng.hpp"

namespace bccb {

// Everything a policy may look at for one arriving user. The budget is owned
// by the evaluation harness and snapshotted here; policies never mutate it.
struct PolicyContext {
  std::span<const double> features;
  double cost = 0.0;
  BudgetState budget;
  Rng* rng = nullptr;

  std::int64_t round() const noexcept { return budget.round; }
  std::int64_t horizon() const noexcept { return budget.horizon; }
};

// Budget pressure ratio: remaining-budget fraction over remaining-horizon
// fraction. > 1 means spending lags the horizon, < 1 means it leads.
double pace(const BudgetState& budget);

// (theta_treated - theta_control) * eta from fresh posterior samples, treated
// arm drawn first. Value lies in (-eta, eta).
double exploration_bonus(const BetaPosterior& treated, const BetaPosterior& control, double eta,
                         Rng& rng);

// Sequential policy interface. decide() must not change learnable state (it
// may consume the context rng); observe() is called once per matched round
// with the executed arm and its logged outcome.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual Decision decide(const PolicyContext& ctx) = 0;
  virtual void observe(std::span<const double> features, int arm, int outcome) = 0;

  // Flat checkpoint of the learnable state (weight arrays plus counters).
  // Also serves as the byte-identity probe for the replay no-leak contract.
  virtual nlohmann::json checkpoint() const = 0;
};

struct BccbConfig {
  double eta = 0.5;       // exploration weight
  double lambda = 0.001;  // base treatment threshold
  double epsilon = 1e-6;  // pace floor in the threshold denominator
  HteConfig hte;
};

// Budget-constrained causal bandit: two-model HTE estimate plus a Thompson
// exploration bonus, compared per dollar against a pace-scaled threshold.
class BccbPolicy final : public Policy {
 public:
  BccbPolicy(int feature_dim, BccbConfig config = {});

  std::string_view name() const noexcept override { return "bccb"; }
  Decision decide(const PolicyContext& ctx) override;
  void observe(std::span<const double> features, int arm, int outcome) override;
  nlohmann::json checkpoint() const override;

  const TwoModelHte& hte() const noexcept { return hte_; }
  const BetaPosterior& treated_posterior() const noexcept { return treated_post_; }
  const BetaPosterior& control_posterior() const noexcept { return control_post_; }

 private:
  TwoModelHte hte_;
  BetaPosterior treated_post_;
  BetaPosterior control_post_;
  BccbConfig config_;
};

// Standard Thompson Sampling over global arm conversion rates. Ignores
// features, costs, and budget; the harness guard enforces affordability.
class TsPolicy final : public Policy {
 public:
  TsPolicy() = default;

  std::string_view name() const noexcept override { return "ts"; }
  Decision decide(const PolicyContext& ctx) override;
  void observe(std::span<const double> features, int arm, int outcome) override;
  nlohmann::json checkpoint() const override;

  const BetaPosterior& treated_posterior() const noexcept { return treated_post_; }
  const BetaPosterior& control_posterior() const noexcept { return control_post_; }

 private:
  BetaPosterior treated_post_;
  BetaPosterior control_post_;
};

struct BudgetedTsConfig {
  double lambda_b = 0.0;  // base threshold on the posterior-sample difference
  double epsilon = 1e-6;
};

// Thompson Sampling with a hard affordability check and a pace-scaled
// threshold on the sampled-rate difference.
class BudgetedTsPolicy final : public Policy {
 public:
  explicit BudgetedTsPolicy(BudgetedTsConfig config = {});

  std::string_view name() const noexcept override { return "budgeted_ts"; }
  Decision decide(const PolicyContext& ctx) override;
  void observe(std::span<const double> features, int arm, int outcome) override;
  nlohmann::json checkpoint() const override;

 private:
  BetaPosterior treated_post_;
  BetaPosterior control_post_;
  BudgetedTsConfig config_;
};

// Treats whenever the predicted effect is positive and the user is
// affordable. No exploration, no pacing.
class HteGreedyPolicy final : public Policy {
 public:
  HteGreedyPolicy(int feature_dim, HteConfig config = {});

  std::string_view name() const noexcept override { return "hte_greedy"; }
  Decision decide(const PolicyContext& ctx) override;
  void observe(std::span<const double> features, int arm, int outcome) override;
  nlohmann::json checkpoint() const override;

 private:
  TwoModelHte hte_;
};

struct OfflineUpliftConfig {
  double lambda_off = 0.001;  // cost-effectiveness threshold
  int epochs = 5;             // shuffled SGD passes over the training set
  HteConfig hte;
};

struct FitFailure {
  std::string reason;
};

// Batch-fitted two-model scorer, frozen after training.
struct OfflineUpliftModel {
  RunningStandardizer standardizer;
  LinearLogisticScorer treated;
  LinearLogisticScorer control;
};

// Fits two batch logistic models on the treated/control subsets by shuffled
// SGD. Fails when either arm lacks a positive or a negative example.
std::variant<OfflineUpliftModel, FitFailure> offline_uplift_fit(
    std::span<const Observation> train, int epochs, const OfflineUpliftConfig& config,
    std::uint64_t seed);

// Applies a pre-trained uplift model greedily with a cost-effectiveness
// threshold. Never learns online; a failed fit never treats.
class OfflineUpliftPolicy final : public Policy {
 public:
  OfflineUpliftPolicy(std::variant<OfflineUpliftModel, FitFailure> fit, double lambda_off);

  std::string_view name() const noexcept override { return "offline_uplift"; }
  Decision decide(const PolicyContext& ctx) override;
  void observe(std::span<const double> features, int arm, int outcome) override;
  nlohmann::json checkpoint() const override;

  bool fit_failed() const noexcept { return !model_.has_value(); }
  const std::string& failure_reason() const noexcept { return failure_reason_; }

 private:
  std::optional<OfflineUpliftModel> model_;
  std::string failure_reason_;
  double lambda_off_;
  mutable std::vector<double> scratch_;
};

// One bag of hyperparameters; the factory picks what each policy needs.
struct PolicySettings {
  double eta = 0.5;
  double lambda = 0.001;
  double epsilon = 1e-6;
  double lambda_b = 0.0;
  double lambda_off = 0.001;
  int offline_epochs = 5;
  HteConfig hte;
};

// Policy names: "bccb" | "ts" | "budgeted_ts" | "hte_greedy" | "offline_uplift".
// offline_uplift requires a training slice and a fit seed.
std::unique_ptr<Policy> make_policy(std::string_view name, const PolicySettings& settings,
                                    int feature_dim,
                                    std::span<const Observation> offline_train = {},
                                    std::uint64_t fit_seed = 0);

}  // namespace bccb
