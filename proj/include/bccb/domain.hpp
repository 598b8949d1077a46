#pragma once

#include <cstdint>
#include <vector>

#include "bccb/rng.hpp"

namespace bccb {

// One logged user from the randomized trial. Costs come from the synthesizer
// and are attached by stream position, so freshly parsed rows carry cost 0.
struct Observation {
  std::vector<double> features;
  int logged_arm = 0;  // 0 = control, 1 = treatment
  int outcome = 0;     // conversion indicator
  double cost = 0.0;   // currency units
};

// Beta-Bernoulli posterior over an arm's conversion rate. Starts at the
// uniform prior; alpha-1 / beta-1 count observed successes / failures.
struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;

  double mean() const noexcept { return alpha / (alpha + beta); }
};

// Bayes update for one binary outcome.
BetaPosterior posterior_update(BetaPosterior p, int outcome);

// One Beta(alpha, beta) draw in the open interval (0, 1), realized as the
// ratio of two gamma variates (alpha drawn first).
double posterior_sample(const BetaPosterior& p, Rng& rng);

struct BudgetState {
  double initial = 0.0;
  double remaining = 0.0;
  std::int64_t round = 0;    // t, advances for every streamed user
  std::int64_t horizon = 0;  // T
};

enum class DecisionReason { BudgetExceeded, BelowThreshold, Treated, AlwaysRule };

const char* to_string(DecisionReason r) noexcept;

// Full diagnostic record of one treatment decision:
// score = tau_hat + bonus, value_per_dollar = score / cost.
struct Decision {
  int treat = 0;
  double tau_hat = 0.0;
  double bonus = 0.0;
  double score = 0.0;
  double value_per_dollar = 0.0;
  double threshold = 0.0;
  double pace = 0.0;
  DecisionReason reason = DecisionReason::BelowThreshold;
};

}  // namespace bccb
