#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bccb/domain.hpp"
#include "bccb/policy.hpp"

namespace bccb {

struct SpendCheckpoint {
  std::int64_t streamed = 0;  // users streamed so far
  double cumulative_spend = 0.0;
};

struct RunMetrics {
  std::int64_t conversions = 0;  // outcome = 1 on treated matched rounds
  double total_cost = 0.0;
  double treatment_rate = 0.0;  // treated decisions / streamed users
  std::optional<double> cost_per_conversion;
  std::int64_t matched = 0;
  std::int64_t skipped = 0;
  std::int64_t streamed = 0;
  std::vector<SpendCheckpoint> spend_trajectory;
};

// One streamed user as seen by the evaluator, after the budget guard.
struct RoundRecord {
  std::int64_t round = 0;
  double cost = 0.0;
  int treat = 0;
  int logged_arm = 0;
  bool matched = false;
  int outcome = 0;  // the logged outcome; consumed by the policy only on matches
  double remaining_budget = 0.0;
  double tau_hat = 0.0;
  double pace = 0.0;
  double threshold = 0.0;
};

struct ReplayOptions {
  std::ostream* trace = nullptr;               // per-round CSV records
  std::int64_t trajectory_stride = 1000;       // spend checkpoint cadence
  std::vector<RoundRecord>* round_log = nullptr;  // optional full capture
};

// Forces treat = 0 whenever the user is unaffordable, regardless of policy.
// The budget constraint is an evaluator-level invariant.
Decision harness_budget_guard(const PolicyContext& ctx, Decision decision);

// Pure aggregation of per-round records into RunMetrics.
RunMetrics compute_metrics(std::span<const RoundRecord> log, std::int64_t trajectory_stride = 1000);

// Replay-method evaluation: stream logged users, execute the policy, and
// charge budget / update the policy only on rounds where the decision matches
// the logged arm. The round counter advances for every streamed user.
RunMetrics run_replay(std::span<const Observation> stream, Policy& policy, double budget,
                      std::int64_t horizon, Rng& rng, const ReplayOptions& options = {});

void write_trace_header(std::ostream& os);

}  // namespace bccb
