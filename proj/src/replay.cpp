#include "bccb/replay.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

#include "bccb/stats.hpp"

namespace bccb {

Decision harness_budget_guard(const PolicyContext& ctx, Decision decision) {
  if (decision.treat == 1 && ctx.cost > ctx.budget.remaining) {
    decision.treat = 0;
    decision.reason = DecisionReason::BudgetExceeded;
  }
  return decision;
}

void write_trace_header(std::ostream& os) {
  os << "round,cost,decision,logged_arm,matched,outcome,remaining_budget,tau_hat,pace,threshold\n";
}

namespace {

void write_trace_line(std::ostream& os, const RoundRecord& r) {
  os << r.round << ',' << fmt_double(r.cost) << ',' << r.treat << ',' << r.logged_arm << ','
     << (r.matched ? 1 : 0) << ',' << r.outcome << ',' << fmt_double(r.remaining_budget) << ','
     << fmt_double(r.tau_hat) << ',' << fmt_double(r.pace) << ',' << fmt_double(r.threshold)
     << '\n';
}

// Shared accumulator so the streaming evaluator and the pure aggregation op
// stay arithmetically identical.
struct MetricsAccumulator {
  std::int64_t trajectory_stride;
  RunMetrics m;
  std::int64_t treated_decisions = 0;

  explicit MetricsAccumulator(std::int64_t stride) : trajectory_stride(stride) {}

  void add(const RoundRecord& r) {
    ++m.streamed;
    treated_decisions += r.treat;
    if (r.matched) {
      ++m.matched;
      if (r.treat == 1) {
        m.total_cost += r.cost;
        if (r.outcome == 1) ++m.conversions;
      }
    } else {
      ++m.skipped;
    }
    if (trajectory_stride > 0 && m.streamed % trajectory_stride == 0) {
      m.spend_trajectory.push_back({m.streamed, m.total_cost});
    }
  }

  RunMetrics finish() {
    if (trajectory_stride > 0 &&
        (m.spend_trajectory.empty() || m.spend_trajectory.back().streamed != m.streamed)) {
      m.spend_trajectory.push_back({m.streamed, m.total_cost});
    }
    m.treatment_rate =
        m.streamed > 0 ? static_cast<double>(treated_decisions) / static_cast<double>(m.streamed)
                       : 0.0;
    if (m.conversions > 0) {
      m.cost_per_conversion = m.total_cost / static_cast<double>(m.conversions);
    }
    return m;
  }
};

}  // namespace

RunMetrics compute_metrics(std::span<const RoundRecord> log, std::int64_t trajectory_stride) {
  MetricsAccumulator acc(trajectory_stride);
  for (const RoundRecord& r : log) acc.add(r);
  return acc.finish();
}

RunMetrics run_replay(std::span<const Observation> stream, Policy& policy, double budget,
                      std::int64_t horizon, Rng& rng, const ReplayOptions& options) {
  if (horizon < 0) throw std::invalid_argument("run_replay: horizon must be nonnegative");
  if (static_cast<std::int64_t>(stream.size()) < horizon) {
    throw std::invalid_argument("run_replay: stream shorter than the horizon");
  }
  if (budget < 0.0) throw std::invalid_argument("run_replay: budget must be nonnegative");

  MetricsAccumulator acc(options.trajectory_stride);
  if (options.trace != nullptr) write_trace_header(*options.trace);

  double remaining = budget;
  for (std::int64_t t = 0; t < horizon; ++t) {
    const Observation& user = stream[static_cast<std::size_t>(t)];
    PolicyContext ctx{user.features, user.cost, BudgetState{budget, remaining, t, horizon}, &rng};

    Decision decision;
    try {
      decision = harness_budget_guard(ctx, policy.decide(ctx));
      if (decision.treat == user.logged_arm) {
        policy.observe(user.features, user.logged_arm, user.outcome);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("replay round " + std::to_string(t) + ": " + e.what());
    }

    const bool matched = decision.treat == user.logged_arm;
    if (matched && decision.treat == 1) remaining -= user.cost;

    RoundRecord record{t,
                       user.cost,
                       decision.treat,
                       user.logged_arm,
                       matched,
                       user.outcome,
                       remaining,
                       decision.tau_hat,
                       decision.pace,
                       decision.threshold};
    acc.add(record);
    if (options.trace != nullptr) write_trace_line(*options.trace, record);
    if (options.round_log != nullptr) options.round_log->push_back(record);
  }
  return acc.finish();
}

}  // namespace bccb
