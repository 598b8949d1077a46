#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bccb/data.hpp"
#include "bccb/policy.hpp"
#include "bccb/replay.hpp"

namespace bccb {

enum class ExperimentKind { budget_sweep, crossover, scale, synthetic_suite };

const char* to_string(ExperimentKind k) noexcept;
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::budget_sweep;
  std::vector<std::string> policies;  // empty -> per-experiment default
  std::vector<double> budgets;        // sweep levels; single budget elsewhere
  std::int64_t users = 100000;
  std::vector<std::int64_t> train_sizes{1000, 2000, 5000, 10000, 50000};
  std::vector<std::string> scales{"100000", "500000"};  // "full" allowed
  std::vector<std::uint64_t> seeds{42, 123, 456};
  std::string data_path;
  char delimiter = ',';
  PolicySettings params;
  std::uint64_t cost_seed = 12345;
  std::string out_dir = "results";
  bool trace = false;
};

// Covers every hyperparameter that can change a decision.
std::string config_hash(const ExperimentConfig& config);

struct RunRow {
  std::string policy;
  double budget = 0.0;
  std::int64_t users = 0;
  std::int64_t train_size = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  double runtime_sec = 0.0;  // metadata only, never emitted into CSV tables
};

struct AggregateRow {
  std::string policy;
  double budget = 0.0;
  std::int64_t users = 0;
  std::int64_t train_size = 0;
  int n_seeds = 0;
  double mean_conversions = 0.0;
  double std_conversions = 0.0;
  std::optional<double> cov_conversions;
  double mean_total_cost = 0.0;
  double std_total_cost = 0.0;
  double mean_treatment_rate = 0.0;
  double std_treatment_rate = 0.0;
  std::optional<double> mean_cost_per_conversion;
  std::optional<double> std_cost_per_conversion;
};

struct ResultTable {
  std::string experiment;
  std::vector<RunRow> rows;             // sorted by (policy, budget, users, train_size, seed)
  std::vector<AggregateRow> aggregates;
};

std::vector<AggregateRow> aggregate_rows(std::span<const RunRow> rows);

// One replay run per (policy, budget, seed) on a fixed per-seed eval stream.
ResultTable run_budget_sweep(const ExperimentConfig& config,
                             const std::vector<Observation>& data);

// Offline-vs-online data-efficiency crossover. The eval stream depends only on
// the seed; training slices are prefixes of a per-seed training pool.
ResultTable run_crossover(const ExperimentConfig& config, const std::vector<Observation>& data);

// One run per (policy, scale, seed); "full" streams every row.
ResultTable run_scale(const ExperimentConfig& config, const std::vector<Observation>& data);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SyntheticSuiteResult {
  std::vector<PropertyResult> properties;
  bool all_passed() const noexcept;
};

// Ground-truth-environment checks: HTE learnability, pacing linearity,
// threshold monotonicity, zero-signal equivalence, segment targeting, and the
// full-information oracle bound.
SyntheticSuiteResult run_synthetic_suite(const ExperimentConfig& config);

struct SimulationOptions {
  std::int64_t trajectory_stride = 1000;
  std::vector<RoundRecord>* round_log = nullptr;
  std::function<void(std::int64_t, const Decision&)> on_decision;
};

// Live bandit interaction against a known environment: the policy acts, the
// outcome is drawn from the acted arm, and every round updates the policy.
RunMetrics run_simulation(const SyntheticDataset& env, Policy& policy, double budget,
                          std::uint64_t seed, const SimulationOptions& options = {});

// Oracle allocation: sort users by true tau/cost, treat greedily within the
// budget, and report the expected conversions of the treated set.
double oracle_expected_conversions(const SyntheticDataset& env, double budget);

// Writes per-seed CSV, aggregate CSV, figure-data CSVs, and manifest.json.
// Aggregates are re-derived from the written per-seed file before the
// manifest is finalized; a mismatch beyond 1e-9 aborts.
void emit_results(const ResultTable& table, const ExperimentConfig& config,
                  const std::string& out_dir);

void emit_suite_results(const SyntheticSuiteResult& result, const ExperimentConfig& config,
                        const std::string& out_dir);

nlohmann::ordered_json manifest_json(const ExperimentConfig& config);
ExperimentConfig config_from_manifest(const nlohmann::json& manifest);

}  // namespace bccb
