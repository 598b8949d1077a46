#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bccb/domain.hpp"

namespace bccb {

struct DatasetSummary {
  std::int64_t n_rows = 0;
  int n_features = 0;
  double treated_fraction = 0.0;
  double treated_conversion_rate = 0.0;
  double control_conversion_rate = 0.0;
  double ate = 0.0;
};

struct LoadedDataset {
  std::vector<Observation> rows;
  DatasetSummary summary;
};

// Streaming single-pass parse of a Criteo-schema delimited file: header row
// with columns f0..f11, treatment, conversion; visit/exposure and any other
// columns are ignored. Rows keep file order; costs are left at 0.
LoadedDataset load_criteo(const std::string& path, char delimiter = ',');

// Summary statistics; OpenMP reduction with a serial twin kept for testing.
DatasetSummary summarize(std::span<const Observation> rows);
DatasetSummary summarize_reference(std::span<const Observation> rows);

// n lognormal(mu = -0.5, sigma = 0.7) draws clipped to [0.05, 5.00], one per
// stream position. OpenMP kernel with a serial twin; counter-based draws make
// the two bit-identical.
std::vector<double> synthesize_costs(std::int64_t n, std::uint64_t seed);
std::vector<double> synthesize_costs_reference(std::int64_t n, std::uint64_t seed);
std::vector<double> synthesize_costs(std::int64_t n, std::uint64_t seed, double mu, double sigma,
                                     double clip_lo, double clip_hi);

// Overwrites rows[i].cost with the synthesized cost for position i.
void attach_costs(std::span<Observation> rows, std::uint64_t seed);

struct SplitResult {
  std::vector<Observation> train;
  std::vector<Observation> eval;
};

// Seed-determined permutation; the first train_size rows become the offline
// training set, the next eval_size rows the evaluation stream.
SplitResult shuffle_split(std::span<const Observation> rows, std::uint64_t seed,
                          std::int64_t eval_size, std::int64_t train_size);

enum class TauFunction { linear_in_x1, step_in_x1, zero };

TauFunction tau_function_from_string(const std::string& name);
const char* to_string(TauFunction f) noexcept;

struct SyntheticEnvConfig {
  std::int64_t n_users = 100000;
  int feature_dim = 12;
  double base_rate = 0.003;
  TauFunction tau_function = TauFunction::zero;
  double tau_scale = 0.0;
  double arm_split = 0.85;  // logged treatment probability
  double cost_mu = -0.5;
  double cost_sigma = 0.7;
  double cost_clip_lo = 0.05;
  double cost_clip_hi = 5.0;
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  std::vector<Observation> rows;
  std::vector<double> true_tau;
  double base_rate = 0.0;
};

// Ground-truth environment: standard-normal features, Bernoulli(arm_split)
// logged arm, outcome Bernoulli(base_rate + arm * tau(x)) with the probability
// clamped into [0, 1]. OpenMP kernel with a serial twin, bit-identical.
SyntheticDataset generate_synthetic(const SyntheticEnvConfig& config);
SyntheticDataset generate_synthetic_reference(const SyntheticEnvConfig& config);

// Criteo-schema CSV writer (f0..f11, treatment, conversion); values round-trip
// exactly through load_criteo.
void write_criteo_csv(const std::string& path, std::span<const Observation> rows);

// Median-split ATE per feature, the dataset heterogeneity diagnostic.
struct FeatureSplitAte {
  int feature = 0;
  double ate_high = 0.0;
  double ate_low = 0.0;
  double ratio = 0.0;  // ate_high / ate_low; NaN when ate_low is 0
};

std::vector<FeatureSplitAte> median_split_ates(std::span<const Observation> rows);

}  // namespace bccb
