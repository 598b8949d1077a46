#include "bccb/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bccb/rng.hpp"
#include "bccb/stats.hpp"

namespace bccb {

namespace {

constexpr int kCriteoDim = 12;

// substream ids, keep cost draws independent of feature/arm/outcome draws
constexpr std::uint64_t kCostStream = 101;
constexpr std::uint64_t kShuffleStream = 102;
constexpr std::uint64_t kEnvStream = 103;

double parse_double(std::string_view field, std::int64_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw std::runtime_error("load_criteo: unparseable value '" + std::string(field) +
                             "' at line " + std::to_string(line_no));
  }
  return v;
}

int parse_binary(std::string_view field, std::int64_t line_no, const char* what) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  // tolerate float-formatted flags such as "1.0"
  const double v = parse_double(field, line_no);
  if (v == 0.0) return 0;
  if (v == 1.0) return 1;
  throw std::runtime_error("load_criteo: " + std::string(what) + " must be 0 or 1 at line " +
                           std::to_string(line_no));
}

void split_fields(const std::string& line, char delimiter, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      out.emplace_back(line.data() + start, line.size() - start);
      return;
    }
    out.emplace_back(line.data() + start, pos - start);
    start = pos + 1;
  }
}

double tau_of(TauFunction f, double scale, double x1) {
  switch (f) {
    case TauFunction::linear_in_x1: return scale * x1;
    case TauFunction::step_in_x1: return x1 > 0.0 ? scale : 0.0;
    case TauFunction::zero: return 0.0;
  }
  return 0.0;
}

DatasetSummary summary_from_counts(std::int64_t n, int dim, std::int64_t treated,
                                   std::int64_t treated_conv, std::int64_t control_conv) {
  DatasetSummary s;
  s.n_rows = n;
  s.n_features = dim;
  const std::int64_t control = n - treated;
  s.treated_fraction = n > 0 ? static_cast<double>(treated) / static_cast<double>(n) : 0.0;
  s.treated_conversion_rate =
      treated > 0 ? static_cast<double>(treated_conv) / static_cast<double>(treated) : 0.0;
  s.control_conversion_rate =
      control > 0 ? static_cast<double>(control_conv) / static_cast<double>(control) : 0.0;
  s.ate = s.treated_conversion_rate - s.control_conversion_rate;
  return s;
}

}  // namespace

LoadedDataset load_criteo(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_criteo: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_criteo: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string_view> fields;
  split_fields(line, delimiter, fields);

  std::vector<int> feature_cols(kCriteoDim, -1);
  int treatment_col = -1;
  int conversion_col = -1;
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const std::string name(fields[c]);
    if (name == "treatment") {
      treatment_col = static_cast<int>(c);
    } else if (name == "conversion") {
      conversion_col = static_cast<int>(c);
    } else if (name.size() >= 2 && name[0] == 'f') {
      int idx = -1;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc{} && res.ptr == name.data() + name.size() && idx >= 0 &&
          idx < kCriteoDim) {
        feature_cols[static_cast<std::size_t>(idx)] = static_cast<int>(c);
      }
    }
    // visit, exposure and anything else: ignored
  }
  for (int j = 0; j < kCriteoDim; ++j) {
    if (feature_cols[static_cast<std::size_t>(j)] < 0) {
      throw std::runtime_error("load_criteo: missing column f" + std::to_string(j));
    }
  }
  if (treatment_col < 0) throw std::runtime_error("load_criteo: missing column treatment");
  if (conversion_col < 0) throw std::runtime_error("load_criteo: missing column conversion");
  const std::size_t n_cols = fields.size();

  LoadedDataset out;
  std::int64_t line_no = 1;
  std::int64_t treated = 0;
  std::int64_t treated_conv = 0;
  std::int64_t control_conv = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    split_fields(line, delimiter, fields);
    if (fields.size() != n_cols) {
      throw std::runtime_error("load_criteo: expected " + std::to_string(n_cols) + " fields, got " +
                               std::to_string(fields.size()) + " at line " +
                               std::to_string(line_no));
    }
    Observation o;
    o.features.resize(kCriteoDim);
    for (int j = 0; j < kCriteoDim; ++j) {
      o.features[static_cast<std::size_t>(j)] =
          parse_double(fields[static_cast<std::size_t>(feature_cols[static_cast<std::size_t>(j)])],
                       line_no);
    }
    o.logged_arm =
        parse_binary(fields[static_cast<std::size_t>(treatment_col)], line_no, "treatment");
    o.outcome =
        parse_binary(fields[static_cast<std::size_t>(conversion_col)], line_no, "conversion");
    treated += o.logged_arm;
    if (o.logged_arm == 1) {
      treated_conv += o.outcome;
    } else {
      control_conv += o.outcome;
    }
    out.rows.push_back(std::move(o));
  }
  if (out.rows.empty()) throw std::runtime_error("load_criteo: no data rows in " + path);
  out.summary = summary_from_counts(static_cast<std::int64_t>(out.rows.size()), kCriteoDim,
                                    treated, treated_conv, control_conv);
  return out;
}

DatasetSummary summarize_reference(std::span<const Observation> rows) {
  std::int64_t treated = 0;
  std::int64_t treated_conv = 0;
  std::int64_t control_conv = 0;
  for (const Observation& o : rows) {
    treated += o.logged_arm;
    if (o.logged_arm == 1) {
      treated_conv += o.outcome;
    } else {
      control_conv += o.outcome;
    }
  }
  const int dim = rows.empty() ? 0 : static_cast<int>(rows.front().features.size());
  return summary_from_counts(static_cast<std::int64_t>(rows.size()), dim, treated, treated_conv,
                             control_conv);
}

DatasetSummary summarize(std::span<const Observation> rows) {
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  std::int64_t treated = 0;
  std::int64_t treated_conv = 0;
  std::int64_t control_conv = 0;
#pragma omp parallel for schedule(static) reduction(+ : treated, treated_conv, control_conv)
  for (std::int64_t i = 0; i < n; ++i) {
    const Observation& o = rows[static_cast<std::size_t>(i)];
    treated += o.logged_arm;
    if (o.logged_arm == 1) {
      treated_conv += o.outcome;
    } else {
      control_conv += o.outcome;
    }
  }
  const int dim = rows.empty() ? 0 : static_cast<int>(rows.front().features.size());
  return summary_from_counts(n, dim, treated, treated_conv, control_conv);
}

std::vector<double> synthesize_costs(std::int64_t n, std::uint64_t seed, double mu, double sigma,
                                     double clip_lo, double clip_hi) {
  if (n < 0) throw std::invalid_argument("synthesize_costs: n must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(seed, kCostStream);
    rng.skip_to(static_cast<std::uint64_t>(2 * i));  // one gaussian = two draws
    out[static_cast<std::size_t>(i)] =
        std::clamp(rng.next_lognormal(mu, sigma), clip_lo, clip_hi);
  }
  return out;
}

std::vector<double> synthesize_costs(std::int64_t n, std::uint64_t seed) {
  return synthesize_costs(n, seed, -0.5, 0.7, 0.05, 5.0);
}

std::vector<double> synthesize_costs_reference(std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("synthesize_costs: n must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(n));
  Rng rng(seed, kCostStream);
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = std::clamp(rng.next_lognormal(-0.5, 0.7), 0.05, 5.0);
  }
  return out;
}

void attach_costs(std::span<Observation> rows, std::uint64_t seed) {
  const std::vector<double> costs =
      synthesize_costs(static_cast<std::int64_t>(rows.size()), seed);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].cost = costs[i];
}

SplitResult shuffle_split(std::span<const Observation> rows, std::uint64_t seed,
                          std::int64_t eval_size, std::int64_t train_size) {
  if (train_size < 0 || eval_size < 0) {
    throw std::invalid_argument("shuffle_split: sizes must be nonnegative");
  }
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  if (train_size + eval_size > n) {
    throw std::invalid_argument("shuffle_split: train_size + eval_size exceeds row count");
  }
  std::vector<std::uint32_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), std::uint32_t{0});
  Rng rng(seed, kShuffleStream);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.next_below(i)]);
  }
  SplitResult out;
  out.train.reserve(static_cast<std::size_t>(train_size));
  out.eval.reserve(static_cast<std::size_t>(eval_size));
  for (std::int64_t i = 0; i < train_size; ++i) {
    out.train.push_back(rows[perm[static_cast<std::size_t>(i)]]);
  }
  for (std::int64_t i = train_size; i < train_size + eval_size; ++i) {
    out.eval.push_back(rows[perm[static_cast<std::size_t>(i)]]);
  }
  return out;
}

TauFunction tau_function_from_string(const std::string& name) {
  if (name == "linear-in-x1" || name == "linear_in_x1") return TauFunction::linear_in_x1;
  if (name == "step-in-x1" || name == "step_in_x1") return TauFunction::step_in_x1;
  if (name == "zero") return TauFunction::zero;
  throw std::invalid_argument("unknown tau function: " + name);
}

const char* to_string(TauFunction f) noexcept {
  switch (f) {
    case TauFunction::linear_in_x1: return "linear-in-x1";
    case TauFunction::step_in_x1: return "step-in-x1";
    case TauFunction::zero: return "zero";
  }
  return "unknown";
}

namespace {

void validate_env(const SyntheticEnvConfig& c) {
  if (c.n_users < 0) throw std::invalid_argument("synthetic env: n_users must be nonnegative");
  if (c.feature_dim <= 0) throw std::invalid_argument("synthetic env: feature_dim must be positive");
  if (!(c.arm_split >= 0.0 && c.arm_split <= 1.0)) {
    throw std::invalid_argument("synthetic env: arm_split must lie in [0, 1]");
  }
  // valid-probability check; linear tau is unbounded in principle, so gate it
  // at four standard deviations of x1 (outcome probabilities are clamped too)
  double max_tau = 0.0;
  switch (c.tau_function) {
    case TauFunction::step_in_x1: max_tau = std::abs(c.tau_scale); break;
    case TauFunction::linear_in_x1: max_tau = 4.0 * std::abs(c.tau_scale); break;
    case TauFunction::zero: max_tau = 0.0; break;
  }
  if (c.base_rate + max_tau > 1.0 || c.base_rate - max_tau < 0.0) {
    throw std::invalid_argument("synthetic env: base_rate +- tau leaves [0, 1]");
  }
}

// per-user block of 2d + 2 draws: d gaussians, then the arm and outcome
// uniforms; consumption is exact, so sequential and jumped streams align
void synth_user(const SyntheticEnvConfig& c, Rng& rng, Observation& o, double& tau_out) {
  const int d = c.feature_dim;
  o.features.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) o.features[static_cast<std::size_t>(j)] = rng.next_gaussian();
  o.logged_arm = rng.next_unit() < c.arm_split ? 1 : 0;
  tau_out = tau_of(c.tau_function, c.tau_scale, o.features[0]);
  const double p = std::clamp(c.base_rate + o.logged_arm * tau_out, 0.0, 1.0);
  o.outcome = rng.next_unit() < p ? 1 : 0;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticEnvConfig& config) {
  validate_env(config);
  const std::int64_t n = config.n_users;
  const std::uint64_t block = 2 * static_cast<std::uint64_t>(config.feature_dim) + 2;
  SyntheticDataset out;
  out.rows.resize(static_cast<std::size_t>(n));
  out.true_tau.resize(static_cast<std::size_t>(n));
  out.base_rate = config.base_rate;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(config.seed, kEnvStream);
    rng.skip_to(static_cast<std::uint64_t>(i) * block);
    synth_user(config, rng, out.rows[static_cast<std::size_t>(i)],
               out.true_tau[static_cast<std::size_t>(i)]);
  }
  const std::vector<double> costs = synthesize_costs(n, config.seed, config.cost_mu,
                                                     config.cost_sigma, config.cost_clip_lo,
                                                     config.cost_clip_hi);
  for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].cost = costs[i];
  return out;
}

SyntheticDataset generate_synthetic_reference(const SyntheticEnvConfig& config) {
  validate_env(config);
  const std::int64_t n = config.n_users;
  SyntheticDataset out;
  out.rows.resize(static_cast<std::size_t>(n));
  out.true_tau.resize(static_cast<std::size_t>(n));
  out.base_rate = config.base_rate;
  Rng rng(config.seed, kEnvStream);
  for (std::int64_t i = 0; i < n; ++i) {
    synth_user(config, rng, out.rows[static_cast<std::size_t>(i)],
               out.true_tau[static_cast<std::size_t>(i)]);
  }
  Rng cost_rng(config.seed, kCostStream);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    out.rows[i].cost = std::clamp(cost_rng.next_lognormal(config.cost_mu, config.cost_sigma),
                                  config.cost_clip_lo, config.cost_clip_hi);
  }
  return out;
}

void write_criteo_csv(const std::string& path, std::span<const Observation> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_criteo_csv: cannot open " + path);
  for (int j = 0; j < kCriteoDim; ++j) out << 'f' << j << ',';
  out << "treatment,conversion\n";
  for (const Observation& o : rows) {
    if (static_cast<int>(o.features.size()) != kCriteoDim) {
      throw std::invalid_argument("write_criteo_csv: rows must have 12 features");
    }
    for (const double x : o.features) out << fmt_double(x) << ',';
    out << o.logged_arm << ',' << o.outcome << '\n';
  }
  if (!out) throw std::runtime_error("write_criteo_csv: write failed for " + path);
}

std::vector<FeatureSplitAte> median_split_ates(std::span<const Observation> rows) {
  if (rows.empty()) return {};
  const int dim = static_cast<int>(rows.front().features.size());
  std::vector<FeatureSplitAte> out;
  std::vector<double> values(rows.size());
  for (int j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i].features[static_cast<std::size_t>(j)];
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double median = *mid;

    std::int64_t counts[2][2] = {{0, 0}, {0, 0}};  // [high][arm] user counts
    std::int64_t convs[2][2] = {{0, 0}, {0, 0}};
    for (const Observation& o : rows) {
      const int high = o.features[static_cast<std::size_t>(j)] > median ? 1 : 0;
      counts[high][o.logged_arm] += 1;
      convs[high][o.logged_arm] += o.outcome;
    }
    auto ate_side = [&](int high) {
      const double rt = counts[high][1] > 0
                            ? static_cast<double>(convs[high][1]) / counts[high][1]
                            : 0.0;
      const double rc = counts[high][0] > 0
                            ? static_cast<double>(convs[high][0]) / counts[high][0]
                            : 0.0;
      return rt - rc;
    };
    FeatureSplitAte f;
    f.feature = j;
    f.ate_high = ate_side(1);
    f.ate_low = ate_side(0);
    f.ratio = f.ate_low != 0.0 ? f.ate_high / f.ate_low
                               : std::numeric_limits<double>::quiet_NaN();
    out.push_back(f);
  }
  return out;
}

}  // namespace bccb
