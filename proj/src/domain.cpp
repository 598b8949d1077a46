#include "bccb/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace bccb {

BetaPosterior posterior_update(BetaPosterior p, int outcome) {
  if (outcome != 0 && outcome != 1) {
    throw std::invalid_argument("posterior_update: outcome must be 0 or 1");
  }
  if (outcome == 1) {
    p.alpha += 1.0;
  } else {
    p.beta += 1.0;
  }
  return p;
}

double posterior_sample(const BetaPosterior& p, Rng& rng) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw std::invalid_argument("posterior_sample: alpha and beta must be positive");
  }
  const double ga = rng.next_gamma(p.alpha);
  const double gb = rng.next_gamma(p.beta);
  const double x = ga / (ga + gb);
  // keep the draw strictly inside (0, 1) against denormal-edge arithmetic
  constexpr double kEdge = 1e-300;
  return std::clamp(x, kEdge, 1.0 - 1e-16);
}

const char* to_string(DecisionReason r) noexcept {
  switch (r) {
    case DecisionReason::BudgetExceeded: return "budget_exceeded";
    case DecisionReason::BelowThreshold: return "below_threshold";
    case DecisionReason::Treated: return "treated";
    case DecisionReason::AlwaysRule: return "always_rule";
  }
  return "unknown";
}

}  // namespace bccb
