#include "adept/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "adept/errors.hpp"

namespace adept {

SampledSet::SampledSet(std::size_t horizon, std::vector<std::size_t> rounds)
    : horizon_(horizon), rounds_(std::move(rounds)) {
  std::sort(rounds_.begin(), rounds_.end());
  if (std::adjacent_find(rounds_.begin(), rounds_.end()) != rounds_.end()) {
    throw std::invalid_argument("sampled rounds must be distinct");
  }
  if (!rounds_.empty() && (rounds_.front() == 0 || rounds_.back() > horizon_)) {
    throw std::invalid_argument("sampled rounds must lie in [1, T]");
  }
}

bool SampledSet::contains(std::size_t round) const {
  return std::binary_search(rounds_.begin(), rounds_.end(), round);
}

SampledSet draw_sample(std::size_t horizon, std::size_t k, Rng& rng) {
  if (k == 0 || k > horizon) {
    throw std::invalid_argument("sample size K must satisfy 0 < K <= T (K=" + std::to_string(k) +
                                ", T=" + std::to_string(horizon) + ")");
  }
  // Floyd's algorithm: each K-subset is equally likely.
  std::unordered_set<std::size_t> chosen;
  std::vector<std::size_t> rounds;
  rounds.reserve(k);
  for (std::size_t j = horizon - k + 1; j <= horizon; ++j) {
    const std::size_t r = 1 + rng.below(j);
    const std::size_t pick = chosen.insert(r).second ? r : j;
    if (pick == j) chosen.insert(j);
    rounds.push_back(pick);
  }
  return SampledSet(horizon, std::move(rounds));
}

std::size_t subsample_size(std::size_t horizon, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("exponent c must lie in (0, 1]");
  if (horizon == 0) return 0;
  // The nudge keeps exact powers such as 256^0.5 from rounding down to 15.
  const auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(horizon), c) * (1.0 + 1e-12)));
  return std::clamp<std::size_t>(k, 1, horizon);
}

bool SampleGuard::contains(std::size_t round) {
  ++reads_;
  if (round > round_ || (round == round_ && !emitted_)) ++early_reads_;
  return set_.contains(round);
}

LazyAdept::LazyAdept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params,
                     SampledSet sample, Adept::Options options)
    : inner_(std::move(learner), oracle, params, [&] {
        options.allow_overrun = true;
        return options;
      }()),
      guard_(std::move(sample)) {}

PredictionDistribution LazyAdept::predict(const Instance& x) {
  ++round_;
  guard_.begin_round(round_);
  auto out = inner_.predict(x);
  guard_.prediction_emitted();
  return out;
}

void LazyAdept::observe(Label y) {
  if (!inner_.pending()) throw InvariantViolation("lazy-adept: observe without a pending prediction");
  if (guard_.contains(round_)) {
    inner_.observe(y);
  } else {
    inner_.discard();
  }
}

}  // namespace adept
