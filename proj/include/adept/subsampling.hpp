#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "adept/learner.hpp"
#include "adept/reductions.hpp"
#include "adept/rng.hpp"

namespace adept {

// Sorted distinct round indices in [1, T].
class SampledSet {
 public:
  SampledSet() = default;
  SampledSet(std::size_t horizon, std::vector<std::size_t> rounds);

  std::size_t horizon() const { return horizon_; }
  std::size_t size() const { return rounds_.size(); }
  const std::vector<std::size_t>& rounds() const { return rounds_; }
  bool contains(std::size_t round) const;

 private:
  std::size_t horizon_ = 0;
  std::vector<std::size_t> rounds_;
};

// Uniform K-subset of {1..T}. Throws std::invalid_argument unless 0 < K <= T.
SampledSet draw_sample(std::size_t horizon, std::size_t k, Rng& rng);

// floor(T^c), at least 1 for T >= 1.
std::size_t subsample_size(std::size_t horizon, double c);

// Membership access that records reads made before the current round's
// prediction was emitted.
class SampleGuard {
 public:
  explicit SampleGuard(SampledSet set) : set_(std::move(set)) {}

  void begin_round(std::size_t round) {
    round_ = round;
    emitted_ = false;
  }
  void prediction_emitted() { emitted_ = true; }
  bool contains(std::size_t round);

  std::size_t early_reads() const { return early_reads_; }
  std::size_t reads() const { return reads_; }
  const SampledSet& set() const { return set_; }

 private:
  SampledSet set_;
  std::size_t round_ = 0;
  bool emitted_ = false;
  std::size_t reads_ = 0;
  std::size_t early_reads_ = 0;
};

// Lazy rollback wrapper: an internal ADEPT with horizon K predicts every round
// speculatively and commits only on sampled rounds.
class LazyAdept final : public OnlineLearner {
 public:
  // `params` must carry the internal horizon K.
  LazyAdept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params, SampledSet sample,
            Adept::Options options = {});

  std::string name() const override { return "lazy-adept"; }
  PredictionDistribution predict(const Instance& x) override;
  void observe(Label y) override;
  std::size_t active_count() const override { return inner_.active_count(); }

  // r_t: rounds committed so far.
  std::size_t committed() const { return inner_.round(); }
  const Adept& inner() const { return inner_; }
  const SampleGuard& guard() const { return guard_; }

 private:
  Adept inner_;
  SampleGuard guard_;
  std::size_t round_ = 0;
};

}  // namespace adept
