#pragma once

#include <memory>
#include <span>
#include <string>

#include "adept/concepts.hpp"
#include "adept/oracles.hpp"

namespace adept {

// Per-prefix state of a deterministic realizable learner. Finite learners keep
// the consistent version space; `sink` marks a prefix no concept explains.
struct LearnerState {
  VersionSpace version_space = 0;
  bool sink = false;
  friend bool operator==(const LearnerState&, const LearnerState&) = default;
};

// What a learner may consult besides its own state: the pseudo-labeled prefix
// it was advanced on and the game's oracle front.
struct PrefixContext {
  const SampleSource* prefix = nullptr;
  OracleFront* oracle = nullptr;
};

// How a learner treats a prefix that emptied its version space. The reference
// expert ensemble may feed such prefixes; the pruned tree never should.
enum class SinkPolicy { Reject, PredictZero };

class BaseLearner {
 public:
  explicit BaseLearner(SinkPolicy policy) : sink_policy_(policy) {}
  virtual ~BaseLearner() = default;

  virtual std::string name() const = 0;
  virtual LearnerState initial_state() const = 0;
  // Deterministic in (state, x, prefix). Does not modify the state.
  virtual Label predict(const LearnerState& state, const Instance& x, const PrefixContext& context) = 0;
  virtual LearnerState advance(const LearnerState& state, const Instance& x, Label y) const = 0;
  virtual int mistake_bound() const = 0;

  SinkPolicy sink_policy() const { return sink_policy_; }

 protected:
  // Shared handling of an exhausted version space.
  Label sink_prediction(const char* who) const;

 private:
  SinkPolicy sink_policy_;
};

// Standard Optimal Algorithm over an explicit class: predicts the label whose
// restriction keeps the larger Littlestone dimension, 0 on ties.
class SoaLearner final : public BaseLearner {
 public:
  explicit SoaLearner(std::shared_ptr<const FiniteConceptClass> cls, SinkPolicy policy = SinkPolicy::Reject);

  std::string name() const override { return "soa"; }
  LearnerState initial_state() const override;
  Label predict(const LearnerState& state, const Instance& x, const PrefixContext& context) override;
  LearnerState advance(const LearnerState& state, const Instance& x, Label y) const override;
  int mistake_bound() const override { return bound_; }

 private:
  std::shared_ptr<const FiniteConceptClass> cls_;
  LittlestoneSolver solver_;
  int bound_ = 0;
};

// Majority vote of the consistent concepts, 0 on exact ties.
class HalvingLearner final : public BaseLearner {
 public:
  explicit HalvingLearner(std::shared_ptr<const FiniteConceptClass> cls, SinkPolicy policy = SinkPolicy::Reject);

  std::string name() const override { return "halving"; }
  LearnerState initial_state() const override;
  Label predict(const LearnerState& state, const Instance& x, const PrefixContext& context) override;
  LearnerState advance(const LearnerState& state, const Instance& x, Label y) const override;
  int mistake_bound() const override;

 private:
  std::shared_ptr<const FiniteConceptClass> cls_;
};

// SOA for unions of at most d blocks, driven by weak consistency alone so it
// never reads the hidden partition. Once the prefix is realizable, SOA picks 1
// exactly when labeling x with 0 is unrealizable: a fresh negative never lowers
// the dimension, while a fresh positive consumes one of the d blocks.
class OracleSoaLearner final : public BaseLearner {
 public:
  explicit OracleSoaLearner(std::size_t max_blocks, SinkPolicy policy = SinkPolicy::Reject);

  std::string name() const override { return "soa"; }
  LearnerState initial_state() const override { return {}; }
  Label predict(const LearnerState& state, const Instance& x, const PrefixContext& context) override;
  LearnerState advance(const LearnerState& state, const Instance& x, Label y) const override;
  int mistake_bound() const override { return static_cast<int>(max_blocks_); }

 private:
  std::size_t max_blocks_;
};

// Appends one example to a lazily materialized prefix.
class ExtendedSample final : public SampleSource {
 public:
  ExtendedSample(const SampleSource* base, Example extra) : base_(base), extra_(extra) {}
  void fill(LabeledSequence& out) const override;

 private:
  const SampleSource* base_;
  Example extra_;
};

// Recomputes a state from scratch by advancing along `prefix`.
LearnerState replay(const BaseLearner& learner, std::span<const Example> prefix);

// "soa" or "halving" for the given class. Throws ConfigError on a mismatch.
std::unique_ptr<BaseLearner> make_base_learner(const std::string& name, std::shared_ptr<const ConceptClass> cls,
                                               SinkPolicy policy = SinkPolicy::Reject);

}  // namespace adept
