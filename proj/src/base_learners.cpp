#include "adept/base_learners.hpp"

#include <bit>

#include "adept/errors.hpp"

namespace adept {
namespace {

std::size_t finite_point(const FiniteConceptClass& cls, const Instance& x) {
  if (x.structured || x.major >= cls.domain_size()) {
    throw std::invalid_argument("instance " + to_string(x) + " outside the learner's domain");
  }
  return static_cast<std::size_t>(x.major);
}

LearnerState advance_version_space(const FiniteConceptClass& cls, const LearnerState& state, const Instance& x,
                                   Label y) {
  if (state.sink) return state;
  LearnerState next{cls.restrict(state.version_space, finite_point(cls, x), y), false};
  next.sink = next.version_space == 0;
  return next;
}

}  // namespace

Label BaseLearner::sink_prediction(const char* who) const {
  if (sink_policy_ == SinkPolicy::PredictZero) return Label::Zero;
  throw InvariantViolation(std::string(who) + ": prediction requested on an unrealizable prefix");
}

// SOA ------------------------------------------------------------------------

SoaLearner::SoaLearner(std::shared_ptr<const FiniteConceptClass> cls, SinkPolicy policy)
    : BaseLearner(policy), cls_(std::move(cls)), solver_(*cls_) {
  bound_ = solver_.dimension(cls_->full_space());
}

LearnerState SoaLearner::initial_state() const { return {cls_->full_space(), false}; }

Label SoaLearner::predict(const LearnerState& state, const Instance& x, const PrefixContext&) {
  if (state.sink || state.version_space == 0) return sink_prediction("soa");
  const VersionSpace ones = cls_->restrict(state.version_space, finite_point(*cls_, x), Label::One);
  const VersionSpace zeros = state.version_space & ~ones;
  if (zeros == 0) return Label::One;
  if (ones == 0) return Label::Zero;
  return solver_.dimension(ones) > solver_.dimension(zeros) ? Label::One : Label::Zero;
}

LearnerState SoaLearner::advance(const LearnerState& state, const Instance& x, Label y) const {
  return advance_version_space(*cls_, state, x, y);
}

// Halving --------------------------------------------------------------------

HalvingLearner::HalvingLearner(std::shared_ptr<const FiniteConceptClass> cls, SinkPolicy policy)
    : BaseLearner(policy), cls_(std::move(cls)) {
  if (!cls_->bitset_capable()) throw CapabilityError("halving learner limited to 64 concepts");
}

LearnerState HalvingLearner::initial_state() const { return {cls_->full_space(), false}; }

Label HalvingLearner::predict(const LearnerState& state, const Instance& x, const PrefixContext&) {
  if (state.sink || state.version_space == 0) return sink_prediction("halving");
  const VersionSpace ones = cls_->restrict(state.version_space, finite_point(*cls_, x), Label::One);
  const VersionSpace zeros = state.version_space & ~ones;
  return std::popcount(ones) > std::popcount(zeros) ? Label::One : Label::Zero;
}

LearnerState HalvingLearner::advance(const LearnerState& state, const Instance& x, Label y) const {
  return advance_version_space(*cls_, state, x, y);
}

int HalvingLearner::mistake_bound() const { return std::bit_width(cls_->size()) - 1; }

// Oracle-driven SOA for block unions -----------------------------------------

OracleSoaLearner::OracleSoaLearner(std::size_t max_blocks, SinkPolicy policy)
    : BaseLearner(policy), max_blocks_(max_blocks) {}

Label OracleSoaLearner::predict(const LearnerState&, const Instance& x, const PrefixContext& context) {
  if (context.prefix == nullptr || context.oracle == nullptr) {
    throw InvariantViolation("oracle soa: prediction needs the prefix and an oracle front");
  }
  const ExtendedSample with_zero(context.prefix, Example{x, Label::Zero});
  return context.oracle->weak_consistency(with_zero, QuerySource::BaseLearner) ? Label::Zero : Label::One;
}

LearnerState OracleSoaLearner::advance(const LearnerState& state, const Instance& x, Label) const {
  if (!x.structured) throw std::invalid_argument("oracle soa received non-block instance " + to_string(x));
  return state;
}

// Helpers --------------------------------------------------------------------

void ExtendedSample::fill(LabeledSequence& out) const {
  if (base_ != nullptr) {
    base_->fill(out);
  } else {
    out.clear();
  }
  out.push_back(extra_);
}

LearnerState replay(const BaseLearner& learner, std::span<const Example> prefix) {
  LearnerState state = learner.initial_state();
  for (const auto& ex : prefix) state = learner.advance(state, ex.x, ex.y);
  return state;
}

std::unique_ptr<BaseLearner> make_base_learner(const std::string& name, std::shared_ptr<const ConceptClass> cls,
                                               SinkPolicy policy) {
  if (auto finite = std::dynamic_pointer_cast<const FiniteConceptClass>(cls)) {
    if (!finite->bitset_capable()) {
      throw ConfigError("learner.base: finite learners support at most 64 concepts");
    }
    if (name == "soa") return std::make_unique<SoaLearner>(finite, policy);
    if (name == "halving") return std::make_unique<HalvingLearner>(finite, policy);
    throw ConfigError("learner.base: unknown base learner '" + name + "'");
  }
  if (auto blocks = std::dynamic_pointer_cast<const BlockUnionClass>(cls)) {
    if (name == "soa") return std::make_unique<OracleSoaLearner>(blocks->max_blocks(), policy);
    throw ConfigError("learner.base: block classes support only 'soa'");
  }
  throw ConfigError("learner.base: unsupported concept class");
}

}  // namespace adept
