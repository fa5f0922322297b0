#include "adept/oracles.hpp"

#include <algorithm>

#include "adept/errors.hpp"

namespace adept {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

LabeledSequence canonicalize(std::span<const Example> sample) {
  LabeledSequence out(sample.begin(), sample.end());
  std::sort(out.begin(), out.end());
  return out;
}

OracleFront::OracleFront(std::shared_ptr<const ConceptClass> cls) : OracleFront(std::move(cls), Options{}) {}

OracleFront::OracleFront(std::shared_ptr<const ConceptClass> cls, Options options)
    : cls_(std::move(cls)), options_(options) {}

void OracleFront::begin_round(std::size_t round) {
  round_ = round;
  if (stats_.per_round_queries.size() < round + 1) stats_.per_round_queries.resize(round + 1, 0);
  reduction_this_round_ = 0;
  round_events_.clear();
}

std::uint64_t OracleFront::queries_this_round() const { return stats_.per_round_queries.at(round_); }

void OracleFront::subscribe(std::function<void(const QueryEvent&)> listener) {
  listeners_.push_back(std::move(listener));
}

bool OracleFront::charge(OracleKind kind, QuerySource source) {
  ++stats_.total_queries;
  ++stats_.per_round_queries[round_];
  (kind == OracleKind::WeakConsistency ? stats_.weak_consistency_queries : stats_.erm_queries) += 1;
  if (source == QuerySource::BaseLearner) ++stats_.base_learner_queries;
  if (source == QuerySource::Reduction) ++reduction_this_round_;
  if (options_.budget && forwarded_ >= *options_.budget) {
    ++stats_.throttled_queries;
    ++stats_.distinct_charged;
    return false;
  }
  return true;
}

void OracleFront::charge_exhausted(std::uint64_t count, QuerySource source) {
  if (!exhausted()) throw InvariantViolation("oracle: bulk charge before the budget is spent");
  stats_.total_queries += count;
  stats_.per_round_queries[round_] += count;
  stats_.weak_consistency_queries += count;
  if (source == QuerySource::BaseLearner) stats_.base_learner_queries += count;
  if (source == QuerySource::Reduction) reduction_this_round_ += count;
  stats_.throttled_queries += count;
  stats_.distinct_charged += count;
}

OracleFront::Fingerprint OracleFront::fingerprint(OracleKind kind) {
  std::sort(scratch_.begin(), scratch_.end());
  std::uint64_t lo = mix(scratch_.size());
  std::uint64_t hi = mix(scratch_.size() ^ 0xA5A5A5A5A5A5A5A5ULL);
  for (const auto& ex : scratch_) {
    const std::uint64_t a = ex.x.major;
    const std::uint64_t b = (ex.x.minor << 2) | (static_cast<std::uint64_t>(ex.x.structured) << 1) |
                            static_cast<std::uint64_t>(bit(ex.y));
    lo = mix(lo ^ mix(a) ^ (mix(b) << 1));
    hi = mix(hi + mix(a ^ 0x5851F42D4C957F2DULL) + mix(b ^ 0x14057B7EF767814FULL));
  }
  return Fingerprint{lo, hi, kind};
}

void OracleFront::emit(OracleKind kind) {
  ++forwarded_;
  QueryEvent event{round_, kind};
  round_events_.push_back(event);
  for (const auto& listener : listeners_) listener(event);
}

bool OracleFront::weak_consistency(const SampleSource& sample, QuerySource source) {
  if (!charge(OracleKind::WeakConsistency, source)) return true;
  sample.fill(scratch_);
  if (!options_.dedup) {
    ++stats_.distinct_charged;
    emit(OracleKind::WeakConsistency);
    return cls_->weak_consistent(scratch_);
  }
  const auto key = fingerprint(OracleKind::WeakConsistency);
  if (auto it = wc_cache_.find(key); it != wc_cache_.end()) return it->second;
  ++stats_.distinct_charged;
  emit(OracleKind::WeakConsistency);
  const bool answer = cls_->weak_consistent(scratch_);
  wc_cache_.emplace(key, answer);
  return answer;
}

bool OracleFront::weak_consistency(std::span<const Example> sample, QuerySource source) {
  return weak_consistency(SpanSample(sample), source);
}

ErmResult OracleFront::erm(std::span<const Example> sample, QuerySource source) {
  if (!charge(OracleKind::Erm, source)) return cls_->erm({});
  if (!options_.dedup) {
    ++stats_.distinct_charged;
    emit(OracleKind::Erm);
    return cls_->erm(sample);
  }
  scratch_.assign(sample.begin(), sample.end());
  const auto key = fingerprint(OracleKind::Erm);
  if (auto it = erm_cache_.find(key); it != erm_cache_.end()) return it->second;
  ++stats_.distinct_charged;
  emit(OracleKind::Erm);
  auto answer = cls_->erm(scratch_);
  erm_cache_.emplace(key, answer);
  return answer;
}

}  // namespace adept
