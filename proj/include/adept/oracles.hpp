#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "adept/concepts.hpp"

namespace adept {

enum class OracleKind : std::uint8_t { WeakConsistency, Erm };

// Who issued a query. Reductions and base learners are tallied separately so
// the per-round extension count can be checked on its own.
enum class QuerySource : std::uint8_t { Reduction, BaseLearner };

struct QueryEvent {
  std::size_t round = 0;
  OracleKind kind = OracleKind::WeakConsistency;
};

struct OracleStats {
  std::uint64_t total_queries = 0;
  // Distinct canonical inputs charged. Equals total_queries unless dedup is on.
  std::uint64_t distinct_charged = 0;
  std::uint64_t weak_consistency_queries = 0;
  std::uint64_t erm_queries = 0;
  std::uint64_t base_learner_queries = 0;
  // Queries answered by the fixed default after the budget ran out.
  std::uint64_t throttled_queries = 0;
  // per_round_queries[t] for rounds 1..T; index 0 collects setup-time calls.
  std::vector<std::uint64_t> per_round_queries{0};
};

// A labeled sample that is only materialized if the oracle forwards the query.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual void fill(LabeledSequence& out) const = 0;
};

class SpanSample final : public SampleSource {
 public:
  explicit SpanSample(std::span<const Example> sample) : sample_(sample) {}
  void fill(LabeledSequence& out) const override { out.assign(sample_.begin(), sample_.end()); }

 private:
  std::span<const Example> sample_;
};

// Oracle front for one game: counts every call, optionally charges repeated
// inputs once, enforces an optional budget and announces forwarded queries.
class OracleFront {
 public:
  struct Options {
    bool dedup = false;
    // Calls beyond the budget are answered by a fixed default (weak
    // consistency: realizable) without consulting the class or emitting events.
    std::optional<std::uint64_t> budget;
  };

  explicit OracleFront(std::shared_ptr<const ConceptClass> cls);
  OracleFront(std::shared_ptr<const ConceptClass> cls, Options options);

  void begin_round(std::size_t round);
  std::size_t round() const { return round_; }

  bool weak_consistency(const SampleSource& sample, QuerySource source = QuerySource::Reduction);
  bool weak_consistency(std::span<const Example> sample, QuerySource source = QuerySource::Reduction);
  ErmResult erm(std::span<const Example> sample, QuerySource source = QuerySource::Reduction);

  // True once the budget is spent; every later call is answered by the default.
  bool exhausted() const { return options_.budget && forwarded_ >= *options_.budget; }
  // Records `count` weak-consistency calls made while exhausted, each answered
  // by the default. Same tallies as issuing them one by one.
  void charge_exhausted(std::uint64_t count, QuerySource source);

  void subscribe(std::function<void(const QueryEvent&)> listener);

  const OracleStats& stats() const { return stats_; }
  const ConceptClass& concept_class() const { return *cls_; }
  const Options& options() const { return options_; }
  std::uint64_t queries_this_round() const;
  std::uint64_t reduction_queries_this_round() const { return reduction_this_round_; }
  // Forwarded (non-throttled) queries in the current round, in issue order.
  const std::vector<QueryEvent>& events_this_round() const { return round_events_; }

 private:
  struct Fingerprint {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    OracleKind kind = OracleKind::WeakConsistency;
    bool operator==(const Fingerprint&) const = default;
  };
  struct FingerprintHash {
    std::size_t operator()(const Fingerprint& f) const noexcept { return static_cast<std::size_t>(f.lo ^ (f.hi * 31)); }
  };

  bool charge(OracleKind kind, QuerySource source);
  Fingerprint fingerprint(OracleKind kind);
  void emit(OracleKind kind);

  std::shared_ptr<const ConceptClass> cls_;
  Options options_;
  OracleStats stats_;
  std::size_t round_ = 0;
  std::uint64_t forwarded_ = 0;
  std::uint64_t reduction_this_round_ = 0;
  std::vector<QueryEvent> round_events_;
  std::vector<std::function<void(const QueryEvent&)>> listeners_;
  LabeledSequence scratch_;
  std::unordered_map<Fingerprint, bool, FingerprintHash> wc_cache_;
  std::unordered_map<Fingerprint, ErmResult, FingerprintHash> erm_cache_;
};

// Canonical multiset form of a sample: pairs sorted.
LabeledSequence canonicalize(std::span<const Example> sample);

}  // namespace adept
