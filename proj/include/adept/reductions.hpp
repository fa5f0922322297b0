#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adept/base_learners.hpp"
#include "adept/combinatorics.hpp"
#include "adept/learner.hpp"
#include "adept/oracles.hpp"

namespace adept {

enum class NumericMode { Log, Exact };
enum class EtaMode { Fixed, Adaptive };

// eta = sqrt(8 M' ln(e T / M') / T) with M' = max(M, 1), and M' capped at T so
// the logarithm stays positive.
double default_eta(std::size_t horizon, int budget);

// min(1/2, sqrt(log_N / (L* + 1))).
double adaptive_eta(double best_loss, double log_schedules);

struct HedgeParams {
  EtaMode mode = EtaMode::Fixed;
  double eta = 0.0;
  std::size_t horizon = 0;
  int budget = 0;
  // ln sum_{j<=M} C(T, j); used by the adaptive rate.
  double log_schedules = 0.0;

  static HedgeParams fixed(std::size_t horizon, int budget);
  static HedgeParams fixed_with_eta(std::size_t horizon, int budget, double eta);
  static HedgeParams adaptive(std::size_t horizon, int budget);

  double eta_for(double best_loss) const;
};

// Arena of pseudo-label prefixes stored as parent links. Id 0 is the empty prefix.
using PrefixId = std::uint32_t;

class PrefixTree {
 public:
  static constexpr PrefixId kRoot = 0;

  PrefixTree();

  PrefixId extend(PrefixId parent, Label b);
  PrefixId parent(PrefixId id) const { return nodes_[id].parent; }
  Label last(PrefixId id) const { return nodes_[id].last; }
  std::size_t depth(PrefixId id) const { return nodes_[id].depth; }
  // Root-to-node labels.
  void labels(PrefixId id, Dichotomy& out) const;
  Dichotomy labels(PrefixId id) const;

  std::size_t size() const { return nodes_.size(); }
  // Drops every node created after the arena had `n` nodes.
  void truncate(std::size_t n);
  void clear();

 private:
  struct Node {
    PrefixId parent;
    std::uint32_t depth;
    Label last;
  };
  std::vector<Node> nodes_;
};

// (x_1, v_1), ..., (x_t, v_t) for a stored prefix, optionally followed by one
// proposed example. Materialized only when an oracle forwards the query.
class PrefixSample final : public SampleSource {
 public:
  PrefixSample(const PrefixTree& tree, PrefixId prefix, std::span<const Instance> instances,
               std::optional<Example> extra = std::nullopt)
      : tree_(tree), prefix_(prefix), instances_(instances), extra_(extra) {}

  void fill(LabeledSequence& out) const override;

 private:
  const PrefixTree& tree_;
  PrefixId prefix_;
  std::span<const Instance> instances_;
  std::optional<Example> extra_;
};

struct ActiveNode {
  PrefixId prefix = PrefixTree::kRoot;
  int mistakes = 0;        // disagreements with the base learner along the prefix
  std::uint64_t loss = 0;  // disagreements with the true labels
  Label last = Label::Zero;
  LearnerState state;
};

// Hedge potentials of one round under that round's learning rate:
// z_prev = sum_{v in V_{t-1}} W_{t-1}(v) e^{-eta L_{t-1}(v)},
// z_mid  = sum_{u in V_t} W_t(u) e^{-eta L_{t-1}(parent u)},
// z_post = sum_{u in V_t} W_t(u) e^{-eta L_t(u)}.
struct PotentialRecord {
  std::size_t round = 0;
  double eta = 0.0;
  double expected_loss = 0.0;
  double log_z_prev = 0.0;
  double log_z_mid = 0.0;
  double log_z_post = 0.0;
  std::optional<mpq_class> z_prev;
  std::optional<mpq_class> z_mid;
  std::optional<mpq_class> z_post;
};

// Pruned expert tree over realizable pseudo-label prefixes.
class Adept final : public OnlineLearner {
 public:
  struct Options {
    NumericMode numeric = NumericMode::Log;
    bool record_potentials = false;
    // Rounds past the horizon keep running with unit capacities (lazy wrapper).
    bool allow_overrun = false;
  };

  Adept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params, Options options);
  Adept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params);

  std::string name() const override { return "adept"; }

  // Extends every active prefix by both bits, prunes unrealizable and
  // over-budget extensions, and aggregates the survivors.
  PredictionDistribution predict(const Instance& x) override;
  // Charges the true label to the tentative set and commits it.
  void observe(Label y) override;
  // Abandons the tentative set; the committed state is left untouched.
  void discard();

  std::size_t active_count() const override { return pending_ ? tentative_.size() : active_.size(); }

  std::size_t round() const { return history_.size() - (pending_ ? 1 : 0); }
  bool pending() const { return pending_; }
  const HedgeParams& params() const { return params_; }
  double current_eta() const { return eta_; }
  const std::vector<ActiveNode>& active() const { return active_; }
  const std::vector<ActiveNode>& tentative() const { return tentative_; }
  const std::vector<Instance>& history() const { return history_; }
  const PrefixTree& tree() const { return tree_; }
  Dichotomy labels(const ActiveNode& node) const { return tree_.labels(node.prefix); }
  std::vector<Dichotomy> active_prefixes() const;
  const BaseLearner& base_learner() const { return *learner_; }
  const std::vector<PotentialRecord>& potentials() const { return potentials_; }
  std::uint64_t last_extension_queries() const { return last_extension_queries_; }

 private:
  void compute_capacities(std::size_t t);
  void aggregate(PredictionDistribution& out);
  // ln sum_u W(u) e^{-eta L(u)} over `nodes` with this round's capacities;
  // `ones_out` receives the share of nodes whose last label is 1.
  double log_mass(const std::vector<ActiveNode>& nodes, double* ones_out);
  const double* decay_table(std::uint64_t span);

  std::shared_ptr<BaseLearner> learner_;
  OracleFront& oracle_;
  HedgeParams params_;
  Options options_;

  PrefixTree tree_;
  std::vector<Instance> history_;
  std::vector<ActiveNode> active_;
  std::vector<ActiveNode> tentative_;
  std::size_t tree_mark_ = 0;
  bool pending_ = false;
  double eta_ = 0.0;
  double p1_ = 0.0;
  std::optional<mpq_class> exact_p1_;
  std::uint64_t last_extension_queries_ = 0;

  // Capacities W_t for k = 0..M at the pending round, and W_{t-1} for parents.
  std::vector<double> log_capacity_;
  std::vector<double> log_parent_capacity_;
  std::vector<mpz_class> exact_capacity_;
  std::vector<mpz_class> exact_parent_capacity_;
  mpq_class beta_;
  std::map<std::uint64_t, mpq_class> beta_powers_;

  std::vector<PotentialRecord> potentials_;
  std::vector<double> decay_;
  double decay_eta_ = -1.0;
  std::vector<double> scale_;
  double log_z_mid_ = 0.0;

  const mpq_class& beta_power(std::uint64_t exponent);
};

// Reference expert ensemble over every mistake schedule with at most M ones.
// With `prune_experts`, an expert is removed the first round its pseudo-label
// prefix fails weak consistency. Brute-force scale only.
class Bdpss final : public OnlineLearner {
 public:
  static constexpr std::size_t kMaxHorizon = 12;
  static constexpr int kMaxBudget = 3;

  struct Options {
    NumericMode numeric = NumericMode::Exact;
    bool prune_experts = true;
  };

  Bdpss(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params, Options options);

  std::string name() const override { return "bdpss"; }
  PredictionDistribution predict(const Instance& x) override;
  void observe(Label y) override;
  std::size_t active_count() const override;

  std::size_t expert_count() const { return experts_.size(); }
  // Live experts whose base learner fell into the vacuous sink.
  std::size_t sink_experts() const;

 private:
  struct Expert {
    std::uint32_t schedule = 0;  // bit t-1 set: flip the base prediction at round t
    LearnerState state;
    std::uint64_t loss = 0;
    Dichotomy labels;
    bool alive = true;
  };

  std::shared_ptr<BaseLearner> learner_;
  OracleFront& oracle_;
  HedgeParams params_;
  Options options_;
  std::vector<Expert> experts_;
  std::vector<Instance> history_;
  bool pending_ = false;
};

}  // namespace adept
