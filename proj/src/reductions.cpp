#include "adept/reductions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "adept/errors.hpp"

namespace adept {
namespace {

mpq_class power(const mpq_class& base, std::uint64_t exponent) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return mpq_class(num, den);
}

double expected_loss(double p1, Label y) { return y == Label::One ? 1.0 - p1 : p1; }

// Pseudo-labeled prefix held as a plain label vector.
class VectorSample final : public SampleSource {
 public:
  VectorSample(std::span<const Instance> instances, const Dichotomy& labels) : instances_(instances), labels_(labels) {}
  void fill(LabeledSequence& out) const override {
    out.clear();
    for (std::size_t i = 0; i < labels_.size(); ++i) out.push_back(Example{instances_[i], labels_[i]});
  }

 private:
  std::span<const Instance> instances_;
  const Dichotomy& labels_;
};

}  // namespace

// Learning rates ---------------------------------------------------------------

double default_eta(std::size_t horizon, int budget) {
  if (horizon == 0) return 0.0;
  const double t = static_cast<double>(horizon);
  const double m = std::min(static_cast<double>(std::max(budget, 1)), t);
  return std::sqrt(8.0 * m * std::log(std::exp(1.0) * t / m) / t);
}

double adaptive_eta(double best_loss, double log_schedules) {
  return std::min(0.5, std::sqrt(log_schedules / (best_loss + 1.0)));
}

HedgeParams HedgeParams::fixed(std::size_t horizon, int budget) {
  return fixed_with_eta(horizon, budget, default_eta(horizon, budget));
}

HedgeParams HedgeParams::fixed_with_eta(std::size_t horizon, int budget, double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("learning rate must be finite and >= 0");
  HedgeParams p;
  p.mode = EtaMode::Fixed;
  p.eta = eta;
  p.horizon = horizon;
  p.budget = budget;
  p.log_schedules = future_capacity(horizon, 0, budget, 0).log();
  return p;
}

HedgeParams HedgeParams::adaptive(std::size_t horizon, int budget) {
  HedgeParams p = fixed(horizon, budget);
  p.mode = EtaMode::Adaptive;
  return p;
}

double HedgeParams::eta_for(double best_loss) const {
  return mode == EtaMode::Fixed ? eta : adaptive_eta(best_loss, log_schedules);
}

// Prefix arena -------------------------------------------------------------------

PrefixTree::PrefixTree() { clear(); }

PrefixId PrefixTree::extend(PrefixId parent, Label b) {
  if (nodes_.size() >= std::numeric_limits<PrefixId>::max()) throw CapabilityError("prefix arena exhausted");
  nodes_.push_back(Node{parent, nodes_[parent].depth + 1, b});
  return static_cast<PrefixId>(nodes_.size() - 1);
}

void PrefixTree::labels(PrefixId id, Dichotomy& out) const {
  out.resize(nodes_[id].depth);
  for (std::size_t i = out.size(); i > 0; --i) {
    out[i - 1] = nodes_[id].last;
    id = nodes_[id].parent;
  }
}

Dichotomy PrefixTree::labels(PrefixId id) const {
  Dichotomy out;
  labels(id, out);
  return out;
}

void PrefixTree::truncate(std::size_t n) {
  if (n == 0 || n > nodes_.size()) throw std::invalid_argument("prefix arena truncation out of range");
  nodes_.resize(n);
}

void PrefixTree::clear() {
  nodes_.clear();
  nodes_.push_back(Node{kRoot, 0, Label::Zero});
}

void PrefixSample::fill(LabeledSequence& out) const {
  const std::size_t depth = tree_.depth(prefix_);
  out.resize(depth);
  PrefixId id = prefix_;
  for (std::size_t i = depth; i > 0; --i) {
    out[i - 1] = Example{instances_[i - 1], tree_.last(id)};
    id = tree_.parent(id);
  }
  if (extra_) out.push_back(*extra_);
}

// ADEPT --------------------------------------------------------------------------

Adept::Adept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params)
    : Adept(std::move(learner), oracle, params, Options{}) {}

Adept::Adept(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params, Options options)
    : learner_(std::move(learner)), oracle_(oracle), params_(params), options_(options) {
  if (params_.budget < 0) throw std::invalid_argument("mistake budget must be nonnegative");
  active_.push_back(ActiveNode{PrefixTree::kRoot, 0, 0, Label::Zero, learner_->initial_state()});
}

void Adept::compute_capacities(std::size_t t) {
  // Past the horizon every capacity is C(0, 0) = 1 for k <= M.
  const std::size_t round = std::min(t, params_.horizon);
  const std::size_t parent_round = std::min(t - 1, params_.horizon);
  const int m = params_.budget;
  log_capacity_.assign(static_cast<std::size_t>(m) + 1, 0.0);
  log_parent_capacity_.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    log_capacity_[k] = future_capacity(params_.horizon, round, m, k).log();
    log_parent_capacity_[k] = future_capacity(params_.horizon, parent_round, m, k).log();
  }
  if (options_.numeric == NumericMode::Exact) {
    exact_capacity_.assign(static_cast<std::size_t>(m) + 1, 0);
    exact_parent_capacity_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int k = 0; k <= m; ++k) {
      exact_capacity_[k] = future_capacity_exact(params_.horizon, round, m, k);
      exact_parent_capacity_[k] = future_capacity_exact(params_.horizon, parent_round, m, k);
    }
  }
}

const mpq_class& Adept::beta_power(std::uint64_t exponent) {
  auto it = beta_powers_.find(exponent);
  if (it == beta_powers_.end()) it = beta_powers_.emplace(exponent, power(beta_, exponent)).first;
  return it->second;
}

PredictionDistribution Adept::predict(const Instance& x) {
  if (pending_) throw InvariantViolation("adept: predict called twice without observe/discard");
  const std::size_t t = history_.size() + 1;
  if (t > params_.horizon && !options_.allow_overrun) {
    throw InvariantViolation("adept: round " + std::to_string(t) + " exceeds horizon " +
                             std::to_string(params_.horizon));
  }

  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& node : active_) best = std::min(best, node.loss);
  const double eta = params_.eta_for(static_cast<double>(best));
  if (options_.numeric == NumericMode::Exact && (eta != eta_ || beta_powers_.empty())) {
    beta_ = mpq_class(std::exp(-eta));
    beta_powers_.clear();
  }
  eta_ = eta;
  compute_capacities(t);

  history_.push_back(x);
  const std::span<const Instance> previous(history_.data(), t - 1);
  tree_mark_ = tree_.size();
  tentative_.clear();

  std::uint64_t queries = 0;
  // A spent budget stays spent for the rest of the round, so the extension
  // queries can be tallied in one step; each would have answered "consistent".
  const bool exhausted = oracle_.exhausted();
  tentative_.reserve(2 * active_.size());
  for (const auto& parent : active_) {
    const PrefixSample prefix(tree_, parent.prefix, previous);
    const Label predicted = learner_->predict(parent.state, x, PrefixContext{&prefix, &oracle_});
    for (Label b : {Label::Zero, Label::One}) {
      ++queries;
      if (!exhausted) {
        const PrefixSample proposed(tree_, parent.prefix, previous, Example{x, b});
        if (!oracle_.weak_consistency(proposed, QuerySource::Reduction)) continue;
      }
      const int mistakes = parent.mistakes + (b != predicted ? 1 : 0);
      if (mistakes > params_.budget) continue;
      tentative_.push_back(ActiveNode{tree_.extend(parent.prefix, b), mistakes, parent.loss, b, parent.state});
    }
  }
  if (exhausted) oracle_.charge_exhausted(queries, QuerySource::Reduction);
  last_extension_queries_ = queries;

  if (tentative_.empty()) {
    tree_.truncate(tree_mark_);
    history_.pop_back();
    throw InvariantViolation("adept: every extension pruned at round " + std::to_string(t) +
                             " (empty class or inconsistent oracle)");
  }
  pending_ = true;

  PredictionDistribution out;
  aggregate(out);

  if (options_.record_potentials) {
    PotentialRecord rec;
    rec.round = t;
    rec.eta = eta_;
    std::vector<double> terms;
    for (const auto& v : active_) terms.push_back(log_parent_capacity_[v.mistakes] - eta_ * static_cast<double>(v.loss));
    rec.log_z_prev = log_sum_exp(terms);
    rec.log_z_mid = options_.numeric == NumericMode::Exact ? log_mass(tentative_, nullptr) : log_z_mid_;
    if (options_.numeric == NumericMode::Exact) {
      mpq_class prev = 0;
      for (const auto& v : active_) prev += mpq_class(exact_parent_capacity_[v.mistakes]) * beta_power(v.loss);
      mpq_class mid = 0;
      for (const auto& u : tentative_) mid += mpq_class(exact_capacity_[u.mistakes]) * beta_power(u.loss);
      rec.z_prev = prev;
      rec.z_mid = mid;
    }
    potentials_.push_back(std::move(rec));
  }
  return out;
}

const double* Adept::decay_table(std::uint64_t span) {
  if (decay_eta_ != eta_) {
    decay_.clear();
    decay_eta_ = eta_;
  }
  while (decay_.size() <= span) decay_.push_back(std::exp(-eta_ * static_cast<double>(decay_.size())));
  return decay_.data();
}

double Adept::log_mass(const std::vector<ActiveNode>& nodes, double* ones_out) {
  if (nodes.empty()) {
    if (ones_out) *ones_out = 0.0;
    return -std::numeric_limits<double>::infinity();
  }
  // Weights relative to the largest capacity and the smallest loss, so one
  // exp table per learning rate replaces an exp per node.
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (const auto& u : nodes) {
    lo = std::min(lo, u.loss);
    hi = std::max(hi, u.loss);
  }
  const double* decay = decay_table(hi - lo);
  scale_.resize(log_capacity_.size());
  for (std::size_t k = 0; k < log_capacity_.size(); ++k) scale_[k] = std::exp(log_capacity_[k] - log_capacity_[0]);
  double total = 0.0;
  double ones = 0.0;
  for (const auto& u : nodes) {
    const double w = scale_[u.mistakes] * decay[u.loss - lo];
    total += w;
    if (u.last == Label::One) ones += w;
  }
  if (ones_out) *ones_out = ones / total;
  return std::log(total) + log_capacity_[0] - eta_ * static_cast<double>(lo);
}

void Adept::aggregate(PredictionDistribution& out) {
  if (options_.numeric == NumericMode::Exact) {
    mpq_class total = 0;
    mpq_class ones = 0;
    for (const auto& u : tentative_) {
      mpq_class w = mpq_class(exact_capacity_[u.mistakes]) * beta_power(u.loss);
      if (u.last == Label::One) ones += w;
      total += w;
    }
    mpq_class p = ones / total;
    p.canonicalize();
    out.p1 = p.get_d();
    out.exact = p;
  } else {
    double p = 0.0;
    log_z_mid_ = log_mass(tentative_, &p);
    out.p1 = std::clamp(p, 0.0, 1.0);
    out.exact.reset();
  }
  p1_ = out.p1;
  exact_p1_ = out.exact;
}

void Adept::observe(Label y) {
  if (!pending_) throw InvariantViolation("adept: observe without a pending prediction");
  const Instance& x = history_.back();
  for (auto& u : tentative_) {
    if (u.last != y) ++u.loss;
    u.state = learner_->advance(u.state, x, u.last);
  }
  if (options_.record_potentials) {
    auto& rec = potentials_.back();
    rec.expected_loss = exact_p1_ ? expected_loss(exact_p1_->get_d(), y) : expected_loss(p1_, y);
    std::vector<double> terms;
    for (const auto& u : tentative_) terms.push_back(log_capacity_[u.mistakes] - eta_ * static_cast<double>(u.loss));
    rec.log_z_post = log_sum_exp(terms);
    if (options_.numeric == NumericMode::Exact) {
      mpq_class post = 0;
      for (const auto& u : tentative_) post += mpq_class(exact_capacity_[u.mistakes]) * beta_power(u.loss);
      rec.z_post = post;
    }
  }
  active_.swap(tentative_);
  tentative_.clear();
  pending_ = false;
}

void Adept::discard() {
  if (!pending_) throw InvariantViolation("adept: discard without a pending prediction");
  tentative_.clear();
  tree_.truncate(tree_mark_);
  history_.pop_back();
  if (options_.record_potentials) potentials_.pop_back();
  pending_ = false;
}

std::vector<Dichotomy> Adept::active_prefixes() const {
  std::vector<Dichotomy> out;
  out.reserve(active_.size());
  for (const auto& node : active_) out.push_back(tree_.labels(node.prefix));
  return out;
}

// Reference expert ensemble ------------------------------------------------------

Bdpss::Bdpss(std::shared_ptr<BaseLearner> learner, OracleFront& oracle, HedgeParams params, Options options)
    : learner_(std::move(learner)), oracle_(oracle), params_(params), options_(options) {
  if (params_.horizon > kMaxHorizon || params_.budget > kMaxBudget || params_.budget < 0) {
    throw CapabilityError("bdpss: explicit ensemble limited to T <= " + std::to_string(kMaxHorizon) +
                          " and M <= " + std::to_string(kMaxBudget));
  }
  const std::uint32_t limit = std::uint32_t{1} << params_.horizon;
  for (std::uint32_t schedule = 0; schedule < limit; ++schedule) {
    if (std::popcount(schedule) > params_.budget) continue;
    experts_.push_back(Expert{schedule, learner_->initial_state(), 0, {}, true});
  }
}

std::size_t Bdpss::active_count() const {
  return static_cast<std::size_t>(std::count_if(experts_.begin(), experts_.end(), [](const Expert& e) { return e.alive; }));
}

std::size_t Bdpss::sink_experts() const {
  return static_cast<std::size_t>(
      std::count_if(experts_.begin(), experts_.end(), [](const Expert& e) { return e.alive && e.state.sink; }));
}

PredictionDistribution Bdpss::predict(const Instance& x) {
  if (pending_) throw InvariantViolation("bdpss: predict called twice without observe");
  const std::size_t t = history_.size() + 1;
  if (t > params_.horizon) throw InvariantViolation("bdpss: round exceeds horizon");

  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& e : experts_) {
    if (e.alive) best = std::min(best, e.loss);
  }
  const double eta = params_.eta_for(static_cast<double>(best));
  history_.push_back(x);
  const std::span<const Instance> previous(history_.data(), t - 1);
  const std::span<const Instance> current(history_.data(), t);

  for (auto& e : experts_) {
    if (!e.alive) continue;
    const VectorSample prefix(previous, e.labels);
    const Label predicted = learner_->predict(e.state, x, PrefixContext{&prefix, &oracle_});
    const bool flip_now = ((e.schedule >> (t - 1)) & 1U) != 0;
    e.labels.push_back(flip_now ? flip(predicted) : predicted);
    if (options_.prune_experts) {
      const VectorSample proposed(current, e.labels);
      if (!oracle_.weak_consistency(proposed, QuerySource::Reduction)) e.alive = false;
    }
  }

  PredictionDistribution out;
  if (options_.numeric == NumericMode::Exact) {
    const mpq_class beta(std::exp(-eta));
    std::map<std::uint64_t, mpq_class> powers;
    mpq_class total = 0;
    mpq_class ones = 0;
    for (const auto& e : experts_) {
      if (!e.alive) continue;
      auto it = powers.find(e.loss);
      if (it == powers.end()) it = powers.emplace(e.loss, power(beta, e.loss)).first;
      total += it->second;
      if (e.labels.back() == Label::One) ones += it->second;
    }
    if (total == 0) throw InvariantViolation("bdpss: every expert pruned");
    mpq_class p = ones / total;
    p.canonicalize();
    out.p1 = p.get_d();
    out.exact = p;
  } else {
    std::vector<double> all;
    std::vector<double> ones;
    for (const auto& e : experts_) {
      if (!e.alive) continue;
      const double w = -eta * static_cast<double>(e.loss);
      all.push_back(w);
      if (e.labels.back() == Label::One) ones.push_back(w);
    }
    if (all.empty()) throw InvariantViolation("bdpss: every expert pruned");
    out.p1 = ones.empty() ? 0.0 : std::clamp(std::exp(log_sum_exp(ones) - log_sum_exp(all)), 0.0, 1.0);
  }
  pending_ = true;
  return out;
}

void Bdpss::observe(Label y) {
  if (!pending_) throw InvariantViolation("bdpss: observe without a pending prediction");
  const Instance& x = history_.back();
  for (auto& e : experts_) {
    if (!e.alive) continue;
    const Label v = e.labels.back();
    if (v != y) ++e.loss;
    e.state = learner_->advance(e.state, x, v);
  }
  pending_ = false;
}

}  // namespace adept
