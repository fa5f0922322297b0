#include "adept/verify.hpp"

#include <algorithm>
#include <cstdio>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "adept/combinatorics.hpp"
#include "adept/errors.hpp"
#include "adept/game.hpp"
#include "adept/subsampling.hpp"
#include "adept/transcript.hpp"

namespace adept {
namespace {

using nlohmann::json;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string dichotomy_string(const Dichotomy& d) {
  std::string s;
  for (Label b : d) s.push_back(b == Label::One ? '1' : '0');
  return s;
}

std::vector<std::vector<int>> rows_from_masks(const std::vector<unsigned>& masks, std::size_t n) {
  std::vector<std::vector<int>> rows;
  for (unsigned m : masks) {
    std::vector<int> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<int>((m >> i) & 1u);
    rows.push_back(std::move(row));
  }
  return rows;
}

json finite_class_json(const std::vector<std::vector<int>>& rows) {
  return json{{"type", "finite"}, {"domain_size", rows.empty() ? 0 : rows.front().size()}, {"concepts", rows}};
}

ExperimentConfig make_config(const json& cls, const json& learner, const json& adversary, std::size_t horizon,
                             NumericMode numeric, Charging charging = Charging::Raw) {
  json doc{{"class", cls}, {"learner", learner}, {"adversary", adversary}, {"T", horizon},
           {"numeric", to_string(numeric)}, {"charging", charging == Charging::Raw ? "raw" : "dedup"}};
  return parse_config(doc);
}


LabeledSequence zip(std::span<const Instance> xs, const Dichotomy& labels) {
  LabeledSequence out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back(Example{xs[i], labels[i]});
  return out;
}

// Canonical form of a row set under permutations of the n domain points.
std::vector<unsigned> canonical_rows(const std::vector<unsigned>& masks, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<unsigned> best;
  do {
    std::vector<unsigned> mapped;
    mapped.reserve(masks.size());
    for (unsigned m : masks) {
      unsigned r = 0;
      for (std::size_t i = 0; i < n; ++i) r |= ((m >> i) & 1u) << perm[i];
      mapped.push_back(r);
    }
    std::sort(mapped.begin(), mapped.end());
    if (best.empty() || mapped < best) best = std::move(mapped);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Row sets of size 1..max_concepts over n points, one per relabeling orbit.
std::vector<std::vector<unsigned>> class_orbits(std::size_t n, std::size_t max_concepts) {
  const unsigned universe = 1u << n;
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> current;
  std::function<void(unsigned)> rec = [&](unsigned start) {
    if (!current.empty() && canonical_rows(current, n) == current) out.push_back(current);
    if (current.size() == max_concepts) return;
    for (unsigned r = start; r < universe; ++r) {
      current.push_back(r);
      rec(r + 1);
      current.pop_back();
    }
  };
  rec(0);
  return out;
}

struct EquivalenceLearners {
  std::shared_ptr<BaseLearner> pruned;
  std::shared_ptr<BaseLearner> reference;
};

void equivalence_case(const std::shared_ptr<const FiniteConceptClass>& cls, const EquivalenceLearners& learners,
                      std::span<const Instance> xs, int budget, EtaMode eta, const std::string& tag,
                      CheckReport& report) {
  const std::size_t horizon = xs.size();
  const HedgeParams params =
      eta == EtaMode::Fixed ? HedgeParams::fixed(horizon, budget) : HedgeParams::adaptive(horizon, budget);
  const std::uint64_t sequences = std::uint64_t{1} << horizon;
  for (std::uint64_t mask = 0; mask < sequences; ++mask) {
    OracleFront oracle_a(cls);
    OracleFront oracle_b(cls);
    Adept adept(learners.pruned, oracle_a, params, Adept::Options{NumericMode::Exact, false});
    Bdpss reference(learners.reference, oracle_b, params, Bdpss::Options{NumericMode::Exact, true});
    for (std::size_t t = 1; t <= horizon; ++t) {
      oracle_a.begin_round(t);
      oracle_b.begin_round(t);
      const auto pa = adept.predict(xs[t - 1]);
      const auto pb = reference.predict(xs[t - 1]);
      ++report.checks;
      if (!pa.exact || !pb.exact || *pa.exact != *pb.exact) {
        std::ostringstream s;
        s << tag << " M=" << budget << (eta == EtaMode::Adaptive ? " adaptive" : "") << " labels=";
        for (std::size_t i = 0; i < horizon; ++i) s << ((mask >> i) & 1u);
        s << " round " << t << ": adept p1=" << (pa.exact ? pa.exact->get_str() : "?")
          << " reference p1=" << (pb.exact ? pb.exact->get_str() : "?");
        report.fail(s.str());
        break;
      }
      const Label y = label_from_bit(static_cast<int>((mask >> (t - 1)) & 1u));
      adept.observe(y);
      reference.observe(y);
    }
    if (report.failures.size() > 50) return;
  }
}

// Per-game structural checks on a fleet member.
void check_fleet_game(const FleetGame& fg, unsigned checks, CheckReport& report) {
  GameOptions options;
  options.record_potentials = (checks & kCheckPotentials) != 0;
  Game game(fg.config, fg.seed, options);
  Adept* adept = game.adept();
  const std::string tag = fg.name + " seed=" + std::to_string(fg.seed);
  if (adept == nullptr) {
    report.fail(tag + ": fleet games must run ADEPT");
    return;
  }
  const auto* finite = dynamic_cast<const FiniteConceptClass*>(&game.concept_class());
  const auto* blocks = dynamic_cast<const BlockUnionClass*>(&game.concept_class());
  const std::size_t dvc = finite ? vc_dimension(*finite) : blocks->max_blocks();
  const int budget = game.mistake_budget();
  const bool full_budget = budget >= game.base_learner().mistake_bound();
  const bool raw = fg.config.charging == Charging::Raw;
  const std::size_t horizon = fg.config.horizon;

  OracleFront side_oracle(game.concept_class_ptr());
  std::vector<Instance> xs;
  while (!game.done()) {
    const std::size_t before = adept->active().size();
    game.step();
    const std::size_t t = game.round();
    xs.push_back(game.sequence().back().x);
    const auto& active = adept->active();
    if ((checks & kCheckQueries) && raw) {
      const auto q = game.oracle().reduction_queries_this_round();
      report.expect(q == 2 * before, tag + " round " + std::to_string(t) + ": " + std::to_string(q) +
                                         " extension queries, expected 2*|V_{t-1}| = " + std::to_string(2 * before));
    }
    if (checks & kCheckSauer) {
      const auto bound = sauer_bound(t, dvc);
      report.expect(active.size() <= bound, tag + " round " + std::to_string(t) + ": |V_t|=" +
                                                std::to_string(active.size()) + " > Phi=" + std::to_string(bound));
    }
    if ((checks & kCheckProjection) && finite && full_budget) {
      const auto prefixes = adept->active_prefixes();
      const std::set<Dichotomy> got(prefixes.begin(), prefixes.end());
      const auto want = project(*finite, xs);
      if (!report.expect(got == want && got.size() == prefixes.size(),
                         tag + " round " + std::to_string(t) + ": active set differs from the projection (" +
                             std::to_string(got.size()) + " vs " + std::to_string(want.size()) + ")")) {
        return;
      }
    }
    if (checks & kCheckPurity) {
      std::vector<Instance> probes;
      if (finite) {
        for (std::size_t p = 0; p < finite->domain_size(); ++p) probes.push_back(Instance::point(p));
      } else {
        for (std::uint64_t b = 0; b < 8; ++b) probes.push_back(Instance::in_block(b, 1u << 30));
      }
      auto& base = const_cast<BaseLearner&>(game.base_learner());
      for (const auto& node : active) {
        const auto prefix = zip(xs, adept->labels(node));
        const LearnerState fresh = replay(base, prefix);
        report.expect(fresh == node.state,
                      tag + " round " + std::to_string(t) + ": replayed state differs for prefix " +
                          dichotomy_string(adept->labels(node)));
        const SpanSample sample(prefix);
        for (const auto& x : probes) {
          const Label a = base.predict(node.state, x, PrefixContext{&sample, &side_oracle});
          const Label b = base.predict(fresh, x, PrefixContext{&sample, &side_oracle});
          report.expect(a == b, tag + " round " + std::to_string(t) + ": cached and replayed predictions differ");
        }
      }
    }
  }

  if ((checks & kCheckSurvival) && full_budget && horizon > 0) {
    const auto& seq = game.sequence();
    const auto best = game.concept_class().erm(seq);
    Dichotomy target;
    for (const auto& ex : seq) target.push_back(game.concept_class().evaluate(best.concept_id, ex.x));
    bool found = false;
    for (const auto& node : adept->active()) {
      if (adept->labels(node) == target) {
        found = future_capacity_exact(horizon, horizon, budget, node.mistakes) == 1;
        break;
      }
    }
    report.expect(found, tag + ": comparator prefix " + dichotomy_string(target) + " missing from V_T");
  }

  if ((checks & kCheckPotentials) && horizon > 0) {
    const auto& recs = adept->potentials();
    const bool exact = fg.config.numeric == NumericMode::Exact;
    const bool fixed = fg.config.learner.eta_mode == EtaMode::Fixed;
    if (!report.expect(recs.size() == horizon, tag + ": missing potential records")) return;
    if (exact) {
      report.expect(*recs.front().z_prev == mpq_class(schedule_count(horizon, budget)),
                    tag + ": Z_0 = " + recs.front().z_prev->get_str() + " differs from the schedule count");
    } else {
      report.expect(relative_difference(recs.front().log_z_prev, future_capacity(horizon, 0, budget, 0).log()) <= 1e-9,
                    tag + ": log Z_0 differs from ln N");
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = recs[i];
      const std::string where = tag + " round " + std::to_string(r.round);
      if (exact) {
        const double eta = -std::log(std::exp(-r.eta));
        report.expect(*r.z_mid <= *r.z_prev, where + ": Z'_t > Z_{t-1}");
        const double ratio = mpq_class(*r.z_post / *r.z_mid).get_d();
        const double bound = std::exp(-eta * r.expected_loss + eta * eta / 8.0);
        report.expect(ratio <= bound * (1.0 + 1e-9), where + ": Z_t/Z'_t = " + format_double(ratio) +
                                                         " exceeds exp(-eta l + eta^2/8) = " + format_double(bound));
        if (fixed && i > 0) report.expect(*r.z_prev == *recs[i - 1].z_post, where + ": Z_{t-1} chain broken");
      } else {
        report.expect(r.log_z_mid <= r.log_z_prev + 1e-9, where + ": log Z'_t > log Z_{t-1}");
        report.expect(r.log_z_post - r.log_z_mid <= -r.eta * r.expected_loss + r.eta * r.eta / 8.0 + 1e-9,
                      where + ": Hoeffding step violated in log mode");
      }
    }
  }
}

}  // namespace

void CheckReport::fail(std::string message) {
  passed = false;
  failures.push_back(std::move(message));
}

bool CheckReport::expect(bool ok, const std::string& message) {
  ++checks;
  if (!ok) fail(message);
  return ok;
}

// Pascal ------------------------------------------------------------------------

CheckReport verify_pascal(std::size_t max_horizon, int max_budget) {
  Stopwatch clock;
  CheckReport report;
  report.name = "pascal";
  // Independent count: Pascal's triangle built by addition only.
  std::vector<std::vector<mpz_class>> triangle(max_horizon + 1);
  for (std::size_t n = 0; n <= max_horizon; ++n) {
    triangle[n].assign(n + 1, 1);
    for (std::size_t k = 1; k < n; ++k) triangle[n][k] = triangle[n - 1][k - 1] + triangle[n - 1][k];
  }
  auto count = [&](std::size_t remaining, int slack) {
    mpz_class s = 0;
    for (int j = 0; j <= slack && static_cast<std::size_t>(j) <= remaining; ++j) s += triangle[remaining][j];
    return s;
  };
  for (std::size_t horizon = 0; horizon <= max_horizon; ++horizon) {
    for (int m = 0; m <= max_budget; ++m) {
      for (std::size_t t = 0; t <= horizon; ++t) {
        for (int k = 0; k <= m + 1; ++k) {
          const std::string where =
              "T=" + std::to_string(horizon) + " M=" + std::to_string(m) + " t=" + std::to_string(t) + " k=" + std::to_string(k);
          const mpz_class w = future_capacity_exact(horizon, t, m, k);
          const mpz_class want = k > m ? mpz_class(0) : count(horizon - t, m - k);
          report.expect(w == want, where + ": W=" + w.get_str() + " expected " + want.get_str());
          const LogWeight lw = future_capacity(horizon, t, m, k);
          if (want == 0) {
            report.expect(lw.is_zero(), where + ": log weight of an empty capacity is not zero");
          } else {
            const double ref = std::log(mpz_class(want).get_d());
            report.expect(relative_difference(lw.log(), ref) <= 1e-9 || std::abs(lw.log() - ref) <= 1e-12,
                          where + ": log W=" + format_double(lw.log()) + " vs " + format_double(ref));
          }
          if (t >= 1 && k <= m) {
            const mpz_class parent = future_capacity_exact(horizon, t - 1, m, k);
            const mpz_class split = future_capacity_exact(horizon, t, m, k) + future_capacity_exact(horizon, t, m, k + 1);
            report.expect(parent == split, where + ": W_{t-1}(k)=" + parent.get_str() + " != W_t(k)+W_t(k+1)=" +
                                               split.get_str());
            const double lhs = future_capacity(horizon, t - 1, m, k).log();
            const double rhs = (future_capacity(horizon, t, m, k) + future_capacity(horizon, t, m, k + 1)).log();
            report.expect(relative_difference(lhs, rhs) <= 1e-9 || std::abs(lhs - rhs) <= 1e-12,
                          where + ": log-mode telescoping off by " + format_double(lhs - rhs));
          }
        }
      }
      report.expect(future_capacity_exact(horizon, 0, m, 0) == schedule_count(horizon, m),
                    "T=" + std::to_string(horizon) + " M=" + std::to_string(m) + ": W_0(0) != N");
    }
  }
  report.seconds = clock.seconds();
  return report;
}

// Equivalence -------------------------------------------------------------------

CheckReport verify_equivalence(const EquivalenceOptions& options) {
  Stopwatch clock;
  CheckReport report;
  report.name = "equivalence";
  std::size_t classes = 0;
  std::size_t games = 0;
  for (std::size_t n = 1; n <= options.max_domain; ++n) {
    const auto orbits = class_orbits(n, options.max_concepts);
    for (std::size_t ci = 0; ci < orbits.size(); ++ci) {
      const auto rows = rows_from_masks(orbits[ci], n);
      auto cls = std::make_shared<const FiniteConceptClass>(n, rows);
      ++classes;
      std::vector<std::pair<std::string, EtaMode>> variants{{"soa", EtaMode::Fixed}};
      if (options.variant_stride > 0 && ci % options.variant_stride == 0) {
        variants.emplace_back("halving", EtaMode::Fixed);
        variants.emplace_back("soa", EtaMode::Adaptive);
      }
      std::ostringstream cls_tag;
      cls_tag << "n=" << n << " rows={";
      for (std::size_t r = 0; r < orbits[ci].size(); ++r) cls_tag << (r ? "," : "") << orbits[ci][r];
      cls_tag << "}";
      for (const auto& [base, eta] : variants) {
        EquivalenceLearners learners{make_base_learner(base, cls, SinkPolicy::Reject),
                                     make_base_learner(base, cls, SinkPolicy::PredictZero)};
        for (std::size_t horizon = 1; horizon <= options.max_horizon; ++horizon) {
          for (std::size_t s = 0; s < options.sequences; ++s) {
            Rng rng(derive_stream_seed(options.seed, cls_tag.str() + "/" + std::to_string(horizon) + "/" +
                                                         std::to_string(s)));
            std::vector<Instance> xs;
            for (std::size_t t = 0; t < horizon; ++t) xs.push_back(Instance::point(rng.below(n)));
            std::ostringstream tag;
            tag << cls_tag.str() << " base=" << base << " x=";
            for (const auto& x : xs) tag << x.index();
            for (int m : options.budgets) {
              equivalence_case(cls, learners, xs, m, eta, tag.str(), report);
              games += std::size_t{1} << horizon;
            }
          }
        }
      }
      if (report.failures.size() > 50) break;
    }
  }
  report.note(std::to_string(classes) + " classes (one per relabeling orbit), " + std::to_string(games) +
              " label sequences, " + std::to_string(report.checks) + " rounds compared");
  report.seconds = clock.seconds();
  return report;
}

// Fleet -------------------------------------------------------------------------

std::vector<FleetGame> test_fleet(bool quick) {
  std::vector<FleetGame> fleet;
  std::vector<std::pair<std::string, json>> classes = {
      {"powerset2", json{{"type", "powerset"}, {"n", 2}}},
      {"powerset3", json{{"type", "powerset"}, {"n", 3}}},
      {"singletons3", json{{"type", "singletons"}, {"n", 3}}},
      {"singletons4", json{{"type", "singletons"}, {"n", 4}}},
      {"diagonal", finite_class_json({{0, 0}, {1, 1}})},
  };
  Rng rng(derive_stream_seed(2024, "fleet"));
  const std::size_t random_classes = quick ? 2 : 5;
  for (std::size_t i = 0; i < random_classes; ++i) {
    const std::size_t n = 4 + rng.below(2);
    const std::size_t m = 3 + rng.below(8);
    std::set<unsigned> masks;
    while (masks.size() < m) masks.insert(static_cast<unsigned>(rng.below(1u << n)));
    classes.emplace_back("random" + std::to_string(i),
                         finite_class_json(rows_from_masks(std::vector<unsigned>(masks.begin(), masks.end()), n)));
  }

  const std::vector<std::pair<std::string, json>> learners = {
      {"soa", json{{"reduction", "adept"}, {"base", "soa"}}},
      {"halving", json{{"reduction", "adept"}, {"base", "halving"}}},
      {"soa-adaptive", json{{"reduction", "adept"}, {"base", "soa"}, {"eta", "adaptive"}}},
  };
  const std::size_t seeds = quick ? 1 : 2;
  for (const auto& [cname, cls] : classes) {
    const std::size_t concepts = dynamic_cast<const FiniteConceptClass&>(*make_concept_class(cls)).size();
    const std::vector<std::pair<std::string, json>> adversaries = {
        {"realizable", json{{"type", "realizable"}, {"concept", 0}}},
        {"noisy", json{{"type", "noisy"}, {"concept", concepts - 1}, {"flip", 0.25}}},
    };
    for (const auto& [lname, learner] : learners) {
      for (const auto& [aname, adv] : adversaries) {
        for (std::size_t s = 0; s < seeds; ++s) {
          fleet.push_back({cname + "/" + lname + "/" + aname + "/exact",
                           make_config(cls, learner, adv, quick ? 12 : 24, NumericMode::Exact), 100 + s});
        }
      }
    }
    fleet.push_back({cname + "/soa/noisy/log",
                     make_config(cls, learners[0].second, adversaries[1].second, quick ? 32 : 64, NumericMode::Log),
                     7});
  }

  for (std::size_t d : {1, 2}) {
    const json cls{{"type", "block_union"}, {"d", d}};
    const json learner{{"reduction", "adept"}, {"base", "soa"}};
    json target = json::array();
    for (std::size_t b = 0; b < d; ++b) target.push_back(2 * b);
    const std::string tag = "blocks-d" + std::to_string(d);
    const std::size_t horizon = quick ? 32 : 64;
    fleet.push_back({tag + "/noisy/log",
                     make_config(cls, learner, json{{"type", "noisy"}, {"concept", target}, {"flip", 0.2}, {"blocks", 4}},
                                 horizon, NumericMode::Log),
                     3});
    fleet.push_back({tag + "/realizable/log",
                     make_config(cls, learner, json{{"type", "realizable"}, {"concept", target}, {"blocks", 5}}, horizon,
                                 NumericMode::Log),
                     4});
    fleet.push_back({tag + "/phase_reset/log",
                     make_config(cls, learner, json{{"type", "phase_reset"}, {"d", d}}, horizon, NumericMode::Log), 5});
    fleet.push_back({tag + "/noisy/exact",
                     make_config(cls, learner, json{{"type", "noisy"}, {"concept", target}, {"flip", 0.2}, {"blocks", 3}},
                                 quick ? 16 : 32, NumericMode::Exact),
                     6});
  }
  return fleet;
}

CheckReport verify_run_invariants(const std::vector<FleetGame>& fleet, unsigned checks, const std::string& name) {
  Stopwatch clock;
  CheckReport report;
  report.name = name;
  for (const auto& fg : fleet) {
    try {
      check_fleet_game(fg, checks, report);
    } catch (const std::exception& e) {
      report.fail(fg.name + " seed=" + std::to_string(fg.seed) + ": exception: " + e.what());
    }
    if (report.failures.size() > 50) break;
  }
  report.note(std::to_string(fleet.size()) + " games");
  report.seconds = clock.seconds();
  return report;
}

// Statistical bounds -------------------------------------------------------------

CheckReport verify_regret_bound(const RegretBoundOptions& options) {
  Stopwatch clock;
  CheckReport report;
  report.name = "regret_bound";
  const auto config = make_config(json{{"type", "powerset"}, {"n", 2}}, json{{"reduction", "adept"}, {"base", "soa"}},
                                  json{{"type", "noisy"}, {"concept", 1}, {"flip", options.flip}}, options.horizon,
                                  NumericMode::Log);
  std::vector<double> regrets;
  int budget = 0;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    GameOptions go;
    go.keep_transcript = false;
    const auto result = run_game(config, s, go);
    regrets.push_back(result.summary.expected_regret);
    budget = result.summary.budget;
  }
  const auto stats = mean_se(regrets);
  const double t = static_cast<double>(options.horizon);
  const double m = static_cast<double>(budget);
  const double bound = std::sqrt(0.5 * t * m * std::log(std::exp(1.0) * t / m));
  report.expect(stats.mean <= bound + 3.0 * stats.se,
                "mean expected regret " + format_double(stats.mean) + " exceeds bound " + format_double(bound) +
                    " + 3 SE (" + format_double(stats.se) + ")");
  std::ostringstream s;
  s << "M=" << budget << " mean=" << stats.mean << " SE=" << stats.se << " bound=" << bound << " over " << stats.n
    << " seeds";
  report.note(s.str());
  report.seconds = clock.seconds();
  return report;
}

CheckReport verify_query_separation(const SeparationOptions& options) {
  Stopwatch clock;
  CheckReport report;
  report.name = "query_separation";
  const json cls{{"type", "block_union"}, {"d", 1}};
  const json learner{{"reduction", "adept"}, {"base", "soa"}, {"M_override", options.budget}};
  const json adv{{"type", "noisy"}, {"concept", json::array({0})}, {"flip", 0.1}, {"blocks", 4}};
  const auto raw_cfg = make_config(cls, learner, adv, options.horizon, NumericMode::Log, Charging::Raw);
  const auto dedup_cfg = make_config(cls, learner, adv, options.horizon, NumericMode::Log, Charging::Dedup);
  const auto raw = run_game(raw_cfg, options.seed);
  const auto dedup = run_game(dedup_cfg, options.seed);

  std::uint64_t phi_sum = 0;  // sum_t Phi_1(t-1)
  std::uint64_t active_sum = 1;  // sum_t |V_{t-1}|, starting from |V_0| = 1
  for (std::size_t t = 1; t <= options.horizon; ++t) phi_sum += sauer_bound(t - 1, 1);
  for (std::size_t i = 0; i + 1 < raw.transcript.size(); ++i) active_sum += raw.transcript[i].active;
  const std::uint64_t bound = 2 * phi_sum;
  const auto& s = raw.summary;
  report.expect(s.reduction_queries == 2 * active_sum, "raw extension queries " + std::to_string(s.reduction_queries) +
                                                           " != 2 * sum |V_{t-1}| = " + std::to_string(2 * active_sum));
  report.expect(s.reduction_queries <= bound, "raw extension queries " + std::to_string(s.reduction_queries) +
                                                  " exceed 2 * sum Phi_1(t-1) = " + std::to_string(bound));
  report.expect(dedup.summary.charged_queries <= bound, "dedup-charged queries " +
                                                            std::to_string(dedup.summary.charged_queries) +
                                                            " exceed " + std::to_string(bound));
  report.expect(format_transcript(raw.transcript, OutputFormat::Csv).size() > 0 &&
                    dedup.summary.learner_loss == raw.summary.learner_loss,
                "charging mode changed the game");
  const mpz_class experts = schedule_count(options.horizon, options.budget);
  const mpz_class width = static_cast<unsigned long>(s.max_active);
  report.expect(experts >= 100 * width, "expert count " + experts.get_str() + " is not 100x max|V_t| = " + width.get_str());
  std::ostringstream note;
  note << "T=" << options.horizon << " M=" << options.budget << ": extension queries " << s.reduction_queries
       << " (base learner " << s.base_learner_queries << ", raw total " << s.raw_queries << ", dedup-charged "
       << dedup.summary.charged_queries << ") <= " << bound << "; N=" << experts.get_str() << " vs max|V_t|="
       << s.max_active << " (ratio " << mpq_class(experts, width).get_d() << ")";
  report.note(note.str());
  report.seconds = clock.seconds();
  return report;
}

CheckReport verify_lower_bound(const LowerBoundOptions& options) {
  Stopwatch clock;
  CheckReport report;
  report.name = "lower_bound";
  const json cls{{"type", "block_union"}, {"d", options.max_blocks}};
  const json adv{{"type", "phase_reset"}, {"d", options.max_blocks}};
  const double t = static_cast<double>(options.horizon);
  const double d = static_cast<double>(options.max_blocks);
  for (std::uint64_t q : options.budgets) {
    const json learner{{"reduction", "adept"}, {"base", "soa"}, {"query_budget", q}};
    const auto config = make_config(cls, learner, adv, options.horizon, NumericMode::Log);
    std::vector<double> regrets;
    std::vector<double> rates;
    const std::string tag = "Q=" + std::to_string(q);
    for (std::size_t s = 0; s < options.seeds; ++s) {
      GameOptions go;
      go.keep_transcript = false;
      Game game(config, s, go);
      const auto result = game.finish();
      const auto& sum = result.summary;
      regrets.push_back(sum.expected_regret);
      if (sum.non_query_rounds > 0) rates.push_back(sum.non_query_expected_loss);
      const std::string where = tag + " seed=" + std::to_string(s);
      report.expect(sum.query_rounds <= q, where + ": " + std::to_string(sum.query_rounds) + " query rounds");
      const auto* adversary = dynamic_cast<const PhaseResetAdversary*>(&game.adversary());
      std::vector<std::uint64_t> positives;
      std::uint64_t total = 0;
      for (const auto& phase : adversary->phases()) {
        positives.push_back(phase.positives);
        total += phase.positives;
      }
      report.expect(adversary->phases().size() <= sum.query_rounds + 1, where + ": more than R+1 phases");
      std::sort(positives.rbegin(), positives.rend());
      std::uint64_t top = 0;
      for (std::size_t i = 0; i < positives.size() && i < options.max_blocks; ++i) top += positives[i];
      report.expect(sum.comparator_loss == total - top, where + ": comparator loss " +
                                                            std::to_string(sum.comparator_loss) + " != P - top-d P_i = " +
                                                            std::to_string(total - top));
      std::set<Instance> seen;
      for (const auto& ex : result.sequence) seen.insert(ex.x);
      report.expect(seen.size() == result.sequence.size(), where + ": an instance was repeated");
    }
    const auto r = mean_se(regrets);
    const auto l = mean_se(rates);
    const double qd = static_cast<double>(q);
    const double bound = t / 2.0 * std::min(1.0, d / (qd + 1.0)) - qd / 2.0;
    report.expect(r.mean >= bound - 3.0 * r.se, tag + ": mean expected regret " + format_double(r.mean) +
                                                    " below " + format_double(bound) + " - 3 SE (" +
                                                    format_double(r.se) + ")");
    report.expect(std::abs(l.mean - 0.5) <= 3.0 * l.se, tag + ": non-query loss rate " + format_double(l.mean) +
                                                            " outside 0.5 +- 3 SE (" + format_double(l.se) + ")");
    std::ostringstream note;
    note << tag << ": regret " << r.mean << " (SE " << r.se << ") >= bound " << bound << "; non-query loss rate "
         << l.mean << " (SE " << l.se << ")";
    report.note(note.str());
  }
  report.seconds = clock.seconds();
  return report;
}

// Lazy wrapper -------------------------------------------------------------------

namespace {

struct LazyRun {
  std::vector<double> p1;
  std::size_t early_reads = 0;
  std::vector<std::size_t> committed;  // r_t before round t
  std::vector<std::uint64_t> extension_queries;
  std::vector<std::size_t> width_before;  // |V_{r_t}|
};

LazyRun drive_lazy(const std::shared_ptr<const ConceptClass>& cls, const std::string& base, int budget,
                   std::size_t internal, const SampledSet& sample, const LabeledSequence& seq, std::size_t rounds) {
  OracleFront oracle(cls);
  auto learner = std::shared_ptr<BaseLearner>(make_base_learner(base, cls));
  LazyAdept lazy(learner, oracle, HedgeParams::fixed(internal, budget), sample);
  LazyRun run;
  for (std::size_t t = 1; t <= rounds; ++t) {
    oracle.begin_round(t);
    run.committed.push_back(lazy.committed());
    run.width_before.push_back(lazy.inner().active().size());
    run.p1.push_back(lazy.predict(seq[t - 1].x).p1);
    lazy.observe(seq[t - 1].y);
    run.extension_queries.push_back(oracle.reduction_queries_this_round());
  }
  run.early_reads = lazy.guard().early_reads();
  return run;
}

void lazy_audits(CheckReport& report, std::size_t games) {
  struct Case {
    std::string name;
    json cls;
    json adv;
    std::size_t horizon;
    std::size_t k;
  };
  std::vector<Case> cases = {
      {"powerset3", json{{"type", "powerset"}, {"n", 3}}, json{{"type", "noisy"}, {"concept", 5}, {"flip", 0.2}}, 48, 8},
      {"singletons4", json{{"type", "singletons"}, {"n", 4}}, json{{"type", "noisy"}, {"concept", 1}, {"flip", 0.3}}, 40, 6},
      {"blocks-d1", json{{"type", "block_union"}, {"d", 1}},
       json{{"type", "noisy"}, {"concept", json::array({0})}, {"flip", 0.1}, {"blocks", 4}}, 96, 10},
      {"blocks-d2", json{{"type", "block_union"}, {"d", 2}},
       json{{"type", "noisy"}, {"concept", json::array({0, 1})}, {"flip", 0.1}, {"blocks", 5}}, 64, 8},
  };
  for (std::size_t g = 0; g < games; ++g) {
    const auto& c = cases[g % cases.size()];
    const std::uint64_t seed = 31 + g;
    const std::string tag = c.name + " seed=" + std::to_string(seed);

    // K = T reproduces plain ADEPT byte for byte, in both formats.
    const auto plain_cfg = make_config(c.cls, json{{"reduction", "adept"}, {"base", "soa"}}, c.adv, c.horizon,
                                       NumericMode::Log);
    const auto full_cfg = make_config(c.cls, json{{"reduction", "lazy-adept"}, {"base", "soa"}, {"K", c.horizon}},
                                      c.adv, c.horizon, NumericMode::Log);
    const auto plain = run_game(plain_cfg, seed);
    const auto full = run_game(full_cfg, seed);
    for (auto format : {OutputFormat::Csv, OutputFormat::Jsonl}) {
      report.expect(format_transcript(plain.transcript, format) == format_transcript(full.transcript, format),
                    tag + ": lazy K=T transcript differs from plain ADEPT (" + to_string(format) + ")");
    }
    report.expect(full.summary.early_reads == 0, tag + ": early membership reads with K=T");

    // Subsampled run: blindness, replacement invariance, restriction identity, query bound.
    const auto lazy_cfg = make_config(c.cls, json{{"reduction", "lazy-adept"}, {"base", "soa"}, {"K", c.k}}, c.adv,
                                      c.horizon, NumericMode::Log);
    Game game(lazy_cfg, seed);
    auto result = game.finish();
    report.expect(result.summary.early_reads == 0, tag + ": " + std::to_string(result.summary.early_reads) +
                                                       " membership reads before the prediction");
    const auto& sample = game.lazy()->guard().set();
    const auto cls = game.concept_class_ptr();
    const int budget = game.mistake_budget();
    const auto& seq = result.sequence;
    const auto base_run = drive_lazy(cls, "soa", budget, c.k, sample, seq, c.horizon);
    for (std::size_t t = 1; t <= c.horizon; ++t) {
      report.expect(base_run.p1[t - 1] == result.transcript[t - 1].p1, tag + ": replay of round " + std::to_string(t) +
                                                                          " differs from the game");
    }
    const std::size_t dvc = dynamic_cast<const BlockUnionClass*>(cls.get())
                                ? dynamic_cast<const BlockUnionClass&>(*cls).max_blocks()
                                : vc_dimension(dynamic_cast<const FiniteConceptClass&>(*cls));
    std::uint64_t total_ext = 0;
    std::uint64_t round_bound = 0;
    for (std::size_t t = 1; t <= c.horizon; ++t) {
      report.expect(base_run.extension_queries[t - 1] == 2 * base_run.width_before[t - 1],
                    tag + " round " + std::to_string(t) + ": speculative queries != 2|V_{r_t}|");
      total_ext += base_run.extension_queries[t - 1];
      round_bound += 2 * sauer_bound(base_run.committed[t - 1], dvc);
    }
    report.expect(total_ext <= round_bound && round_bound <= 2 * c.horizon * sauer_bound(c.k, dvc),
                  tag + ": extension queries " + std::to_string(total_ext) + " exceed sum 2 Phi(r_t) = " +
                      std::to_string(round_bound));

    // Replacing the not-yet-revealed part of I leaves each prediction unchanged.
    Rng rng(derive_stream_seed(seed, "replacement"));
    for (std::size_t t = 1; t <= c.horizon; t += std::max<std::size_t>(1, c.horizon / 8)) {
      std::vector<std::size_t> kept;
      for (std::size_t r : sample.rounds()) {
        if (r < t) kept.push_back(r);
      }
      std::set<std::size_t> replaced(kept.begin(), kept.end());
      while (replaced.size() < c.k) replaced.insert(t + rng.below(c.horizon - t + 1));
      const SampledSet other(c.horizon, std::vector<std::size_t>(replaced.begin(), replaced.end()));
      const auto alt = drive_lazy(cls, "soa", budget, c.k, other, seq, t);
      report.expect(alt.p1[t - 1] == base_run.p1[t - 1], tag + ": round " + std::to_string(t) +
                                                             " prediction depends on unrevealed sample membership");
    }

    // Sampled rounds coincide with a plain K-horizon run on the subsequence.
    OracleFront oracle(cls);
    auto learner = std::shared_ptr<BaseLearner>(make_base_learner("soa", cls));
    Adept restricted(learner, oracle, HedgeParams::fixed(c.k, budget));
    std::size_t i = 0;
    for (std::size_t r : sample.rounds()) {
      oracle.begin_round(++i);
      const double p = restricted.predict(seq[r - 1].x).p1;
      restricted.observe(seq[r - 1].y);
      report.expect(p == base_run.p1[r - 1], tag + ": sampled round " + std::to_string(r) +
                                                 " differs from the restricted run");
    }
  }
}

}  // namespace

CheckReport verify_sample_blind(std::size_t games) {
  Stopwatch clock;
  CheckReport report;
  report.name = "sample_blind";
  lazy_audits(report, games);
  report.seconds = clock.seconds();
  return report;
}

CheckReport verify_tradeoff(const TradeoffOptions& options) {
  Stopwatch clock;
  CheckReport report;
  report.name = "tradeoff";
  lazy_audits(report, options.audit_games);

  const json cls{{"type", "block_union"}, {"d", 1}};
  const json learner{{"reduction", "lazy-adept"}, {"base", "soa"}, {"c", options.c}};
  const json adv{{"type", "noisy"}, {"concept", json::array({0})}, {"flip", options.flip}, {"blocks", options.blocks}};
  std::vector<double> means;
  for (std::size_t horizon : options.horizons) {
    const auto config = make_config(cls, learner, adv, horizon, NumericMode::Log);
    const std::size_t k = subsample_size(horizon, options.c);
    const std::uint64_t query_bound = 2 * horizon * sauer_bound(k, 1);
    std::vector<double> per_round;
    std::uint64_t worst = 0;
    std::uint64_t worst_total = 0;
    std::size_t early = 0;
    for (std::size_t s = 0; s < options.seeds; ++s) {
      GameOptions go;
      go.keep_transcript = false;
      const auto sum = run_game(config, s, go).summary;
      per_round.push_back(sum.expected_regret / static_cast<double>(horizon));
      worst = std::max(worst, sum.reduction_queries);
      worst_total = std::max(worst_total, sum.raw_queries);
      early += sum.early_reads;
      report.expect(sum.reduction_queries <= query_bound,
                    "T=" + std::to_string(horizon) + " seed=" + std::to_string(s) + ": extension queries " +
                        std::to_string(sum.reduction_queries) + " exceed 2T Phi_1(K) = " + std::to_string(query_bound));
    }
    report.expect(early == 0, "T=" + std::to_string(horizon) + ": early membership reads");
    const auto stats = mean_se(per_round);
    means.push_back(stats.mean);
    std::ostringstream note;
    note << "T=" << horizon << " K=" << k << ": regret/T " << stats.mean << " (SE " << stats.se
         << "), max extension queries " << worst << " (raw total incl. base learner " << worst_total << ") <= "
         << query_bound;
    report.note(note.str());
  }
  for (std::size_t i = 1; i < means.size(); ++i) {
    report.expect(means[i] < means[i - 1], "regret/T does not decrease from T=" + std::to_string(options.horizons[i - 1]) +
                                               " to T=" + std::to_string(options.horizons[i]));
  }
  report.seconds = clock.seconds();
  return report;
}

// Dimensions --------------------------------------------------------------------

CheckReport verify_dims() {
  Stopwatch clock;
  CheckReport report;
  report.name = "dims";
  auto check = [&](const std::string& name, const FiniteConceptClass& cls, std::size_t want) {
    const auto vc = vc_dimension(cls);
    const auto ld = littlestone_dimension(cls);
    report.expect(vc == want && ld == want, name + ": (VC, Ldim) = (" + std::to_string(vc) + ", " + std::to_string(ld) +
                                                "), expected (" + std::to_string(want) + ", " + std::to_string(want) + ")");
    report.note(name + " -> (" + std::to_string(vc) + ", " + std::to_string(ld) + ")");
  };
  for (std::size_t d = 1; d <= 3; ++d) check("powerset on " + std::to_string(d) + " points", FiniteConceptClass::powerset(d), d);
  for (std::size_t n = 2; n <= 4; ++n) check("singletons over " + std::to_string(n) + " points", FiniteConceptClass::singletons(n), 1);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto fin = finitize_block_union(d, d + 1, 2);
    check("unions of <= " + std::to_string(d) + " blocks (" + std::to_string(d + 1) + " blocks x 2 points)", fin.cls, d);
  }
  report.seconds = clock.seconds();
  return report;
}

// Dispatch -----------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"pascal",   "equivalence", "sauer",        "survival", "potentials",
                                                 "purity",   "lower_bound", "sample_blind", "dims"};
  return names;
}

CheckReport run_suite(const std::string& name, bool quick) {
  if (name == "pascal") return verify_pascal(quick ? 24 : 64, 8);
  if (name == "equivalence") {
    EquivalenceOptions o;
    if (quick) {
      o.max_domain = 3;
      o.max_horizon = 6;
    }
    return verify_equivalence(o);
  }
  if (name == "sauer") return verify_run_invariants(test_fleet(quick), kCheckSauer | kCheckProjection | kCheckQueries, name);
  if (name == "survival") return verify_run_invariants(test_fleet(quick), kCheckSurvival, name);
  if (name == "potentials") return verify_run_invariants(test_fleet(quick), kCheckPotentials, name);
  if (name == "purity") return verify_run_invariants(test_fleet(quick), kCheckPurity, name);
  if (name == "lower_bound") {
    LowerBoundOptions o;
    if (quick) {
      o.horizon = 400;
      o.seeds = 100;
    }
    return verify_lower_bound(o);
  }
  if (name == "sample_blind") return verify_sample_blind(quick ? 4 : 12);
  if (name == "dims") return verify_dims();
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

std::string describe(const CheckReport& report, std::size_t max_failures) {
  std::ostringstream s;
  char seconds[32];
  std::snprintf(seconds, sizeof seconds, "%.2f", report.seconds);
  s << report.name << ": " << (report.passed ? "PASS" : "FAIL") << " (" << report.checks << " checks, " << seconds
    << " s)\n";
  for (const auto& n : report.notes) s << "  " << n << '\n';
  for (std::size_t i = 0; i < report.failures.size() && i < max_failures; ++i) {
    s << "  counterexample: " << report.failures[i] << '\n';
  }
  if (report.failures.size() > max_failures) s << "  ... " << report.failures.size() - max_failures << " more\n";
  return s.str();
}

}  // namespace adept
