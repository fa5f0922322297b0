#include "adept/sweep.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "adept/errors.hpp"
#include "adept/transcript.hpp"

namespace adept {

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  return out;
}

std::string SweepCell::key() const {
  std::ostringstream s;
  s << "T=" << horizon << ";c=" << (c ? format_double(*c) : std::string("plain")) << ";" << learner.label();
  return s.str();
}

std::vector<SweepCell> expand_grid(const nlohmann::json& doc, std::size_t& seeds) {
  if (!doc.is_object()) throw ConfigError("sweep: expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "base" && key != "grid") throw ConfigError("sweep." + key + ": unknown field");
  }
  if (!doc.contains("base")) throw ConfigError("sweep.base: missing");
  const auto& base_doc = doc.at("base");
  const ExperimentConfig base = parse_config(base_doc);
  const nlohmann::json grid = doc.value("grid", nlohmann::json::object());
  if (!grid.is_object()) throw ConfigError("sweep.grid: expected an object");
  for (const auto& [key, _] : grid.items()) {
    if (key != "T" && key != "c" && key != "learner" && key != "seeds") {
      throw ConfigError("sweep.grid." + key + ": unknown field");
    }
  }

  std::vector<std::size_t> horizons{base.horizon};
  if (grid.contains("T")) {
    horizons.clear();
    for (const auto& t : grid.at("T")) {
      if (!t.is_number_integer() || t.get<long long>() < 0) throw ConfigError("sweep.grid.T: expected nonnegative integers");
      horizons.push_back(t.get<std::size_t>());
    }
  }
  std::vector<std::optional<double>> exponents{std::nullopt};
  if (grid.contains("c")) {
    exponents.clear();
    for (const auto& c : grid.at("c")) {
      if (c.is_null()) {
        exponents.emplace_back(std::nullopt);
      } else if (c.is_number() && c.get<double>() > 0.0 && c.get<double>() <= 1.0) {
        exponents.emplace_back(c.get<double>());
      } else {
        throw ConfigError("sweep.grid.c: expected numbers in (0, 1] or null for the plain learner");
      }
    }
  }
  std::vector<nlohmann::json> learners{to_json(base.learner)};
  if (grid.contains("learner")) {
    learners.clear();
    for (const auto& l : grid.at("learner")) learners.push_back(l);
  }
  seeds = base.replicates;
  if (grid.contains("seeds")) {
    const auto& s = grid.at("seeds");
    if (!s.is_number_integer() || s.get<long long>() <= 0) throw ConfigError("sweep.grid.seeds: expected a positive integer");
    seeds = s.get<std::size_t>();
  }

  std::vector<SweepCell> cells;
  for (std::size_t horizon : horizons) {
    for (const auto& c : exponents) {
      for (const auto& learner_doc : learners) {
        nlohmann::json cell_doc = base_doc;
        cell_doc["T"] = horizon;
        nlohmann::json l = learner_doc;
        if (c) {
          if (l.value("reduction", "adept") == "bdpss") throw ConfigError("sweep.grid.c: the lazy wrapper runs ADEPT only");
          l["reduction"] = "lazy-adept";
          l.erase("wrapper");
          l.erase("K");
          l["c"] = *c;
        }
        cell_doc["learner"] = l;
        SweepCell cell;
        cell.horizon = horizon;
        cell.c = c;
        cell.config = parse_config(cell_doc);
        cell.learner = cell.config.learner;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

SweepResult run_sweep(const nlohmann::json& doc, std::size_t jobs) {
  SweepResult result;
  std::size_t seeds = 1;
  result.cells = expand_grid(doc, seeds);
  result.runs.assign(result.cells.size(), std::vector<std::optional<Summary>>(seeds));

  struct Task {
    std::size_t cell;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    for (std::size_t r = 0; r < seeds; ++r) tasks.push_back({i, r});
  }
  std::atomic<std::size_t> next{0};
  std::mutex failures_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& task = tasks[i];
      const auto& cell = result.cells[task.cell];
      const auto seed = replicate_seed(cell.config, task.replicate);
      try {
        GameOptions options;
        options.keep_transcript = false;
        result.runs[task.cell][task.replicate] = run_game(cell.config, seed, options).summary;
      } catch (const std::exception& e) {
        std::lock_guard lock(failures_mutex);
        result.failures.push_back(cell.key() + " seed=" + std::to_string(seed) + ": " + e.what());
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < n; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::sort(result.failures.begin(), result.failures.end());

  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& cell = result.cells[i];
    SweepAggregate agg;
    agg.cell = cell.key();
    agg.horizon = cell.horizon;
    agg.c = cell.c ? format_double(*cell.c) : "plain";
    agg.learner = cell.learner.label();
    std::vector<double> expected, realized, per_round, raw, charged, active;
    for (const auto& run : result.runs[i]) {
      if (!run) {
        ++agg.failures;
        continue;
      }
      ++agg.seeds;
      expected.push_back(run->expected_regret);
      realized.push_back(run->realized_regret);
      per_round.push_back(run->horizon > 0 ? run->expected_regret / static_cast<double>(run->horizon) : 0.0);
      raw.push_back(static_cast<double>(run->raw_queries));
      charged.push_back(static_cast<double>(run->charged_queries));
      active.push_back(static_cast<double>(run->max_active));
      agg.expert_count = run->expert_count;
    }
    agg.expected_regret = mean_se(expected);
    agg.realized_regret = mean_se(realized);
    agg.regret_per_round = mean_se(per_round);
    agg.raw_queries = mean_se(raw);
    agg.charged_queries = mean_se(charged);
    agg.max_active = mean_se(active);
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

void write_sweep_aggregates(std::ostream& out, const SweepResult& result) {
  out << "T,c,learner,seeds,failures,mean_expected_regret,se_expected_regret,mean_realized_regret,"
         "se_realized_regret,mean_regret_per_round,se_regret_per_round,mean_raw_queries,se_raw_queries,"
         "mean_charged_queries,se_charged_queries,mean_max_active,expert_count\n";
  for (const auto& a : result.aggregates) {
    out << a.horizon << ',' << a.c << ',' << a.learner << ',' << a.seeds << ',' << a.failures << ','
        << format_double(a.expected_regret.mean) << ',' << format_double(a.expected_regret.se) << ','
        << format_double(a.realized_regret.mean) << ',' << format_double(a.realized_regret.se) << ','
        << format_double(a.regret_per_round.mean) << ',' << format_double(a.regret_per_round.se) << ','
        << format_double(a.raw_queries.mean) << ',' << format_double(a.raw_queries.se) << ','
        << format_double(a.charged_queries.mean) << ',' << format_double(a.charged_queries.se) << ','
        << format_double(a.max_active.mean) << ',' << a.expert_count << '\n';
  }
}

void write_sweep_runs(std::ostream& out, const SweepResult& result) {
  out << "cell,";
  write_summary_header(out);
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    for (const auto& run : result.runs[i]) {
      if (!run) continue;
      out << result.cells[i].key() << ',';
      write_summary_row(out, *run);
    }
  }
}

}  // namespace adept
