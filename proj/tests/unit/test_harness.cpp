#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "adept/config.hpp"
#include "adept/errors.hpp"
#include "adept/game.hpp"
#include "adept/rng.hpp"
#include "adept/sweep.hpp"
#include "adept/transcript.hpp"
#include "adept/verify.hpp"

using namespace adept;
using nlohmann::json;

namespace {

ExperimentConfig config(const std::string& text) { return parse_config(json::parse(text)); }

const char* kNoisy = R"({"class":{"type":"powerset","n":2},"learner":{"reduction":"adept","base":"soa"},
  "adversary":{"type":"noisy","concept":2,"flip":0.2},"T":60,"seed":3})";

}  // namespace

TEST_CASE("realizable stream has zero comparator loss") {
  const auto cfg = config(R"({"class":{"type":"singletons","n":4},"adversary":{"type":"realizable","concept":1},
    "T":80,"seed":1})");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = run_game(cfg, seed);
    CHECK(r.summary.comparator_loss == 0);
    CHECK(r.summary.realized_regret == static_cast<double>(r.summary.learner_loss));
  }
}

TEST_CASE("empty horizon") {
  const auto r = run_game(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0},"T":0})"), 0);
  CHECK(r.transcript.empty());
  CHECK(r.summary.realized_regret == 0.0);
  CHECK(r.summary.expected_regret == 0.0);
  CHECK(r.summary.raw_queries == 0);
}

TEST_CASE("determinism and seeds") {
  const auto cfg = config(kNoisy);
  const auto a = format_transcript(run_game(cfg, 9).transcript, OutputFormat::Csv);
  const auto b = format_transcript(run_game(cfg, 9).transcript, OutputFormat::Csv);
  const auto c = format_transcript(run_game(cfg, 10).transcript, OutputFormat::Csv);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(derive_stream_seed(9, kLearnerStream) != derive_stream_seed(9, kAdversaryStream));
  CHECK(derive_stream_seed(9, kLearnerStream) == derive_stream_seed(9, kLearnerStream));
}

TEST_CASE("learner choice does not perturb an oblivious stream") {
  auto base = json::parse(kNoisy);
  const auto soa = run_game(parse_config(base), 4);
  base["learner"]["base"] = "halving";
  base["learner"]["eta"] = "adaptive";
  const auto halving = run_game(parse_config(base), 4);
  CHECK(soa.sequence == halving.sequence);
}

TEST_CASE("transcript round trip") {
  const auto cfg = config(kNoisy);
  const auto r = run_game(cfg, 12);
  for (auto format : {OutputFormat::Csv, OutputFormat::Jsonl}) {
    std::istringstream in(format_transcript(r.transcript, format));
    const auto rows = read_transcript(in, format);
    REQUIRE(rows.size() == r.transcript.size());
    const auto totals = recompute(rows);
    CHECK(totals.learner_loss == r.summary.learner_loss);
    CHECK(totals.expected_loss == doctest::Approx(r.summary.expected_loss).epsilon(1e-12));
    CHECK(totals.raw_queries == r.summary.raw_queries);
    CHECK(static_cast<double>(totals.learner_loss) - static_cast<double>(r.summary.comparator_loss) ==
          r.summary.realized_regret);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].p1 == r.transcript[i].p1);
  }
}

TEST_CASE("summary row lines up with its header") {
  const auto r = run_game(config(kNoisy), 1);
  CHECK(summary_values(r.summary).size() == summary_columns().size());
  std::ostringstream out;
  write_summary_header(out);
  write_summary_row(out, r.summary);
  CHECK(out.str().find("expected_regret") != std::string::npos);
}

TEST_CASE("config rejection") {
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"T":10,"bogus":1})"), ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0},"T":-3})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0},"T":5,
    "learner":{"reduction":"lazy-adept","K":9}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0},"T":5,
    "learner":{"eta":"adaptive","eta_value":0.3}})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"powerset","n":2},"adversary":{"type":"realizable","concept":0},"T":5,
    "numeric":"float"})"),
                  ConfigError);
  CHECK_THROWS_AS(config(R"({"class":{"type":"block_union","d":1},"adversary":{"type":"phase_reset","d":1},"T":5,
    "learner":{"reduction":"bdpss"}})"),
                  std::exception);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("learner labels") {
  CHECK(config(R"({"class":{"type":"block_union","d":1},"adversary":{"type":"phase_reset","d":1},"T":50,
    "learner":{"query_budget":4}})").learner.label() == "adept(soa)+Q4");
  CHECK(config(R"({"class":{"type":"block_union","d":1},"adversary":{"type":"phase_reset","d":1},"T":50,
    "learner":{"wrapper":"lazy","c":0.5}})").learner.label() == "lazy-adept[c=0.5](soa)");
}

TEST_CASE("throttled learner on the phase-reset stream") {
  const auto r = run_game(config(R"({"class":{"type":"block_union","d":1},"adversary":{"type":"phase_reset","d":1},
    "T":200,"learner":{"query_budget":4}})"), 3);
  CHECK(r.summary.query_rounds <= 4);
  CHECK(r.summary.raw_queries > 4);
  CHECK(r.summary.throttled_queries == r.summary.raw_queries - 4);
}

TEST_CASE("lazy game reports the internal horizon") {
  const auto r = run_game(config(R"({"class":{"type":"block_union","d":1},
    "adversary":{"type":"noisy","concept":[1],"flip":0.1,"blocks":4},"T":256,"learner":{"wrapper":"lazy","c":0.5}})"), 2);
  CHECK(r.summary.internal_horizon == 16);
  CHECK(r.summary.early_reads == 0);
}

TEST_CASE("sweep grid") {
  const auto doc = json::parse(R"({"base":{"class":{"type":"block_union","d":1},
      "adversary":{"type":"noisy","concept":[1],"flip":0.1,"blocks":4},"T":16},
    "grid":{"T":[256,1024,4096],"c":[0.25,0.5,null],"seeds":2}})");
  std::size_t seeds = 0;
  const auto cells = expand_grid(doc, seeds);
  CHECK(cells.size() == 9);
  CHECK(seeds == 2);

  auto small = doc;
  small["grid"]["T"] = {16, 32, 64};
  const auto result = run_sweep(small, 2);
  CHECK(result.failures.empty());
  REQUIRE(result.aggregates.size() == 9);
  for (const auto& a : result.aggregates) CHECK(a.seeds == 2);
  std::ostringstream out;
  write_sweep_aggregates(out, result);
  std::size_t lines = 0;
  for (char ch : out.str()) lines += ch == '\n';
  CHECK(lines == 10);

  auto bad = doc;
  bad["grid"]["colour"] = 1;
  CHECK_THROWS_AS(expand_grid(bad, seeds), ConfigError);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_se(v);
  CHECK(m.mean == 2.5);
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("output directory for bare names") {
  setenv("ADEPT_OUTPUT_DIR", "/tmp/adept-out", 1);
  CHECK(resolve_output_path("run.csv") == "/tmp/adept-out/run.csv");
  CHECK(resolve_output_path("sub/run.csv") == "sub/run.csv");
  CHECK(resolve_output_path("-") == "-");
  unsetenv("ADEPT_OUTPUT_DIR");
  CHECK(resolve_output_path("run.csv") == "run.csv");
}

TEST_CASE("quick verify suites pass") {
  for (const auto& name : {"pascal", "sauer", "survival", "potentials", "purity", "sample_blind", "dims"}) {
    const auto report = run_suite(name, true);
    INFO(describe(report));
    CHECK(report.passed);
  }
  CHECK_THROWS_AS(run_suite("nope"), std::invalid_argument);
}
