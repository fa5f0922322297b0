// Command-line front end: run, sweep, verify, dims.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "adept/concepts.hpp"
#include "adept/config.hpp"
#include "adept/errors.hpp"
#include "adept/game.hpp"
#include "adept/sweep.hpp"
#include "adept/transcript.hpp"
#include "adept/verify.hpp"

namespace {

using namespace adept;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string numeric;
  bool quiet = false;
};

std::string seed_path(const std::string& path, std::uint64_t seed) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + ".seed" + std::to_string(seed) + p.extension().string())).string();
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("output: cannot write '" + path + "'");
  return out;
}

ExperimentConfig load_with_overrides(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config: required");
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.format.empty()) cfg.format = parse_format(c.format);
  if (!c.numeric.empty()) cfg.numeric = parse_numeric(c.numeric);
  if (!c.out.empty()) cfg.output = c.out;
  validate(cfg);
  return cfg;
}

int cmd_run(const Common& c, const std::string& summary_path) {
  const auto cfg = load_with_overrides(c);
  for (const auto& w : config_warnings(cfg)) std::cerr << "warning: " << w << '\n';
  const std::string out_path = resolve_output_path(cfg.output);
  std::ofstream summary_file;
  if (!summary_path.empty()) summary_file = open_out(resolve_output_path(summary_path));
  if (!c.quiet) write_summary_header(std::cout);
  if (summary_file.is_open()) write_summary_header(summary_file);
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    const auto seed = replicate_seed(cfg, r);
    GameOptions options;
    options.keep_transcript = !out_path.empty();
    const auto result = run_game(cfg, seed, options);
    if (out_path == "-") {
      write_transcript(std::cout, result.transcript, cfg.format);
    } else if (!out_path.empty()) {
      auto file = open_out(cfg.replicates > 1 ? seed_path(out_path, seed) : out_path);
      write_transcript(file, result.transcript, cfg.format);
    }
    if (!c.quiet && out_path != "-") write_summary_row(std::cout, result.summary);
    if (summary_file.is_open()) write_summary_row(summary_file, result.summary);
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, std::size_t jobs) {
  if (c.config.empty()) throw ConfigError("--config: required");
  std::ifstream in(c.config);
  if (!in) throw ConfigError("config: cannot open '" + c.config + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const auto result = run_sweep(doc, jobs);
  const std::string out_path = resolve_output_path(c.out);
  if (out_path.empty()) {
    if (!c.quiet) write_sweep_aggregates(std::cout, result);
  } else {
    auto agg = open_out(out_path);
    write_sweep_aggregates(agg, result);
    auto runs = open_out(out_path + ".runs.csv");
    write_sweep_runs(runs, result);
    if (!c.quiet) write_sweep_aggregates(std::cout, result);
  }
  for (const auto& f : result.failures) std::cerr << "cell failed: " << f << '\n';
  return result.failures.empty() ? kExitOk : kExitVerify;
}

int cmd_verify(const std::vector<std::string>& suites, bool quick, bool quiet) {
  bool ok = true;
  const auto& names = suites.empty() ? suite_names() : suites;
  for (const auto& name : names) {
    const auto report = run_suite(name, quick);
    ok = ok && report.passed;
    if (!quiet || !report.passed) std::cout << describe(report) << std::flush;
  }
  return ok ? kExitOk : kExitVerify;
}

int cmd_dims(const std::string& config_path, const std::string& class_json, std::size_t blocks, std::size_t serials) {
  nlohmann::json spec;
  if (!class_json.empty()) {
    try {
      spec = nlohmann::json::parse(class_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("--class: invalid JSON: ") + e.what());
    }
  } else if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config: cannot open '" + config_path + "'");
    nlohmann::json doc;
    in >> doc;
    if (!doc.contains("class")) throw ConfigError("class: missing");
    spec = doc.at("class");
  } else {
    throw ConfigError("dims: pass --config or --class");
  }
  const auto cls = make_concept_class(spec);
  if (const auto* finite = dynamic_cast<const FiniteConceptClass*>(cls.get())) {
    std::cout << "vc=" << vc_dimension(*finite) << " littlestone=" << littlestone_dimension(*finite) << '\n';
    return kExitOk;
  }
  const auto* block = dynamic_cast<const BlockUnionClass*>(cls.get());
  const auto fin = finitize_block_union(block->max_blocks(), blocks, serials);
  std::cout << "finitization " << blocks << "x" << serials << ": vc=" << vc_dimension(fin.cls)
            << " littlestone=" << littlestone_dimension(fin.cls) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oracle-efficient agnostic online learning lab"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Experiment config (JSON)");
    sub->add_option("--out", common.out, "Output path ('-' for stdout)");
    sub->add_flag("--quiet", common.quiet, "Suppress normal output");
  };

  auto* run = app.add_subcommand("run", "Run one experiment config");
  add_common(run);
  std::uint64_t seed_value = 0;
  auto* seed_opt = run->add_option("--seed", seed_value, "Override the experiment seed");
  run->add_option("--format", common.format, "Transcript format")->check(CLI::IsMember({"csv", "jsonl"}));
  run->add_option("--numeric", common.numeric, "Weight arithmetic")->check(CLI::IsMember({"log", "exact"}));
  std::string summary_path;
  run->add_option("--summary", summary_path, "Also write the summary CSV here");

  auto* sweep = app.add_subcommand("sweep", "Run a grid of configs and aggregate over seeds");
  add_common(sweep);
  std::size_t jobs = 1;
  sweep->add_option("--jobs", jobs, "Parallel games")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  std::vector<std::string> suites;
  verify->add_option("suites", suites, "Suites to run (default: all)")->check(CLI::IsMember(suite_names()));
  bool quick = false;
  verify->add_flag("--quick", quick, "Reduced scale");
  verify->add_flag("--quiet", common.quiet, "Only report failures");

  auto* dims = app.add_subcommand("dims", "Brute-force VC and Littlestone dimensions of a class");
  dims->add_option("--config", common.config, "Experiment config whose class is measured");
  std::string class_json;
  dims->add_option("--class", class_json, "Class spec as inline JSON");
  std::size_t blocks = 4;
  std::size_t serials = 2;
  dims->add_option("--blocks", blocks, "Blocks in the finitization of a block class");
  dims->add_option("--serials", serials, "Points per block in the finitization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*seed_opt) common.seed = seed_value;
    if (run->parsed()) return cmd_run(common, summary_path);
    if (sweep->parsed()) return cmd_sweep(common, jobs);
    if (verify->parsed()) return cmd_verify(suites, quick, common.quiet);
    if (dims->parsed()) return cmd_dims(common.config, class_json, blocks, serials);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapabilityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}
