#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adept/reductions.hpp"

namespace adept {

enum class Reduction { Adept, Bdpss, LazyAdept };
enum class Charging { Raw, Dedup };
enum class OutputFormat { Csv, Jsonl };

struct LearnerSpec {
  Reduction reduction = Reduction::Adept;
  std::string base = "soa";
  EtaMode eta_mode = EtaMode::Fixed;
  std::optional<double> eta_value;
  std::optional<int> m_override;
  // Lazy wrapper: exactly one of c and K.
  std::optional<double> c;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> query_budget;
  bool prune_experts = true;

  std::string label() const;
};

struct ExperimentConfig {
  nlohmann::json class_spec;
  LearnerSpec learner;
  nlohmann::json adversary_spec;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  NumericMode numeric = NumericMode::Log;
  std::string output;
  Charging charging = Charging::Raw;
  OutputFormat format = OutputFormat::Csv;
};

// Parses and fully validates (class, adversary and learner are instantiated
// once as a dry run). Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
LearnerSpec parse_learner(const nlohmann::json& spec);
nlohmann::json to_json(const LearnerSpec& spec);

// Second validation pass used after command-line overrides.
void validate(const ExperimentConfig& config);

const char* to_string(NumericMode mode);
const char* to_string(OutputFormat format);
NumericMode parse_numeric(const std::string& text);
OutputFormat parse_format(const std::string& text);

// Warnings raised while validating (duplicate rows and the like).
std::vector<std::string> config_warnings(const ExperimentConfig& config);

}  // namespace adept
