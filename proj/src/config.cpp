#include "adept/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adept/adversaries.hpp"
#include "adept/base_learners.hpp"
#include "adept/errors.hpp"
#include "adept/subsampling.hpp"

namespace adept {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError((where.empty() ? key : where + "." + key) + ": unknown field");
    }
  }
}

std::uint64_t get_count(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  const std::string field = where.empty() ? key : where + "." + key;
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

std::string LearnerSpec::label() const {
  std::string out;
  switch (reduction) {
    case Reduction::Adept:
      out = "adept";
      break;
    case Reduction::Bdpss:
      out = prune_experts ? "bdpss" : "bdpss-unpruned";
      break;
    case Reduction::LazyAdept: {
      std::ostringstream s;
      s << "lazy-adept";
      if (k) {
        s << "[K=" << *k << "]";
      } else if (c) {
        s << "[c=" << *c << "]";
      }
      out = s.str();
      break;
    }
  }
  out += "(" + base + ")";
  if (eta_mode == EtaMode::Adaptive) out += "+adaptive";
  if (query_budget) out += "+Q" + std::to_string(*query_budget);
  return out;
}

LearnerSpec parse_learner(const json& spec) {
  const std::string where = "learner";
  if (!spec.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown(spec,
                 {"reduction", "base", "eta", "eta_value", "M_override", "wrapper", "c", "K", "query_budget",
                  "prune_experts"},
                 where);
  LearnerSpec out;
  if (spec.contains("reduction")) {
    const auto r = get_string(spec, "reduction", where);
    if (r == "adept") {
      out.reduction = Reduction::Adept;
    } else if (r == "bdpss") {
      out.reduction = Reduction::Bdpss;
    } else if (r == "lazy-adept") {
      out.reduction = Reduction::LazyAdept;
    } else {
      throw ConfigError(where + ".reduction: expected adept, bdpss or lazy-adept, got '" + r + "'");
    }
  }
  if (spec.contains("wrapper")) {
    const auto w = get_string(spec, "wrapper", where);
    if (w != "lazy") throw ConfigError(where + ".wrapper: only 'lazy' is supported");
    if (out.reduction == Reduction::Bdpss) throw ConfigError(where + ".wrapper: the lazy wrapper runs ADEPT only");
    out.reduction = Reduction::LazyAdept;
  }
  if (spec.contains("base")) out.base = get_string(spec, "base", where);
  if (spec.contains("eta")) {
    const auto e = get_string(spec, "eta", where);
    if (e == "fixed") {
      out.eta_mode = EtaMode::Fixed;
    } else if (e == "adaptive") {
      out.eta_mode = EtaMode::Adaptive;
    } else {
      throw ConfigError(where + ".eta: expected fixed or adaptive, got '" + e + "'");
    }
  }
  if (spec.contains("eta_value")) {
    const auto& v = spec.at("eta_value");
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError(where + ".eta_value: expected a positive number");
    if (out.eta_mode == EtaMode::Adaptive) throw ConfigError(where + ".eta_value: not allowed with adaptive eta");
    out.eta_value = v.get<double>();
  }
  if (spec.contains("M_override")) out.m_override = static_cast<int>(get_count(spec, "M_override", where));
  if (spec.contains("c")) {
    const auto& v = spec.at("c");
    if (!v.is_number() || !(v.get<double>() > 0.0 && v.get<double>() <= 1.0)) {
      throw ConfigError(where + ".c: expected a number in (0, 1]");
    }
    out.c = v.get<double>();
  }
  if (spec.contains("K")) {
    out.k = get_count(spec, "K", where);
    if (*out.k == 0) throw ConfigError(where + ".K: must be positive");
  }
  if (out.reduction == Reduction::LazyAdept) {
    if (out.c.has_value() == out.k.has_value()) throw ConfigError(where + ": the lazy wrapper needs exactly one of c and K");
  } else if (out.c || out.k) {
    throw ConfigError(where + ": c and K apply only to the lazy wrapper");
  }
  if (spec.contains("query_budget")) out.query_budget = get_count(spec, "query_budget", where);
  if (spec.contains("prune_experts")) {
    const auto& v = spec.at("prune_experts");
    if (!v.is_boolean()) throw ConfigError(where + ".prune_experts: expected a boolean");
    if (out.reduction != Reduction::Bdpss) throw ConfigError(where + ".prune_experts: applies only to bdpss");
    out.prune_experts = v.get<bool>();
  }
  return out;
}

json to_json(const LearnerSpec& spec) {
  json j;
  j["reduction"] = spec.reduction == Reduction::Adept   ? "adept"
                   : spec.reduction == Reduction::Bdpss ? "bdpss"
                                                        : "lazy-adept";
  j["base"] = spec.base;
  j["eta"] = spec.eta_mode == EtaMode::Fixed ? "fixed" : "adaptive";
  if (spec.eta_value) j["eta_value"] = *spec.eta_value;
  if (spec.m_override) j["M_override"] = *spec.m_override;
  if (spec.c) j["c"] = *spec.c;
  if (spec.k) j["K"] = *spec.k;
  if (spec.query_budget) j["query_budget"] = *spec.query_budget;
  if (spec.reduction == Reduction::Bdpss) j["prune_experts"] = spec.prune_experts;
  return j;
}

const char* to_string(NumericMode mode) { return mode == NumericMode::Log ? "log" : "exact"; }
const char* to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "jsonl"; }

NumericMode parse_numeric(const std::string& text) {
  if (text == "log") return NumericMode::Log;
  if (text == "exact") return NumericMode::Exact;
  throw ConfigError("numeric: expected log or exact, got '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "jsonl") return OutputFormat::Jsonl;
  throw ConfigError("format: expected csv or jsonl, got '" + text + "'");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(doc, {"class", "learner", "adversary", "T", "seed", "replicates", "numeric", "output", "charging", "format"},
                 "");
  for (const char* key : {"class", "adversary", "T"}) {
    if (!doc.contains(key)) throw ConfigError(std::string(key) + ": missing");
  }
  ExperimentConfig cfg;
  cfg.class_spec = doc.at("class");
  cfg.adversary_spec = doc.at("adversary");
  cfg.learner = parse_learner(doc.contains("learner") ? doc.at("learner") : json::object());
  cfg.horizon = get_count(doc, "T", "");
  if (doc.contains("seed")) cfg.seed = get_count(doc, "seed", "");
  if (doc.contains("replicates")) {
    cfg.replicates = get_count(doc, "replicates", "");
    if (cfg.replicates == 0) throw ConfigError("replicates: must be positive");
  }
  if (doc.contains("numeric")) cfg.numeric = parse_numeric(get_string(doc, "numeric", "config"));
  if (doc.contains("output")) cfg.output = get_string(doc, "output", "config");
  if (doc.contains("charging")) {
    const auto c = get_string(doc, "charging", "config");
    if (c == "raw") {
      cfg.charging = Charging::Raw;
    } else if (c == "dedup") {
      cfg.charging = Charging::Dedup;
    } else {
      throw ConfigError("charging: expected raw or dedup, got '" + c + "'");
    }
  }
  if (doc.contains("format")) cfg.format = parse_format(get_string(doc, "format", "config"));
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

void validate(const ExperimentConfig& cfg) {
  auto cls = make_concept_class(cfg.class_spec, nullptr);
  const auto& spec = cfg.learner;
  const SinkPolicy policy = spec.reduction == Reduction::Bdpss ? SinkPolicy::PredictZero : SinkPolicy::Reject;
  std::shared_ptr<BaseLearner> base;
  try {
    base = make_base_learner(spec.base, cls, policy);
  } catch (const CapabilityError& e) {
    throw ConfigError(std::string("learner.base: ") + e.what());
  }
  const int budget = spec.m_override ? *spec.m_override : base->mistake_bound();
  (void)make_adversary(cfg.adversary_spec, cls, Rng(0));
  if (spec.reduction == Reduction::Bdpss) {
    if (!dynamic_cast<const FiniteConceptClass*>(cls.get())) throw ConfigError("learner.reduction: bdpss needs a finite class");
    if (cfg.horizon > Bdpss::kMaxHorizon || budget > Bdpss::kMaxBudget) {
      throw ConfigError("learner.reduction: bdpss is limited to T <= " + std::to_string(Bdpss::kMaxHorizon) +
                        " and M <= " + std::to_string(Bdpss::kMaxBudget));
    }
  }
  if (spec.reduction == Reduction::LazyAdept && spec.k && *spec.k > cfg.horizon) {
    throw ConfigError("learner.K: must not exceed T (" + std::to_string(cfg.horizon) + ")");
  }
  if (cfg.adversary_spec.is_object() && cfg.adversary_spec.value("type", "") == "fixed" &&
      cfg.adversary_spec.contains("pairs") && cfg.adversary_spec.at("pairs").size() < cfg.horizon) {
    throw ConfigError("adversary.pairs: fewer pairs than T");
  }
}

std::vector<std::string> config_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  (void)make_concept_class(cfg.class_spec, [&](const std::string& w) { out.push_back(w); });
  return out;
}

}  // namespace adept
