#include "adept/transcript.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adept/errors.hpp"

namespace adept {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_transcript(std::ostream& out, const std::vector<RoundRecord>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    bool first = true;
    for (const char* c : kTranscriptColumns) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\n';
    for (const auto& r : rows) {
      out << r.round << ',' << to_string(r.x) << ',' << format_double(r.p1) << ',' << bit(r.prediction) << ','
          << bit(r.label) << ',' << r.active << ',' << r.queries << ',' << r.cum_raw_queries << ','
          << r.cum_charged_queries << ',' << format_double(r.expected_loss) << ',' << r.realized_loss << '\n';
    }
    return;
  }
  // Hand-rolled so key order and number formatting match the CSV exactly.
  for (const auto& r : rows) {
    out << "{\"round\":" << r.round << ",\"x\":\"" << to_string(r.x) << "\",\"p1\":" << format_double(r.p1)
        << ",\"prediction\":" << bit(r.prediction) << ",\"label\":" << bit(r.label) << ",\"active\":" << r.active
        << ",\"queries\":" << r.queries << ",\"cum_raw_queries\":" << r.cum_raw_queries
        << ",\"cum_charged_queries\":" << r.cum_charged_queries
        << ",\"expected_loss\":" << format_double(r.expected_loss) << ",\"realized_loss\":" << r.realized_loss
        << "}\n";
  }
}

std::string format_transcript(const std::vector<RoundRecord>& rows, OutputFormat format) {
  std::ostringstream out;
  write_transcript(out, rows, format);
  return out.str();
}

std::vector<TranscriptRow> read_transcript(std::istream& in, OutputFormat format) {
  std::vector<TranscriptRow> rows;
  std::string line;
  std::size_t line_no = 0;
  if (format == OutputFormat::Csv) {
    if (!std::getline(in, line)) return rows;
    ++line_no;
    const auto header = split_csv(line);
    if (header.size() != std::size(kTranscriptColumns)) throw std::runtime_error("transcript: unexpected header");
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != std::size(kTranscriptColumns)) {
        throw std::runtime_error("transcript: line " + std::to_string(line_no) + " has " + std::to_string(c.size()) +
                                 " fields");
      }
      TranscriptRow r;
      r.round = std::stoull(c[0]);
      r.x = c[1];
      r.p1 = std::stod(c[2]);
      r.prediction = std::stoi(c[3]);
      r.label = std::stoi(c[4]);
      r.active = std::stoull(c[5]);
      r.queries = std::stoull(c[6]);
      r.cum_raw_queries = std::stoull(c[7]);
      r.cum_charged_queries = std::stoull(c[8]);
      r.expected_loss = std::stod(c[9]);
      r.realized_loss = std::stoi(c[10]);
      rows.push_back(std::move(r));
    }
    return rows;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TranscriptRow r;
    r.round = j.at("round").get<std::size_t>();
    r.x = j.at("x").get<std::string>();
    r.p1 = j.at("p1").get<double>();
    r.prediction = j.at("prediction").get<int>();
    r.label = j.at("label").get<int>();
    r.active = j.at("active").get<std::size_t>();
    r.queries = j.at("queries").get<std::uint64_t>();
    r.cum_raw_queries = j.at("cum_raw_queries").get<std::uint64_t>();
    r.cum_charged_queries = j.at("cum_charged_queries").get<std::uint64_t>();
    r.expected_loss = j.at("expected_loss").get<double>();
    r.realized_loss = j.at("realized_loss").get<int>();
    rows.push_back(std::move(r));
  }
  return rows;
}

RecomputedTotals recompute(const std::vector<TranscriptRow>& rows) {
  RecomputedTotals t;
  for (const auto& r : rows) {
    t.learner_loss += static_cast<std::uint64_t>(r.prediction != r.label);
    t.expected_loss += r.label == 1 ? 1.0 - r.p1 : r.p1;
    t.raw_queries += r.queries;
  }
  if (!rows.empty()) t.charged_queries = rows.back().cum_charged_queries;
  return t;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "T",          "seed",          "learner",           "adversary",        "M",
      "K",          "learner_loss",  "expected_loss",     "comparator_loss",  "realized_regret",
      "expected_regret", "raw_queries", "charged_queries", "reduction_queries", "base_learner_queries",
      "throttled_queries", "max_active", "query_rounds",   "non_query_rounds", "non_query_expected_loss",
      "expert_count", "early_reads",  "wall_ms"};
  return cols;
}

std::vector<std::string> summary_values(const Summary& s) {
  return {std::to_string(s.horizon),
          std::to_string(s.seed),
          s.learner,
          s.adversary,
          std::to_string(s.budget),
          std::to_string(s.internal_horizon),
          std::to_string(s.learner_loss),
          format_double(s.expected_loss),
          std::to_string(s.comparator_loss),
          format_double(s.realized_regret),
          format_double(s.expected_regret),
          std::to_string(s.raw_queries),
          std::to_string(s.charged_queries),
          std::to_string(s.reduction_queries),
          std::to_string(s.base_learner_queries),
          std::to_string(s.throttled_queries),
          std::to_string(s.max_active),
          std::to_string(s.query_rounds),
          std::to_string(s.non_query_rounds),
          format_double(s.non_query_expected_loss),
          s.expert_count,
          std::to_string(s.early_reads),
          format_double(s.wall_ms)};
}

void write_summary_header(std::ostream& out) {
  const auto& cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_summary_row(std::ostream& out, const Summary& s) {
  const auto values = summary_values(s);
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  out << '\n';
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path == "-") return path;
  const std::filesystem::path p(path);
  if (p.is_absolute() || p.has_parent_path()) return path;
  if (const char* dir = std::getenv("ADEPT_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return (std::filesystem::path(dir) / p).string();
  }
  return path;
}

}  // namespace adept
