#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adept/config.hpp"
#include "adept/game.hpp"

namespace adept {

// Column order of transcript files. JSONL rows carry the same keys.
inline constexpr const char* kTranscriptColumns[] = {
    "round", "x", "p1", "prediction", "label", "active", "queries", "cum_raw_queries", "cum_charged_queries",
    "expected_loss", "realized_loss"};

struct TranscriptRow {
  std::size_t round = 0;
  std::string x;
  double p1 = 0.0;
  int prediction = 0;
  int label = 0;
  std::size_t active = 0;
  std::uint64_t queries = 0;
  std::uint64_t cum_raw_queries = 0;
  std::uint64_t cum_charged_queries = 0;
  double expected_loss = 0.0;
  int realized_loss = 0;
};

void write_transcript(std::ostream& out, const std::vector<RoundRecord>& rows, OutputFormat format);
std::string format_transcript(const std::vector<RoundRecord>& rows, OutputFormat format);
std::vector<TranscriptRow> read_transcript(std::istream& in, OutputFormat format);

struct RecomputedTotals {
  std::uint64_t learner_loss = 0;
  double expected_loss = 0.0;
  std::uint64_t raw_queries = 0;
  std::uint64_t charged_queries = 0;
};
RecomputedTotals recompute(const std::vector<TranscriptRow>& rows);

// Summary table, one row per game (and optional aggregate rows from sweeps).
const std::vector<std::string>& summary_columns();
std::vector<std::string> summary_values(const Summary& s);
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const Summary& s);

// Resolves an output path: absolute or explicit relative paths are kept, bare
// names go under $ADEPT_OUTPUT_DIR when it is set. Empty stays empty.
std::string resolve_output_path(const std::string& path);

std::string format_double(double v);

}  // namespace adept
