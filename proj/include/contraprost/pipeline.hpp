#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "contraprost/config.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::pipeline {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitPartial = 2, kExitInternal = 3 };

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> messages;  // warnings and missing-data notes, already formatted
};

// Metadata embedded in every artifact: config hash, seed, norm mode and
// thresholds. Contains nothing time-dependent so reruns are byte-identical.
jsonl::Json run_meta(const RunConfig& cfg, const std::string& command);

// Reads manifest and scores, writes verdicts.jsonl, summary.json and
// summary.txt. Exit 2 when some examples lack records.
CommandResult cmd_evaluate(const RunConfig& cfg);

// Per target language: filtered_<lang>.jsonl, filter_report_<lang>.jsonl,
// plus filter_summary.json/.txt.
CommandResult cmd_filter(const RunConfig& cfg);

// Picks the best synthesized voice per prosodic case and writes
// ranked_manifest.jsonl, selection_report.jsonl and rank_summary.json/.txt.
CommandResult cmd_rank_candidates(const RunConfig& cfg);

// Regressions and correlations over results.csv, bootstrap comparisons over
// verdicts.jsonl; writes stats_report.json/.txt.
CommandResult cmd_stats(const RunConfig& cfg);

// Left-aligned first column, right-aligned others, columns padded to fit.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace contraprost::pipeline
