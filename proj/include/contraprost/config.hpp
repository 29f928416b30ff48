#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contraprost/contrastive.hpp"
#include "contraprost/jsonl.hpp"
#include "contraprost/objectives.hpp"
#include "contraprost/stats.hpp"

namespace contraprost {

struct RunConfig {
  std::filesystem::path manifest_path;
  std::vector<std::filesystem::path> scores_paths;
  std::optional<contrastive::Metric> metric;  // unset: every metric present in the scores
  contrastive::NormMode norm_mode = contrastive::NormMode::Geometric;
  std::size_t max_hypotheses = contrastive::kDefaultMaxHypotheses;
  std::map<std::string, double> thresholds;  // per category name; missing entries mean 0
  stats::BootstrapSettings bootstrap;
  std::vector<std::string> langs = {"De", "Es", "Ja"};
  std::filesystem::path output_dir = "contraprost_out";

  // rank-candidates inputs
  std::filesystem::path candidates_path;
  std::filesystem::path alignments_path;
  std::filesystem::path posteriors_path;
  std::filesystem::path punct_probs_path;
  std::filesystem::path audio_root;  // base for candidate audio_ref; defaults to the manifest directory
  objectives::StressWeights stress_weights;

  // stats inputs
  std::filesystem::path results_path;
  std::filesystem::path verdicts_path;
  std::string regression_metric = "contrastive_quality_global";
  double log_base = 2.718281828459045;

  double threshold_for(bench::Category c) const;
  // Canonical JSON of every setting; its hash identifies a run.
  jsonl::Json to_json() const;
  std::string hash() const;
};

// Parses `key = value` lines with optional `[section]` headers, `#`
// comments, quoted strings and `[a, b]` lists. Relative paths resolve
// against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

// Applies one `key=value` override using the same keys as the file
// (e.g. "bootstrap.seed=7", "thresholds.SentenceStress=0.2").
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value,
                    const std::filesystem::path& base_dir = {});

// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace contraprost
