#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contraprost/benchmark.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::contrastive {

using bench::CaseLabel;

enum class Metric { Likelihood, Quality };
enum class NormMode { Geometric, Literal };

std::string_view to_string(Metric m);
std::string_view to_string(NormMode m);
Metric parse_metric(std::string_view s);
NormMode parse_norm_mode(std::string_view s);

inline constexpr std::size_t kDefaultMaxHypotheses = 5;

// Teacher-forced sums of token log-probabilities for reference Y (ref_case)
// given audio X (audio_case), plus the same sum under empty conditioning.
struct LikelihoodRecord {
  std::string example_id;
  CaseLabel audio_case = CaseLabel::A;
  CaseLabel ref_case = CaseLabel::A;
  std::string model_id;
  double cond_sum_logprob = 0.0;
  long token_count = 0;
  double uncond_sum_logprob = 0.0;
  long uncond_token_count = 0;
};

struct CascadeHypothesis {
  double asr_logprob = 0.0;      // log L(Z|X)
  double mt_cond_logprob = 0.0;  // summed log p(Y|Z)
  long mt_token_count = 0;
};

struct CascadeLikelihoodRecord {
  std::string example_id;
  CaseLabel audio_case = CaseLabel::A;
  CaseLabel ref_case = CaseLabel::A;
  std::string model_id;
  std::vector<CascadeHypothesis> hypotheses;
  double uncond_sum_logprob = 0.0;
  long uncond_token_count = 0;
};

struct QualityRecord {
  std::string example_id;
  CaseLabel audio_case = CaseLabel::A;
  CaseLabel ref_case = CaseLabel::A;
  std::string model_id;
  double qe_score = 0.0;
  std::string hypothesis_text;
};

void validate(const LikelihoodRecord& rec);
void validate(const CascadeLikelihoodRecord& rec, std::size_t max_hypotheses = kDefaultMaxHypotheses);

// Log of the length-normalised likelihood of a summed log-probability:
// sum/n in geometric mode, sum - log(n) in literal mode.
double length_normalized_log(double sum_logprob, long token_count, NormMode mode);

double log_normalized_likelihood(const LikelihoodRecord& rec, NormMode mode = NormMode::Geometric);
double normalized_likelihood(const LikelihoodRecord& rec, NormMode mode = NormMode::Geometric);

// log of sum_j L(Y|Z_j) L(Z_j|X) / sum_j L(Z_j|X), before dividing by the
// unconditional likelihood.
double cascade_conditional_log_likelihood(std::span<const CascadeHypothesis> hyps, NormMode mode);
double log_cascade_likelihood(const CascadeLikelihoodRecord& rec, NormMode mode = NormMode::Geometric);
double cascade_likelihood(const CascadeLikelihoodRecord& rec, NormMode mode = NormMode::Geometric);

// Non-empty when the hypotheses' MT token counts differ by more than 20%.
std::optional<std::string> cascade_length_warning(const CascadeLikelihoodRecord& rec);

double quality_agreement(const QualityRecord& rec);

// The four agreement values of one example under one model and metric.
struct AgreementSet {
  std::optional<double> a_given_a;  // f(Y^a | X^a)
  std::optional<double> b_given_a;  // f(Y^b | X^a)
  std::optional<double> b_given_b;  // f(Y^b | X^b)
  std::optional<double> a_given_b;  // f(Y^a | X^b)

  std::optional<double>& at(CaseLabel audio, CaseLabel ref);
  // Names of absent slots, e.g. "f(Y^b|X^a)".
  std::vector<std::string> missing() const;
};

struct ExampleVerdict {
  std::string example_id;
  std::string model_id;
  Metric metric = Metric::Likelihood;
  bool directional = false;
  bool global = false;
  double d1 = 0.0;
  double d2 = 0.0;
};

ExampleVerdict evaluate_example(const std::string& example_id, const std::string& model_id, Metric metric,
                                const AgreementSet& values);

enum class GroupBy { All, Category, Subcategory };

struct GroupKey {
  std::string category;
  std::string subcategory;
};
using GroupIndex = std::map<std::string, GroupKey>;

struct GroupRow {
  std::string group;
  double directional_pct = 0.0;
  double global_pct = 0.0;
  std::size_t count = 0;
};

// Percent of solved examples per group, groups in lexicographic order.
// `index` maps example ids to their category/subcategory and is only
// consulted for GroupBy::Category and GroupBy::Subcategory.
std::vector<GroupRow> aggregate(std::span<const ExampleVerdict> verdicts, GroupBy group_by,
                                const GroupIndex& index = {});

GroupIndex make_group_index(std::span<const bench::ContrastiveExample> examples);

// Mean QE score over correct pairs (audio_case == ref_case).
double standard_quality(std::span<const QualityRecord> records);

// Records of a `scores.jsonl` file, discriminated by "kind".
struct ScoreSet {
  std::vector<LikelihoodRecord> likelihood;
  std::vector<CascadeLikelihoodRecord> cascade;
  std::vector<QualityRecord> quality;

  void append(ScoreSet&& other);
};

jsonl::Json to_json(const ExampleVerdict& v);
// Reads a verdicts.jsonl file as written by the evaluate command.
std::vector<ExampleVerdict> load_verdicts(const std::filesystem::path& path);

ScoreSet load_scores(const std::filesystem::path& path, std::size_t max_hypotheses = kDefaultMaxHypotheses);
void save_scores(const std::filesystem::path& path, const ScoreSet& scores);

}  // namespace contraprost::contrastive
