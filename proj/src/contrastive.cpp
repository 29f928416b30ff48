#include "contraprost/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contraprost/error.hpp"
#include "contraprost/jsonl.hpp"

namespace contraprost::contrastive {

using jsonl::Json;

namespace {

double log_sum_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

void require_logprob(double v, const char* what, const std::string& id) {
  if (!std::isfinite(v) || v > 0.0) throw Error("record " + id + ": " + what + " must be a finite value <= 0");
}

std::string record_key(const std::string& id, const std::string& model) { return id + " (model " + model + ")"; }

// JSON helpers for the scores wire format.
std::string str_at(const Json& j, const char* k) {
  if (!j.contains(k) || !j[k].is_string()) throw Error(std::string("field '") + k + "' must be a string");
  return j[k].get<std::string>();
}

double num_at(const Json& j, const char* k) {
  if (!j.contains(k) || !j[k].is_number()) throw Error(std::string("field '") + k + "' must be a number");
  return j[k].get<double>();
}

long int_at(const Json& j, const char* k) {
  if (!j.contains(k) || !j[k].is_number_integer()) throw Error(std::string("field '") + k + "' must be an integer");
  return j[k].get<long>();
}

template <typename R>
void read_common(const Json& j, R& rec) {
  rec.example_id = str_at(j, "example_id");
  rec.audio_case = bench::parse_case_label(str_at(j, "audio_case"));
  rec.ref_case = bench::parse_case_label(str_at(j, "ref_case"));
  rec.model_id = str_at(j, "model_id");
}

template <typename R>
Json write_common(const char* kind, const R& rec) {
  Json j;
  j["kind"] = kind;
  j["example_id"] = rec.example_id;
  j["audio_case"] = bench::to_string(rec.audio_case);
  j["ref_case"] = bench::to_string(rec.ref_case);
  j["model_id"] = rec.model_id;
  return j;
}

}  // namespace

std::string_view to_string(Metric m) { return m == Metric::Likelihood ? "Likelihood" : "Quality"; }
std::string_view to_string(NormMode m) { return m == NormMode::Geometric ? "geometric" : "literal"; }

Metric parse_metric(std::string_view s) {
  if (s == "Likelihood" || s == "likelihood") return Metric::Likelihood;
  if (s == "Quality" || s == "quality") return Metric::Quality;
  throw Error("unknown metric '" + std::string(s) + "' (expected Likelihood or Quality)");
}

NormMode parse_norm_mode(std::string_view s) {
  if (s == "geometric") return NormMode::Geometric;
  if (s == "literal") return NormMode::Literal;
  throw Error("unknown norm mode '" + std::string(s) + "' (expected geometric or literal)");
}

void validate(const LikelihoodRecord& rec) {
  const auto key = record_key(rec.example_id, rec.model_id);
  require_logprob(rec.cond_sum_logprob, "cond_sum_logprob", key);
  require_logprob(rec.uncond_sum_logprob, "uncond_sum_logprob", key);
  if (rec.token_count <= 0) throw Error("record " + key + ": token_count must be positive");
  if (rec.uncond_token_count != rec.token_count)
    throw Error("record " + key + ": token_count and uncond_token_count differ");
}

void validate(const CascadeLikelihoodRecord& rec, std::size_t max_hypotheses) {
  const auto key = record_key(rec.example_id, rec.model_id);
  if (rec.hypotheses.empty()) throw Error("record " + key + ": cascade record has no hypotheses");
  if (rec.hypotheses.size() > max_hypotheses)
    throw Error("record " + key + ": " + std::to_string(rec.hypotheses.size()) + " hypotheses exceed the limit of " +
                std::to_string(max_hypotheses));
  for (const auto& h : rec.hypotheses) {
    require_logprob(h.asr_logprob, "asr_logprob", key);
    require_logprob(h.mt_cond_logprob, "mt_cond_logprob", key);
    if (h.mt_token_count <= 0) throw Error("record " + key + ": mt_token_count must be positive");
  }
  require_logprob(rec.uncond_sum_logprob, "uncond_sum_logprob", key);
  if (rec.uncond_token_count <= 0) throw Error("record " + key + ": uncond_token_count must be positive");
}

double length_normalized_log(double sum_logprob, long token_count, NormMode mode) {
  if (token_count <= 0) throw Error("token count must be positive");
  if (mode == NormMode::Geometric) return sum_logprob / static_cast<double>(token_count);
  return sum_logprob - std::log(static_cast<double>(token_count));
}

double log_normalized_likelihood(const LikelihoodRecord& rec, NormMode mode) {
  validate(rec);
  return length_normalized_log(rec.cond_sum_logprob, rec.token_count, mode) -
         length_normalized_log(rec.uncond_sum_logprob, rec.uncond_token_count, mode);
}

double normalized_likelihood(const LikelihoodRecord& rec, NormMode mode) {
  return std::exp(log_normalized_likelihood(rec, mode));
}

double cascade_conditional_log_likelihood(std::span<const CascadeHypothesis> hyps, NormMode mode) {
  if (hyps.empty()) throw Error("cascade likelihood needs at least one hypothesis");
  std::vector<double> joint;
  std::vector<double> asr;
  joint.reserve(hyps.size());
  asr.reserve(hyps.size());
  for (const auto& h : hyps) {
    joint.push_back(length_normalized_log(h.mt_cond_logprob, h.mt_token_count, mode) + h.asr_logprob);
    asr.push_back(h.asr_logprob);
  }
  return log_sum_exp(joint) - log_sum_exp(asr);
}

double log_cascade_likelihood(const CascadeLikelihoodRecord& rec, NormMode mode) {
  validate(rec, std::numeric_limits<std::size_t>::max());
  return cascade_conditional_log_likelihood(rec.hypotheses, mode) -
         length_normalized_log(rec.uncond_sum_logprob, rec.uncond_token_count, mode);
}

double cascade_likelihood(const CascadeLikelihoodRecord& rec, NormMode mode) {
  return std::exp(log_cascade_likelihood(rec, mode));
}

std::optional<std::string> cascade_length_warning(const CascadeLikelihoodRecord& rec) {
  if (rec.hypotheses.size() < 2) return std::nullopt;
  auto [lo, hi] = std::minmax_element(rec.hypotheses.begin(), rec.hypotheses.end(),
                                      [](const auto& a, const auto& b) { return a.mt_token_count < b.mt_token_count; });
  if (static_cast<double>(hi->mt_token_count) <= 1.2 * static_cast<double>(lo->mt_token_count)) return std::nullopt;
  return "record " + record_key(rec.example_id, rec.model_id) + ": hypothesis token counts range " +
         std::to_string(lo->mt_token_count) + ".." + std::to_string(hi->mt_token_count) +
         " (more than 20% apart)";
}

double quality_agreement(const QualityRecord& rec) {
  if (!(rec.qe_score >= 0.0 && rec.qe_score <= 1.0))
    throw Error("record " + record_key(rec.example_id, rec.model_id) + ": qe_score outside [0,1]");
  return rec.qe_score;
}

std::optional<double>& AgreementSet::at(CaseLabel audio, CaseLabel ref) {
  if (audio == CaseLabel::A) return ref == CaseLabel::A ? a_given_a : b_given_a;
  return ref == CaseLabel::B ? b_given_b : a_given_b;
}

std::vector<std::string> AgreementSet::missing() const {
  std::vector<std::string> out;
  if (!a_given_a) out.emplace_back("f(Y^a|X^a)");
  if (!b_given_a) out.emplace_back("f(Y^b|X^a)");
  if (!b_given_b) out.emplace_back("f(Y^b|X^b)");
  if (!a_given_b) out.emplace_back("f(Y^a|X^b)");
  return out;
}

ExampleVerdict evaluate_example(const std::string& example_id, const std::string& model_id, Metric metric,
                                const AgreementSet& values) {
  const auto absent = values.missing();
  if (!absent.empty()) {
    std::string msg = "example " + example_id + " (model " + model_id + "): missing ";
    for (std::size_t i = 0; i < absent.size(); ++i) msg += (i ? ", " : "") + absent[i];
    throw Error(msg);
  }
  ExampleVerdict v;
  v.example_id = example_id;
  v.model_id = model_id;
  v.metric = metric;
  v.d1 = *values.a_given_a - *values.b_given_a;
  v.d2 = *values.b_given_b - *values.a_given_b;
  v.global = v.d1 > 0.0 && v.d2 > 0.0;
  v.directional = v.d1 + v.d2 > 0.0;
  if (v.global && !v.directional) throw std::logic_error("global condition holds without the directional one");
  return v;
}

GroupIndex make_group_index(std::span<const bench::ContrastiveExample> examples) {
  GroupIndex index;
  for (const auto& ex : examples) {
    auto sub = bench::canonical_subcategory(ex.category, ex.subcategory).value_or(ex.subcategory);
    index[ex.id] = GroupKey{std::string(bench::to_string(ex.category)), std::move(sub)};
  }
  return index;
}

std::vector<GroupRow> aggregate(std::span<const ExampleVerdict> verdicts, GroupBy group_by, const GroupIndex& index) {
  if (verdicts.empty()) throw Error("aggregate: no verdicts");
  struct Tally {
    std::size_t count = 0, directional = 0, global = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& v : verdicts) {
    std::string group = "All";
    if (group_by != GroupBy::All) {
      auto it = index.find(v.example_id);
      if (it == index.end()) throw Error("aggregate: example " + v.example_id + " has no category");
      group = group_by == GroupBy::Category ? it->second.category : it->second.subcategory;
    }
    auto& t = tallies[group];
    ++t.count;
    t.directional += v.directional ? 1 : 0;
    t.global += v.global ? 1 : 0;
  }
  std::vector<GroupRow> rows;
  for (const auto& [group, t] : tallies) {
    const auto n = static_cast<double>(t.count);
    rows.push_back({group, 100.0 * static_cast<double>(t.directional) / n, 100.0 * static_cast<double>(t.global) / n,
                    t.count});
  }
  return rows;
}

double standard_quality(std::span<const QualityRecord> records) {
  if (records.empty()) throw Error("standard_quality: no records");
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.audio_case != r.ref_case)
      throw Error("standard_quality: record " + record_key(r.example_id, r.model_id) + " is not a correct pair");
    sum += quality_agreement(r);
  }
  return sum / static_cast<double>(records.size());
}

void ScoreSet::append(ScoreSet&& other) {
  std::move(other.likelihood.begin(), other.likelihood.end(), std::back_inserter(likelihood));
  std::move(other.cascade.begin(), other.cascade.end(), std::back_inserter(cascade));
  std::move(other.quality.begin(), other.quality.end(), std::back_inserter(quality));
}

Json to_json(const ExampleVerdict& v) {
  Json j;
  j["example_id"] = v.example_id;
  j["model_id"] = v.model_id;
  j["metric"] = to_string(v.metric);
  j["directional"] = v.directional;
  j["global"] = v.global;
  j["d1"] = v.d1;
  j["d2"] = v.d2;
  return j;
}

std::vector<ExampleVerdict> load_verdicts(const std::filesystem::path& path) {
  std::vector<ExampleVerdict> out;
  jsonl::for_each_line(path, [&](const Json& j, std::size_t line) {
    try {
      ExampleVerdict v;
      v.example_id = str_at(j, "example_id");
      v.model_id = str_at(j, "model_id");
      v.metric = parse_metric(str_at(j, "metric"));
      if (!j.contains("directional") || !j["directional"].is_boolean() || !j.contains("global") ||
          !j["global"].is_boolean())
        throw Error("fields 'directional' and 'global' must be booleans");
      v.directional = j["directional"].get<bool>();
      v.global = j["global"].get<bool>();
      v.d1 = num_at(j, "d1");
      v.d2 = num_at(j, "d2");
      if (v.global && !v.directional) throw Error("global verdict without directional");
      out.push_back(std::move(v));
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

ScoreSet load_scores(const std::filesystem::path& path, std::size_t max_hypotheses) {
  ScoreSet out;
  jsonl::for_each_line(path, [&](const Json& j, std::size_t line) {
    try {
      const auto kind = str_at(j, "kind");
      if (kind == "likelihood") {
        LikelihoodRecord r;
        read_common(j, r);
        r.cond_sum_logprob = num_at(j, "cond_sum_logprob");
        r.token_count = int_at(j, "token_count");
        r.uncond_sum_logprob = num_at(j, "uncond_sum_logprob");
        r.uncond_token_count = int_at(j, "uncond_token_count");
        validate(r);
        out.likelihood.push_back(std::move(r));
      } else if (kind == "cascade") {
        CascadeLikelihoodRecord r;
        read_common(j, r);
        if (!j.contains("hypotheses") || !j["hypotheses"].is_array())
          throw Error("field 'hypotheses' must be an array");
        for (const auto& h : j["hypotheses"]) {
          r.hypotheses.push_back(
              {num_at(h, "asr_logprob"), num_at(h, "mt_cond_logprob"), int_at(h, "mt_token_count")});
        }
        r.uncond_sum_logprob = num_at(j, "uncond_sum_logprob");
        r.uncond_token_count = int_at(j, "uncond_token_count");
        validate(r, max_hypotheses);
        out.cascade.push_back(std::move(r));
      } else if (kind == "quality") {
        QualityRecord r;
        read_common(j, r);
        r.qe_score = num_at(j, "qe_score");
        if (j.contains("hypothesis_text") && j["hypothesis_text"].is_string())
          r.hypothesis_text = j["hypothesis_text"].get<std::string>();
        quality_agreement(r);
        out.quality.push_back(std::move(r));
      } else {
        throw Error("unknown record kind '" + kind + "'");
      }
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

void save_scores(const std::filesystem::path& path, const ScoreSet& scores) {
  std::vector<Json> rows;
  for (const auto& r : scores.likelihood) {
    Json j = write_common("likelihood", r);
    j["cond_sum_logprob"] = r.cond_sum_logprob;
    j["token_count"] = r.token_count;
    j["uncond_sum_logprob"] = r.uncond_sum_logprob;
    j["uncond_token_count"] = r.uncond_token_count;
    rows.push_back(std::move(j));
  }
  for (const auto& r : scores.cascade) {
    Json j = write_common("cascade", r);
    j["hypotheses"] = Json::array();
    for (const auto& h : r.hypotheses)
      j["hypotheses"].push_back(
          {{"asr_logprob", h.asr_logprob}, {"mt_cond_logprob", h.mt_cond_logprob}, {"mt_token_count", h.mt_token_count}});
    j["uncond_sum_logprob"] = r.uncond_sum_logprob;
    j["uncond_token_count"] = r.uncond_token_count;
    rows.push_back(std::move(j));
  }
  for (const auto& r : scores.quality) {
    Json j = write_common("quality", r);
    j["qe_score"] = r.qe_score;
    if (!r.hypothesis_text.empty()) j["hypothesis_text"] = r.hypothesis_text;
    rows.push_back(std::move(j));
  }
  jsonl::write_lines(path, rows);
}

}  // namespace contraprost::contrastive
