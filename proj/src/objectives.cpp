#include "contraprost/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "contraprost/error.hpp"

namespace contraprost::objectives {

namespace {

constexpr std::array<std::pair<Emotion, std::string_view>, kEmotionCount> kEmotionNames{{
    {Emotion::Happy, "happy"},
    {Emotion::Calm, "calm"},
    {Emotion::Neutral, "neutral"},
    {Emotion::Surprised, "surprised"},
    {Emotion::Sad, "sad"},
    {Emotion::Disgust, "disgust"},
    {Emotion::Angry, "angry"},
    {Emotion::Fearful, "fearful"},
}};

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(what) + " must be a probability in [0,1]");
}

double mean_of(std::span<const double> xs, const std::set<std::size_t>& idx) {
  if (idx.empty()) return 0.0;
  double s = 0.0;
  for (auto i : idx) s += xs[i];
  return s / static_cast<double>(idx.size());
}

}  // namespace

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double word_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw Error("word error rate needs a non-empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

std::vector<std::string> wer_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (c >= 0x80 || std::isalnum(c) || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<double> stress_score(std::span<const dsp::WordFeatures> features, const StressWeights& w) {
  if (features.empty()) throw Error("stress score needs at least one word");
  if (w.lambda_loud < 0 || w.lambda_pitch < 0 || w.lambda_dur < 0) throw Error("stress weights must be >= 0");
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(w.lambda_loud * f.loud + w.lambda_pitch * f.pitch + w.lambda_dur * f.dur);
  return out;
}

double obj_stress(std::span<const double> stress, std::size_t tgt_idx, std::size_t foil_idx) {
  const std::size_t n = stress.size();
  if (n < 2) throw Error("obj_stress needs at least two words");
  if (tgt_idx >= n || foil_idx >= n) throw Error("obj_stress: word index out of range");
  if (tgt_idx == foil_idx) throw Error("obj_stress: target and foil must differ");
  double rest = 0.0;
  for (std::size_t w = 0; w < n; ++w)
    if (w != tgt_idx) rest += stress[w];
  return 2.0 * stress[tgt_idx] - stress[foil_idx] - rest / static_cast<double>(n - 1);
}

double obj_break(std::span<const double> gaps, const std::set<std::size_t>& tgt_set,
                 const std::set<std::size_t>& foil_set) {
  const std::size_t n = gaps.size();
  for (auto i : tgt_set)
    if (i >= n) throw Error("obj_break: target gap index out of range");
  for (auto i : foil_set) {
    if (i >= n) throw Error("obj_break: foil gap index out of range");
    if (tgt_set.contains(i)) throw Error("obj_break: target and foil gaps must be disjoint");
  }
  if (tgt_set.size() >= n) throw Error("obj_break: target gaps cover every gap");
  double rest = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    if (!tgt_set.contains(l)) rest += gaps[l];
  return 2.0 * mean_of(gaps, tgt_set) - mean_of(gaps, foil_set) - rest / static_cast<double>(n - tgt_set.size());
}

double obj_intonation(double p_period, double p_excl, double p_quest, CaseKind kind) {
  require_probability(p_period, "p_period");
  require_probability(p_excl, "p_excl");
  require_probability(p_quest, "p_quest");
  const double s = p_period + p_excl - p_quest;
  return kind == CaseKind::Statement ? s : -s;
}

std::string_view to_string(Emotion e) {
  for (const auto& [em, name] : kEmotionNames)
    if (em == e) return name;
  return "?";
}

Emotion parse_emotion(std::string_view s) {
  std::string key(s);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& [em, name] : kEmotionNames)
    if (name == key) return em;
  throw Error("unknown emotion label '" + std::string(s) + "'");
}

const std::array<Emotion, kEmotionCount>& all_emotions() {
  static const std::array<Emotion, kEmotionCount> all = [] {
    std::array<Emotion, kEmotionCount> out{};
    for (std::size_t i = 0; i < kEmotionCount; ++i) out[i] = kEmotionNames[i].first;
    return out;
  }();
  return all;
}

EmotionPosterior EmotionPosterior::uniform() {
  EmotionPosterior p;
  for (auto e : all_emotions()) p.probs[e] = 1.0 / kEmotionCount;
  return p;
}

EmotionPosterior EmotionPosterior::one_hot(Emotion hot) {
  EmotionPosterior p;
  for (auto e : all_emotions()) p.probs[e] = e == hot ? 1.0 : 0.0;
  return p;
}

double EmotionPosterior::at(Emotion e) const {
  auto it = probs.find(e);
  if (it == probs.end()) throw Error("emotion '" + std::string(to_string(e)) + "' missing from posterior");
  return it->second;
}

void validate(const EmotionPosterior& post) {
  double sum = 0.0;
  for (const auto& [e, p] : post.probs) {
    if (!(p >= 0.0)) throw Error("posterior probability for '" + std::string(to_string(e)) + "' is negative");
    sum += p;
  }
  if (sum < 0.999 || sum > 1.001) throw Error("posterior probabilities sum to " + std::to_string(sum));
}

double obj_emotion(const EmotionPosterior& post, Emotion tgt, Emotion foil) {
  if (tgt == foil) throw Error("obj_emotion: target and foil emotions must differ");
  return post.at(tgt) - post.at(foil);
}

PolitenessWeights PolitenessWeights::defaults() {
  using enum Emotion;
  return {
      {{Happy, 0.3}, {Calm, 0.3}, {Neutral, 0.2}, {Surprised, 0.1}, {Sad, 0.0}, {Disgust, -0.1}, {Angry, -0.2},
       {Fearful, -0.1}},
      {{Happy, -0.1}, {Calm, -0.2}, {Neutral, 0.1}, {Surprised, 0.1}, {Sad, 0.2}, {Disgust, 0.3}, {Angry, 0.4},
       {Fearful, 0.0}},
  };
}

double politeness_score(const EmotionPosterior& post, const PolitenessWeights& w, PolitenessKind kind) {
  const auto& weights = kind == PolitenessKind::Polite ? w.polite : w.impolite;
  double num = 0.0, den = 0.0;
  for (const auto& [e, weight] : weights) {
    auto it = post.probs.find(e);
    num += weight * (it == post.probs.end() ? 0.0 : it->second);
    den += weight;
  }
  if (den == 0.0) throw Error("politeness weights sum to zero");
  return num / den;
}

double obj_politeness(const EmotionPosterior& post, const PolitenessWeights& w, PolitenessKind tgt,
                      PolitenessKind foil) {
  return politeness_score(post, w, tgt) - politeness_score(post, w, foil);
}

Selection select_candidates(std::span<const Candidate> cands, const ObjectiveFn& objective, double threshold) {
  if (cands.empty()) throw Error("select_candidates: no candidates");
  Selection out;
  for (const auto& c : cands) {
    if (c.wer != 0.0) continue;
    Candidate scored = c;
    scored.objective = objective(c);
    if (!out.best || *scored.objective > *out.best->objective ||
        (*scored.objective == *out.best->objective && scored.voice_id < out.best->voice_id))
      out.best = std::move(scored);
  }
  if (!out.best) {
    out.verdict.add(bench::FilterReason::AllCandidatesInvalid);
  } else if (*out.best->objective < threshold) {
    out.verdict.add(bench::FilterReason::BelowObjectiveThreshold);
  }
  return out;
}

}  // namespace contraprost::objectives
