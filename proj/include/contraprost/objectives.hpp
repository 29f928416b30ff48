#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contraprost/benchmark.hpp"
#include "contraprost/prosody_dsp.hpp"

namespace contraprost::objectives {

// Levenshtein distance over tokens (unit costs) divided by |ref|.
double word_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp);
std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b);

// Lower-cases ASCII letters, drops punctuation other than apostrophes and
// splits on whitespace, so "Really?" and "really" compare equal.
std::vector<std::string> wer_tokens(std::string_view text);

struct StressWeights {
  double lambda_loud = 0.5;
  double lambda_pitch = 0.3;
  double lambda_dur = 0.2;
};

std::vector<double> stress_score(std::span<const dsp::WordFeatures> features, const StressWeights& w = {});

// 2*stress[tgt] - stress[foil] - mean of stress over words other than tgt
// (the foil included).
double obj_stress(std::span<const double> stress, std::size_t tgt_idx, std::size_t foil_idx);

// Gap sets must be disjoint (shared breaks removed by the caller) and
// tgt_set may not cover every gap. An empty set contributes 0 to its term.
double obj_break(std::span<const double> gaps, const std::set<std::size_t>& tgt_set,
                 const std::set<std::size_t>& foil_set);

enum class CaseKind { Statement, Question };
double obj_intonation(double p_period, double p_excl, double p_quest, CaseKind kind);

enum class Emotion { Happy, Calm, Neutral, Surprised, Sad, Disgust, Angry, Fearful };
inline constexpr std::size_t kEmotionCount = 8;

std::string_view to_string(Emotion e);
Emotion parse_emotion(std::string_view s);
const std::array<Emotion, kEmotionCount>& all_emotions();

struct EmotionPosterior {
  std::map<Emotion, double> probs;

  static EmotionPosterior uniform();
  static EmotionPosterior one_hot(Emotion e);
  double at(Emotion e) const;
};

// Non-negative values summing to 1 within 1e-3.
void validate(const EmotionPosterior& post);

double obj_emotion(const EmotionPosterior& post, Emotion tgt, Emotion foil);

enum class PolitenessKind { Polite, Impolite };

struct PolitenessWeights {
  std::map<Emotion, double> polite;
  std::map<Emotion, double> impolite;

  // Weights prompted from an LLM for re-using the emotion classifier.
  static PolitenessWeights defaults();
};

double politeness_score(const EmotionPosterior& post, const PolitenessWeights& w, PolitenessKind kind);
double obj_politeness(const EmotionPosterior& post, const PolitenessWeights& w, PolitenessKind tgt,
                      PolitenessKind foil);

struct Candidate {
  std::string voice_id;
  std::string audio_ref;
  std::string transcript;
  double wer = 0.0;
  std::optional<double> objective;
};

struct Selection {
  std::optional<Candidate> best;  // also set when dropped for a low objective
  bench::FilterReport verdict;
};

using ObjectiveFn = std::function<double(const Candidate&)>;

// Scores the candidates with WER == 0 and keeps the argmax (ties to the
// lexicographically smallest voice_id); drops when none is valid or the
// best objective is below `threshold`.
Selection select_candidates(std::span<const Candidate> cands, const ObjectiveFn& objective, double threshold);

}  // namespace contraprost::objectives
