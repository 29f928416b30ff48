#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "contraprost/benchmark.hpp"
#include "contraprost/objectives.hpp"
#include "contraprost/prosody_dsp.hpp"

// Adapter-produced inputs for candidate ranking, one JSON object per line.
namespace contraprost::wire {

struct CandidateRow {
  std::string example_id;
  bench::CaseLabel case_label = bench::CaseLabel::A;
  std::string voice_id;
  std::string audio_ref;
  std::string transcript;
  std::optional<double> wer;  // computed against the sentence when absent
};

struct PunctProbs {
  double p_period = 0.0;
  double p_excl = 0.0;
  double p_quest = 0.0;
};

// {example_id, case, voice_id, audio_ref, transcript, wer?}
std::vector<CandidateRow> load_candidates(const std::filesystem::path& path);
void save_candidates(const std::filesystem::path& path, const std::vector<CandidateRow>& rows);

// {audio_ref, words: [{text, start_s, end_s}]}; duplicate audio_ref rejected.
std::map<std::string, dsp::WordAlignment> load_alignments(const std::filesystem::path& path);
void save_alignments(const std::filesystem::path& path, const std::map<std::string, dsp::WordAlignment>& rows);

// {audio_ref, probs: {emotion: p}}; emotions absent from `probs` get 0.
std::map<std::string, objectives::EmotionPosterior> load_posteriors(const std::filesystem::path& path);
void save_posteriors(const std::filesystem::path& path,
                     const std::map<std::string, objectives::EmotionPosterior>& rows);

// {audio_ref, p_period, p_excl, p_quest}
std::map<std::string, PunctProbs> load_punct_probs(const std::filesystem::path& path);
void save_punct_probs(const std::filesystem::path& path, const std::map<std::string, PunctProbs>& rows);

// Word-level reading of a prosody annotation such as "I never said *SHE* <pause> stole it".
// Words are whitespace-separated text outside <...> tags; a word containing
// '*' is stressed; a tag after word k marks a break in gap k.
struct ProsodyMarks {
  std::vector<std::string> words;  // '*' removed
  std::set<std::size_t> stressed;
  std::set<std::size_t> breaks;
};

ProsodyMarks parse_prosody_marks(std::string_view annotation);

}  // namespace contraprost::wire
