#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace contraprost::dsp {

struct AudioClip {
  std::vector<double> samples;  // mono, in [-1, 1]
  int sample_rate_hz = 16000;

  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

void validate(const AudioClip& clip);

// Mono RIFF/WAVE, 16-bit PCM or 32-bit IEEE float.
AudioClip read_wav(const std::filesystem::path& path);

enum class WavFormat { Pcm16, Float32 };
void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavFormat format = WavFormat::Pcm16);

struct AlignedWord {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct WordAlignment {
  std::vector<AlignedWord> words;
};

// Checks ordering, positivity and (when given) that the last word ends
// within the clip.
void validate(const WordAlignment& align, std::optional<double> clip_duration_s = std::nullopt);

struct PitchSettings {
  double frame_s = 0.040;
  double hop_s = 0.010;
  double min_f0_hz = 60.0;
  double max_f0_hz = 400.0;
  // Minimum normalised autocorrelation peak for a frame to count as voiced.
  double voicing_threshold = 0.5;
};

// F0 of one frame via normalised autocorrelation with parabolic peak
// interpolation; nullopt for unvoiced or silent frames.
std::optional<double> estimate_frame_f0(const double* frame, std::size_t n, int sample_rate_hz,
                                        const PitchSettings& settings = {});

struct RawWordFeatures {
  double rms = 0.0;
  std::optional<double> f0_hz;  // mean over voiced frames; nullopt if none
  double duration_s = 0.0;
};

// Per-word RMS, mean F0 and duration before normalisation.
std::vector<RawWordFeatures> extract_raw_word_features(const AudioClip& clip, const WordAlignment& align,
                                                       const PitchSettings& settings = {});

struct WordFeatures {
  double loud = 0.0;
  double pitch = 0.0;
  double dur = 0.0;
};

// z-scores (sample standard deviation) of each value; all zeros for fewer
// than two values or when the values are all equal.
std::vector<double> z_scores(const std::vector<double>& values);

// Raw features z-scored across the utterance. Unvoiced words take the
// utterance median F0 before normalisation.
std::vector<WordFeatures> extract_word_features(const AudioClip& clip, const WordAlignment& align,
                                                const PitchSettings& settings = {});

// Silence between consecutive words, clamped at 0.
std::vector<double> gap_durations(const WordAlignment& align);

}  // namespace contraprost::dsp
