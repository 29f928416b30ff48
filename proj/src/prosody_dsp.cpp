#include "contraprost/prosody_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contraprost/error.hpp"

namespace contraprost::dsp {

namespace {

struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};

Segment to_samples(const AlignedWord& w, const AudioClip& clip) {
  const auto n = static_cast<long long>(clip.samples.size());
  const auto b = std::clamp(std::llround(w.start_s * clip.sample_rate_hz), 0LL, n);
  const auto e = std::clamp(std::llround(w.end_s * clip.sample_rate_hz), 0LL, n);
  if (e <= b) throw Error("word '" + w.text + "' covers no samples");
  return {static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Mean F0 over the voiced frames of one word. Frames are laid out so the
// leftover samples split evenly on both ends of the segment.
std::optional<double> segment_f0(const AudioClip& clip, Segment seg, double silence_rms, const PitchSettings& s) {
  const std::size_t n = seg.end - seg.begin;
  const auto frame = static_cast<std::size_t>(std::lround(s.frame_s * clip.sample_rate_hz));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(s.hop_s * clip.sample_rate_hz)));
  std::vector<std::size_t> starts;
  std::size_t len = frame;
  if (n < frame) {
    len = n;
    starts.push_back(seg.begin);
  } else {
    const std::size_t count = (n - frame) / hop + 1;
    const std::size_t offset = (n - frame - (count - 1) * hop) / 2;
    for (std::size_t k = 0; k < count; ++k) starts.push_back(seg.begin + offset + k * hop);
  }
  double sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t start : starts) {
    const double* x = clip.samples.data() + start;
    double energy = 0.0;
    for (std::size_t i = 0; i < len; ++i) energy += x[i] * x[i];
    if (std::sqrt(energy / static_cast<double>(len)) <= silence_rms) continue;
    if (auto f0 = estimate_frame_f0(x, len, clip.sample_rate_hz, s)) {
      sum += *f0;
      ++voiced;
    }
  }
  if (voiced == 0) return std::nullopt;
  return sum / static_cast<double>(voiced);
}

}  // namespace

void validate(const WordAlignment& align, std::optional<double> clip_duration_s) {
  double prev_end = 0.0;
  for (std::size_t i = 0; i < align.words.size(); ++i) {
    const auto& w = align.words[i];
    if (!(w.start_s >= 0.0) || !(w.start_s < w.end_s))
      throw Error("alignment word " + std::to_string(i) + " ('" + w.text + "') has an invalid time span");
    if (i > 0 && w.start_s < prev_end)
      throw Error("alignment word " + std::to_string(i) + " ('" + w.text + "') overlaps its predecessor");
    prev_end = w.end_s;
  }
  if (clip_duration_s && !align.words.empty() && align.words.back().end_s > *clip_duration_s + 1e-9)
    throw Error("alignment extends past the end of the clip");
}

std::optional<double> estimate_frame_f0(const double* frame, std::size_t n, int sample_rate_hz,
                                        const PitchSettings& s) {
  const auto lag_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate_hz / s.max_f0_hz)));
  const auto lag_max = static_cast<std::size_t>(std::ceil(sample_rate_hz / s.min_f0_hz));
  // Need at least one full period of overlap at the longest lag.
  if (n < 2 * (lag_max + 1)) return std::nullopt;

  const double mean = std::accumulate(frame, frame + n, 0.0) / static_cast<double>(n);
  std::vector<double> x(frame, frame + n);
  for (double& v : x) v -= mean;

  // prefix sums of squares for the two partial energies
  std::vector<double> sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) sq[i + 1] = sq[i] + x[i] * x[i];
  if (sq[n] <= 0.0) return std::nullopt;

  std::vector<double> r(lag_max + 2, 0.0);
  for (std::size_t lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
    const std::size_t m = n - lag;
    double num = 0.0;
    for (std::size_t i = 0; i < m; ++i) num += x[i] * x[i + lag];
    const double den = std::sqrt(sq[m] * (sq[n] - sq[lag]));
    r[lag] = den > 0.0 ? num / den : 0.0;
  }

  double best = -1.0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, r[lag]);
  if (best < s.voicing_threshold) return std::nullopt;

  // Smallest-lag local maximum close to the global one guards against
  // picking a multiple of the true period.
  std::size_t pick = 0;
  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
      pick = lag;
      break;
    }
  }
  if (pick == 0) return std::nullopt;

  double shift = 0.0;
  const double denom = r[pick - 1] - 2.0 * r[pick] + r[pick + 1];
  if (denom < 0.0) shift = std::clamp(0.5 * (r[pick - 1] - r[pick + 1]) / denom, -0.5, 0.5);
  return sample_rate_hz / (static_cast<double>(pick) + shift);
}

std::vector<RawWordFeatures> extract_raw_word_features(const AudioClip& clip, const WordAlignment& align,
                                                       const PitchSettings& settings) {
  validate(clip);
  validate(align, clip.duration_s());
  double peak = 0.0;
  for (double v : clip.samples) peak = std::max(peak, std::abs(v));
  const double silence_rms = 1e-3 * peak;

  std::vector<RawWordFeatures> out;
  out.reserve(align.words.size());
  for (const auto& w : align.words) {
    const Segment seg = to_samples(w, clip);
    double energy = 0.0;
    for (std::size_t i = seg.begin; i < seg.end; ++i) energy += clip.samples[i] * clip.samples[i];
    RawWordFeatures f;
    f.rms = std::sqrt(energy / static_cast<double>(seg.end - seg.begin));
    f.f0_hz = segment_f0(clip, seg, silence_rms, settings);
    f.duration_s = w.end_s - w.start_s;
    out.push_back(f);
  }
  return out;
}

std::vector<double> z_scores(const std::vector<double>& values) {
  std::vector<double> z(values.size(), 0.0);
  if (values.size() < 2) return z;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo <= 1e-12 * std::max(std::abs(*hi), std::abs(*lo))) return z;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
  return z;
}

std::vector<WordFeatures> extract_word_features(const AudioClip& clip, const WordAlignment& align,
                                                const PitchSettings& settings) {
  const auto raw = extract_raw_word_features(clip, align, settings);
  std::vector<double> voiced;
  for (const auto& f : raw)
    if (f.f0_hz) voiced.push_back(*f.f0_hz);
  const double fallback = voiced.empty() ? 0.0 : median(voiced);

  std::vector<double> loud, pitch, dur;
  for (const auto& f : raw) {
    loud.push_back(f.rms);
    pitch.push_back(f.f0_hz.value_or(fallback));
    dur.push_back(f.duration_s);
  }
  const auto zl = z_scores(loud), zp = z_scores(pitch), zd = z_scores(dur);
  std::vector<WordFeatures> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = {zl[i], zp[i], zd[i]};
  return out;
}

std::vector<double> gap_durations(const WordAlignment& align) {
  if (align.words.size() < 2) throw Error("gap durations need at least two words");
  std::vector<double> gaps;
  gaps.reserve(align.words.size() - 1);
  for (std::size_t i = 0; i + 1 < align.words.size(); ++i)
    gaps.push_back(std::max(0.0, align.words[i + 1].start_s - align.words[i].end_s));
  return gaps;
}

}  // namespace contraprost::dsp
