#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contraprost/benchmark.hpp"
#include "contraprost/prosody_dsp.hpp"
#include "contraprost/rng.hpp"
#include "contraprost/stats.hpp"

// Shared helpers and reference implementations for the test binaries. The
// oracles are written differently from the library code on purpose.
namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("contraprost_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline fs::path fixture_dir() { return fs::path(CONTRAPROST_FIXTURE_DIR); }

// Top-down memoised Levenshtein distance.
inline std::size_t oracle_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size()) return static_cast<long>(b.size() - j);
    if (j == b.size()) return static_cast<long>(a.size() - i);
    long& m = memo[i][j];
    if (m >= 0) return m;
    if (a[i] == b[j]) return m = go(i + 1, j + 1);
    return m = 1 + std::min({go(i + 1, j + 1), go(i + 1, j), go(i, j + 1)});
  };
  return static_cast<std::size_t>(go(0, 0));
}

// Resampler written against the documented stream layout: resample r uses
// SplitMix64(seed).split(r) and draws n indices into the id-sorted examples.
inline contraprost::stats::BootstrapResult oracle_bootstrap(std::vector<int> a, std::vector<int> b,
                                                           std::size_t resamples, double ci, std::uint64_t seed) {
  const std::size_t n = a.size();
  std::vector<double> means;
  const contraprost::stats::SplitMix64 root(seed);
  for (std::size_t r = 0; r < resamples; ++r) {
    auto g = root.split(r);
    double sa = 0, sb = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = g.below(n);
      sa += a[i];
      sb += b[i];
    }
    means.push_back(sa / n - sb / n);
  }
  std::sort(means.begin(), means.end());
  auto q = [&](double p) {
    const double h = (means.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= means.size()) return means.back();
    return means[lo] + (h - lo) * (means[lo + 1] - means[lo]);
  };
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  contraprost::stats::BootstrapResult out;
  out.delta = ma / n - mb / n;
  out.ci_low = q((1 - ci) / 2);
  out.ci_high = q(1 - (1 - ci) / 2);
  out.significant = out.ci_low > 0 || out.ci_high < 0;
  return out;
}

// Multivariate normal log-density with the full covariance
// V = sigma_e2 I + sigma_u2 Z Z'.
inline double oracle_dense_loglik(const contraprost::stats::MixedModelData& d, const Eigen::VectorXd& beta,
                                  double sigma_u2, double sigma_e2) {
  const auto n = d.y.size();
  Eigen::MatrixXd v = sigma_e2 * Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (d.group[i] == d.group[j]) v(i, j) += sigma_u2;
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  const Eigen::VectorXd r = d.y - d.x * beta;
  const Eigen::VectorXd w = llt.matrixL().solve(r);
  double logdet = 0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2 * std::log(llt.matrixL()(i, i));
  return -0.5 * (n * std::log(2 * std::numbers::pi) + logdet + w.squaredNorm());
}

inline Eigen::VectorXd oracle_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return x.householderQr().solve(y);
}

inline contraprost::dsp::AudioClip sine(double hz, double seconds, int sr, double amp = 0.5) {
  contraprost::dsp::AudioClip c;
  c.sample_rate_hz = sr;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.samples[i] = amp * std::sin(2 * std::numbers::pi * hz * i / sr);
  return c;
}

inline contraprost::bench::ProsodicCase make_case(contraprost::bench::CaseLabel label, std::string prosody,
                                                  std::string de, std::string plain_de) {
  contraprost::bench::ProsodicCase c;
  c.label = label;
  c.prosody_text = std::move(prosody);
  c.meaning = "meaning " + std::string(contraprost::bench::to_string(label));
  c.audio_ref = std::string("audio/") + (label == contraprost::bench::CaseLabel::A ? "a" : "b") + ".wav";
  c.translations["De"] = std::move(de);
  c.plain_translation["De"] = std::move(plain_de);
  return c;
}

inline contraprost::bench::ContrastiveExample make_example(const std::string& id,
                                                           contraprost::bench::Category cat,
                                                           const std::string& sub) {
  using contraprost::bench::CaseLabel;
  contraprost::bench::ContrastiveExample ex;
  ex.id = id;
  ex.category = cat;
  ex.subcategory = sub;
  ex.text_domain = "news";
  ex.sentence = "These are German teachers.";
  ex.self_rating = 8;
  ex.case_a = make_case(CaseLabel::A, "These are *GERMAN* teachers.", "Dies sind Deutschlehrer.",
                        "Dies sind deutsche Lehrer.");
  ex.case_b = make_case(CaseLabel::B, "These are German *TEACHERS*.", "Dies sind deutsche Lehrer.",
                        "Dies sind deutsche Lehrer.");
  return ex;
}

}  // namespace testing_support
