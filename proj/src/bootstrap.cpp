#include <algorithm>
#include <cmath>
#include <numeric>

#include "contraprost/error.hpp"
#include "contraprost/rng.hpp"
#include "contraprost/stats.hpp"

namespace contraprost::stats {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty data");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap_compare(const PairedIndicators& pi, const BootstrapSettings& settings) {
  const std::size_t n = pi.model_a_solved.size();
  if (n != pi.model_b_solved.size()) throw Error("bootstrap: indicator lists differ in length");
  if (n == 0) throw Error("bootstrap: no examples");
  if (!pi.example_ids.empty() && pi.example_ids.size() != n) throw Error("bootstrap: example_ids length mismatch");
  if (settings.resamples < 1) throw Error("bootstrap: resamples must be >= 1");
  if (!(settings.ci > 0.0 && settings.ci < 1.0)) throw Error("bootstrap: ci must be in (0,1)");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!pi.example_ids.empty())
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pi.example_ids[i] < pi.example_ids[j]; });

  // Per-example difference in {-1, 0, 1}; sums stay exact integers.
  std::vector<int> diff(n);
  long total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const int a = pi.model_a_solved[i], b = pi.model_b_solved[i];
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) throw Error("bootstrap: indicators must be 0 or 1");
    diff[k] = a - b;
    total += diff[k];
  }

  const SplitMix64 root(settings.seed);
  std::vector<double> deltas(settings.resamples);
  for (std::size_t r = 0; r < settings.resamples; ++r) {
    SplitMix64 rng = root.split(r);
    long sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += diff[rng.below(n)];
    deltas[r] = static_cast<double>(sum) / static_cast<double>(n);
  }
  std::sort(deltas.begin(), deltas.end());

  BootstrapResult out;
  out.delta = static_cast<double>(total) / static_cast<double>(n);
  const double alpha = 1.0 - settings.ci;
  out.ci_low = quantile_sorted(deltas, alpha / 2.0);
  out.ci_high = quantile_sorted(deltas, 1.0 - alpha / 2.0);
  out.significant = !(out.ci_low <= 0.0 && 0.0 <= out.ci_high);
  return out;
}

}  // namespace contraprost::stats
