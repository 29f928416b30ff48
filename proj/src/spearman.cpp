#include <algorithm>
#include <cmath>
#include <numeric>

#include "contraprost/error.hpp"
#include "contraprost/stats.hpp"

namespace contraprost::stats {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("spearman: length mismatch");
  if (a.size() < 2) throw Error("spearman: need at least two observations");
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw Error("spearman: constant input");
  return sab / std::sqrt(saa * sbb);
}

CorrelationMatrix spearman_matrix(const std::map<std::string, std::vector<double>>& metrics) {
  if (metrics.empty()) throw Error("spearman_matrix: no metrics");
  const std::size_t len = metrics.begin()->second.size();
  if (len < 2) throw Error("spearman_matrix: need at least two observations");
  for (const auto& [name, values] : metrics) {
    if (values.size() != len) throw Error("spearman_matrix: metric '" + name + "' has a different length");
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
      throw Error("spearman_matrix: metric '" + name + "' is constant; correlation undefined");
  }
  CorrelationMatrix m;
  for (const auto& [name, values] : metrics) m.names.push_back(name);
  const std::size_t k = m.names.size();
  m.rho.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = spearman(metrics.at(m.names[i]), metrics.at(m.names[j]));
      m.rho[i][j] = m.rho[j][i] = r;
    }
  }
  return m;
}

}  // namespace contraprost::stats
