#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "contraprost/error.hpp"
#include "contraprost/stats.hpp"

namespace contraprost::stats {

namespace {

constexpr double kZ975 = 1.959963984540054;
constexpr double kMinLogRatio = -20.0;
constexpr double kMaxLogRatio = 12.0;
constexpr int kScanPoints = 65;

struct GroupSums {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xt1;
  std::size_t n = 0;
};

struct Profile {
  double ratio = 0.0;  // sigma_u2 / sigma_e2
  Eigen::VectorXd beta;
  Eigen::MatrixXd a;   // sum_j X_j' H_j^-1 X_j
  double sigma_e2 = 0.0;
  double loglik = -std::numeric_limits<double>::infinity();
};

class ProfileLikelihood {
 public:
  explicit ProfileLikelihood(const MixedModelData& d) : d_(d) {
    const auto p = d.x.cols();
    std::size_t groups = 0;
    for (auto g : d.group) groups = std::max(groups, g + 1);
    sums_.assign(groups, GroupSums{Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Zero(p), 0});
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
      auto& s = sums_[d.group[static_cast<std::size_t>(i)]];
      const Eigen::VectorXd row = d.x.row(i).transpose();
      s.xtx += row * row.transpose();
      s.xt1 += row;
      ++s.n;
    }
  }

  Profile at(double ratio) const {
    const auto p = d_.x.cols();
    Profile out;
    out.ratio = ratio;
    out.a = Eigen::MatrixXd::Zero(p, p);
    std::vector<double> ysum(sums_.size(), 0.0);
    for (Eigen::Index i = 0; i < d_.x.rows(); ++i) ysum[d_.group[static_cast<std::size_t>(i)]] += d_.y[i];
    Eigen::VectorXd b = d_.x.transpose() * d_.y;
    double logdet = 0.0;
    for (std::size_t j = 0; j < sums_.size(); ++j) {
      const auto& s = sums_[j];
      const double c = shrink(ratio, s.n);
      out.a += s.xtx - c * s.xt1 * s.xt1.transpose();
      b -= c * s.xt1 * ysum[j];
      logdet += std::log1p(static_cast<double>(s.n) * ratio);
    }
    out.beta = out.a.ldlt().solve(b);
    const Eigen::VectorXd r = d_.y - d_.x * out.beta;
    std::vector<double> rsum(sums_.size(), 0.0);
    for (Eigen::Index i = 0; i < r.size(); ++i) rsum[d_.group[static_cast<std::size_t>(i)]] += r[i];
    double rss = r.squaredNorm();
    for (std::size_t j = 0; j < sums_.size(); ++j) rss -= shrink(ratio, sums_[j].n) * rsum[j] * rsum[j];
    const double n = static_cast<double>(d_.y.size());
    out.sigma_e2 = rss / n;
    if (out.sigma_e2 > 0.0)
      out.loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * out.sigma_e2) + 1.0) - 0.5 * logdet;
    return out;
  }

  static double shrink(double ratio, std::size_t n) { return ratio / (1.0 + static_cast<double>(n) * ratio); }

 private:
  const MixedModelData& d_;
  std::vector<GroupSums> sums_;
};

Profile maximize(const ProfileLikelihood& prof) {
  // Coarse scan on log-ratio to bracket the optimum, then golden section.
  std::vector<double> ts(kScanPoints);
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScanPoints; ++k) {
    ts[k] = kMinLogRatio + (kMaxLogRatio - kMinLogRatio) * k / (kScanPoints - 1);
    const double ll = prof.at(std::exp(ts[k])).loglik;
    if (ll > best_ll) {
      best_ll = ll;
      best = static_cast<std::size_t>(k);
    }
  }
  double lo = ts[best == 0 ? 0 : best - 1];
  double hi = ts[std::min<std::size_t>(best + 1, kScanPoints - 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = prof.at(std::exp(x1)).loglik, f2 = prof.at(std::exp(x2)).loglik;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = prof.at(std::exp(x2)).loglik;
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = prof.at(std::exp(x1)).loglik;
    }
  }
  Profile interior = prof.at(std::exp(0.5 * (lo + hi)));
  // The boundary sigma_u2 = 0 is not reachable on the log scale.
  Profile boundary = prof.at(0.0);
  return boundary.loglik >= interior.loglik ? boundary : interior;
}

RegressionFit to_fit(const MixedModelData& d, const Profile& p, double y_shift, std::size_t groups) {
  RegressionFit fit;
  fit.names = d.names;
  fit.n_obs = static_cast<std::size_t>(d.y.size());
  fit.n_groups = groups;
  fit.sigma_e2 = p.sigma_e2;
  fit.sigma_u2 = p.ratio * p.sigma_e2;
  fit.log_likelihood = p.loglik;
  const Eigen::MatrixXd cov = p.sigma_e2 * p.a.ldlt().solve(Eigen::MatrixXd::Identity(p.a.rows(), p.a.cols()));
  for (Eigen::Index k = 0; k < p.beta.size(); ++k) {
    double b = p.beta[k];
    if (k == 0) b += y_shift;
    const double se = std::sqrt(std::max(0.0, cov(k, k)));
    fit.betas.push_back(b);
    fit.std_errors.push_back(se);
    fit.ci95.emplace_back(b - kZ975 * se, b + kZ975 * se);
  }
  return fit;
}

}  // namespace

MixedModelData build_design(std::span<const RegressionRow> input, Predictors predictors) {
  if (input.empty()) throw Error("mixed effects: no rows");
  std::vector<RegressionRow> rows(input.begin(), input.end());
  // Canonical row order makes the fit independent of input order.
  std::stable_sort(rows.begin(), rows.end(), [](const RegressionRow& a, const RegressionRow& b) {
    return std::tie(a.model_family, a.lang, a.log_size, a.is_aed, a.is_ctc, a.score) <
           std::tie(b.model_family, b.lang, b.log_size, b.is_aed, b.is_ctc, b.score);
  });

  MixedModelData d;
  std::map<std::string, std::size_t> family_index;
  for (const auto& r : rows) family_index.emplace(r.model_family, family_index.size());

  std::vector<std::string> langs;
  if (predictors == Predictors::TypeAndSize) {
    d.names = {"intercept", "log_size", "aed", "ctc"};
  } else {
    std::set<std::string> seen;
    for (const auto& r : rows) {
      if (!r.lang) throw Error("mixed effects: language predictor needs a lang on every row");
      seen.insert(*r.lang);
    }
    langs.assign(seen.begin(), seen.end());
    d.names = {"intercept"};
    for (std::size_t k = 1; k < langs.size(); ++k) d.names.push_back("lang[" + langs[k] + "]");
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(d.names.size());
  d.x = Eigen::MatrixXd::Zero(n, p);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (r.is_aed && r.is_ctc) throw Error("mixed effects: a row cannot be both AED and CTC");
    d.x(i, 0) = 1.0;
    if (predictors == Predictors::TypeAndSize) {
      d.x(i, 1) = r.log_size;
      d.x(i, 2) = r.is_aed;
      d.x(i, 3) = r.is_ctc;
    } else {
      for (std::size_t k = 1; k < langs.size(); ++k)
        if (*r.lang == langs[k]) d.x(i, static_cast<Eigen::Index>(k)) = 1.0;
    }
    d.y[i] = r.score;
    d.group.push_back(family_index.at(r.model_family));
  }
  return d;
}

RegressionFit fit_random_intercept(const MixedModelData& data) {
  const auto n = data.x.rows();
  const auto p = data.x.cols();
  if (n == 0 || data.y.size() != n || static_cast<Eigen::Index>(data.group.size()) != n)
    throw Error("mixed effects: inconsistent data dimensions");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.x);
  if (qr.rank() < p) throw Error("mixed effects: rank-deficient design matrix");
  if (n <= p) throw Error("mixed effects: need more observations than fixed effects");

  std::set<std::size_t> groups(data.group.begin(), data.group.end());
  // Fit on y - y[0]; this keeps slopes bit-identical under a shift of y.
  MixedModelData centered = data;
  const double shift = data.y[0];
  centered.y.array() -= shift;
  ProfileLikelihood prof(centered);

  Profile best;
  std::vector<std::string> warnings;
  if (groups.size() < 2) {
    warnings.emplace_back("single model family: fitted ordinary least squares with sigma_u2 = 0");
    best = prof.at(0.0);
  } else {
    best = maximize(prof);
  }
  if (!(best.sigma_e2 > 0.0)) throw Error("mixed effects: residual variance is zero (perfect fit)");
  RegressionFit fit = to_fit(centered, best, shift, groups.size());
  fit.warnings = std::move(warnings);
  return fit;
}

RegressionFit fit_mixed_effects(std::span<const RegressionRow> rows, Predictors predictors) {
  return fit_random_intercept(build_design(rows, predictors));
}

double random_intercept_loglik(const MixedModelData& data, const Eigen::VectorXd& beta, double sigma_u2,
                               double sigma_e2) {
  if (!(sigma_e2 > 0.0) || sigma_u2 < 0.0) throw Error("loglik: invalid variance components");
  const double ratio = sigma_u2 / sigma_e2;
  const Eigen::VectorXd r = data.y - data.x * beta;
  std::map<std::size_t, std::pair<std::size_t, double>> per_group;  // n_j, sum of residuals
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    auto& g = per_group[data.group[static_cast<std::size_t>(i)]];
    ++g.first;
    g.second += r[i];
  }
  double quad = r.squaredNorm();
  double logdet = 0.0;
  for (const auto& [id, g] : per_group) {
    quad -= ProfileLikelihood::shrink(ratio, g.first) * g.second * g.second;
    logdet += std::log1p(static_cast<double>(g.first) * ratio);
  }
  const double n = static_cast<double>(r.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma_e2) + logdet + quad / sigma_e2);
}

}  // namespace contraprost::stats
