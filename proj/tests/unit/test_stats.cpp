#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "contraprost/error.hpp"
#include "contraprost/rng.hpp"
#include "contraprost/stats.hpp"
#include "support.hpp"

using namespace contraprost::stats;
using contraprost::Error;

TEST(Rng, KnownSplitMix64Stream) {
  // Reference outputs of SplitMix64 seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(g.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(g.next(), 0x06C45D188009454FULL);
}

TEST(Rng, BelowStaysInRange) {
  SplitMix64 g(7);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[g.below(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  const SplitMix64 root(3);
  EXPECT_NE(root.split(0).next(), root.split(1).next());
  EXPECT_EQ(root.split(5).next(), root.split(5).next());
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_EQ(quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
}

TEST(Bootstrap, TrivialCases) {
  PairedIndicators same{{1, 0, 1, 1, 0}, {1, 0, 1, 1, 0}, {}};
  auto r = bootstrap_compare(same, {500, 0.95, 1});
  EXPECT_EQ(r.delta, 0.0);
  EXPECT_EQ(r.ci_low, 0.0);
  EXPECT_EQ(r.ci_high, 0.0);
  EXPECT_FALSE(r.significant);

  for (std::size_t n : {1u, 3u, 50u}) {
    PairedIndicators dom{std::vector<int>(n, 1), std::vector<int>(n, 0), {}};
    r = bootstrap_compare(dom, {200, 0.95, 2});
    EXPECT_EQ(r.delta, 1.0);
    EXPECT_EQ(r.ci_low, 1.0);
    EXPECT_EQ(r.ci_high, 1.0);
    EXPECT_TRUE(r.significant);
  }
  EXPECT_THROW(bootstrap_compare({{1, 0}, {1}, {}}), Error);
}

TEST(Bootstrap, MatchesOracleResampler) {
  PairedIndicators pi{{1, 1, 0, 1}, {0, 1, 0, 0}, {}};
  for (std::uint64_t seed : {0ULL, 17ULL, 123456789ULL}) {
    const auto r = bootstrap_compare(pi, {10000, 0.95, seed});
    const auto o = testing_support::oracle_bootstrap(pi.model_a_solved, pi.model_b_solved, 10000, 0.95, seed);
    EXPECT_EQ(r.delta, 0.5);
    EXPECT_NEAR(r.ci_low, o.ci_low, 1e-12);
    EXPECT_NEAR(r.ci_high, o.ci_high, 1e-12);
    EXPECT_EQ(r.significant, o.significant);
  }
}

TEST(Bootstrap, RowOrderIndependentWithIds) {
  PairedIndicators pi{{1, 0, 1, 1, 0, 0}, {0, 0, 1, 0, 1, 0}, {"f", "b", "a", "e", "c", "d"}};
  const auto base = bootstrap_compare(pi, {2000, 0.9, 5});
  std::vector<std::size_t> perm{3, 5, 0, 2, 1, 4};
  PairedIndicators shuffled;
  for (auto i : perm) {
    shuffled.model_a_solved.push_back(pi.model_a_solved[i]);
    shuffled.model_b_solved.push_back(pi.model_b_solved[i]);
    shuffled.example_ids.push_back(pi.example_ids[i]);
  }
  const auto again = bootstrap_compare(shuffled, {2000, 0.9, 5});
  EXPECT_EQ(base.ci_low, again.ci_low);
  EXPECT_EQ(base.ci_high, again.ci_high);
}

TEST(Bootstrap, DeltaInsideInterval) {
  std::mt19937 gen(8);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + gen() % 60;
    PairedIndicators pi;
    for (std::size_t i = 0; i < n; ++i) {
      pi.model_a_solved.push_back(gen() % 2);
      pi.model_b_solved.push_back(gen() % 3 == 0);
    }
    const auto r = bootstrap_compare(pi, {1000, 0.95, static_cast<std::uint64_t>(t)});
    EXPECT_LE(r.ci_low, r.delta);
    EXPECT_LE(r.delta, r.ci_high);
  }
}

TEST(Spearman, Examples) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> sq, neg;
  for (double v : x) {
    sq.push_back(v * v);
    neg.push_back(-v);
  }
  EXPECT_NEAR(spearman(x, sq), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, neg), -1.0, 1e-15);
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-15);
}

TEST(Spearman, AverageRanks) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Spearman, MatrixPropertiesAndErrors) {
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> u(0.1, 5);
  std::map<std::string, std::vector<double>> m;
  for (const char* name : {"bleu", "comet", "cl", "cq"})
    for (int i = 0; i < 93; ++i) m[name].push_back(std::round(u(gen) * 4) / 4);
  const auto cm = spearman_matrix(m);
  ASSERT_EQ(cm.names.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(cm.rho[i][i], 1.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(cm.rho[i][j], cm.rho[j][i]);
  }
  auto transformed = m;
  for (auto& v : transformed["comet"]) v = std::exp(3 * v) - 7;
  const auto cm2 = spearman_matrix(transformed);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(cm.rho[i][j], cm2.rho[i][j], 1e-12);

  m["flat"] = std::vector<double>(93, 1.0);
  try {
    spearman_matrix(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
}

namespace {

std::vector<RegressionRow> synthetic_rows(double noise, std::uint64_t seed, double family_sd = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> eps(0.0, noise), fam(0.0, family_sd > 0 ? family_sd : 1.0);
  std::vector<RegressionRow> rows;
  for (int f = 0; f < 8; ++f) {
    const double u = family_sd > 0 ? fam(gen) : 0.0;
    for (int k = 0; k < 5; ++k) {
      RegressionRow r;
      r.model_family = "fam" + std::to_string(f);
      r.log_size = 18.0 + 0.7 * k + 0.3 * f;
      const int type = (f + k) % 3;
      r.is_aed = type == 1;
      r.is_ctc = type == 2;
      r.score = 1.0 + 0.5 * r.log_size - 1.0 * r.is_aed - 2.0 * r.is_ctc + u + eps(gen);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace

TEST(MixedEffects, RecoversKnownBetas) {
  const auto rows = synthetic_rows(1e-5, 4);
  const auto fit = fit_mixed_effects(rows, Predictors::TypeAndSize);
  const std::vector<double> truth{1.0, 0.5, -1.0, -2.0};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fit.betas[k], truth[k], 1e-3) << fit.names[k];
  EXPECT_LT(fit.sigma_u2, 1e-8);
  const auto d = build_design(rows, Predictors::TypeAndSize);
  const Eigen::VectorXd ols = testing_support::oracle_ols(d.x, d.y);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fit.betas[k], ols[k], 1e-6);
}

TEST(MixedEffects, LogLikelihoodMatchesDenseOracle) {
  const auto rows = synthetic_rows(0.3, 5, 0.8);
  const auto d = build_design(rows, Predictors::TypeAndSize);
  const auto fit = fit_random_intercept(d);
  EXPECT_GT(fit.sigma_u2, 0.0);
  Eigen::VectorXd beta(4);
  for (int k = 0; k < 4; ++k) beta[k] = fit.betas[k];
  EXPECT_NEAR(fit.log_likelihood, testing_support::oracle_dense_loglik(d, beta, fit.sigma_u2, fit.sigma_e2), 1e-8);
  EXPECT_NEAR(random_intercept_loglik(d, beta, 0.4, 0.2), testing_support::oracle_dense_loglik(d, beta, 0.4, 0.2),
              1e-9);
  // Never worse than the constrained OLS solution.
  const Eigen::VectorXd ols = testing_support::oracle_ols(d.x, d.y);
  const double rss = (d.y - d.x * ols).squaredNorm() / d.y.size();
  EXPECT_GE(fit.log_likelihood, random_intercept_loglik(d, ols, 0.0, rss) - 1e-9);
  for (int k = 0; k < 4; ++k) {
    EXPECT_GT(fit.std_errors[k], 0.0);
    EXPECT_NEAR(fit.ci95[k].second - fit.ci95[k].first, 2 * 1.959963984540054 * fit.std_errors[k], 1e-12);
  }
}

TEST(MixedEffects, PermutationInvariant) {
  auto rows = synthetic_rows(0.2, 6, 0.5);
  const auto a = fit_mixed_effects(rows, Predictors::TypeAndSize);
  std::mt19937 gen(1);
  std::shuffle(rows.begin(), rows.end(), gen);
  const auto b = fit_mixed_effects(rows, Predictors::TypeAndSize);
  EXPECT_EQ(a.betas, b.betas);
  EXPECT_EQ(a.sigma_u2, b.sigma_u2);
}

TEST(MixedEffects, DegenerateInputs) {
  auto rows = synthetic_rows(0.1, 7);
  for (auto& r : rows) r.model_family = "one";
  const auto fit = fit_mixed_effects(rows, Predictors::TypeAndSize);
  EXPECT_EQ(fit.sigma_u2, 0.0);
  ASSERT_EQ(fit.warnings.size(), 1u);

  auto collinear = synthetic_rows(0.1, 7);
  for (auto& r : collinear) r.is_aed = r.is_ctc = 0;
  EXPECT_THROW(fit_mixed_effects(collinear, Predictors::TypeAndSize), Error);

  auto both = synthetic_rows(0.1, 7);
  both[0].is_aed = both[0].is_ctc = 1;
  EXPECT_THROW(fit_mixed_effects(both, Predictors::TypeAndSize), Error);
}

TEST(MixedEffects, LanguageDesign) {
  std::vector<RegressionRow> rows;
  std::mt19937_64 gen(3);
  std::normal_distribution<double> eps(0, 0.05);
  for (int f = 0; f < 6; ++f)
    for (const char* lang : {"De", "Es", "Ja"}) {
      RegressionRow r;
      r.model_family = "f" + std::to_string(f);
      r.lang = lang;
      r.score = 10.0 + (std::string(lang) == "Es" ? 2.0 : 0.0) + (std::string(lang) == "Ja" ? -3.0 : 0.0) +
                0.1 * f + eps(gen);
      rows.push_back(r);
    }
  const auto fit = fit_mixed_effects(rows, Predictors::Language);
  ASSERT_EQ(fit.names, (std::vector<std::string>{"intercept", "lang[Es]", "lang[Ja]"}));
  EXPECT_NEAR(fit.betas[1], 2.0, 0.1);
  EXPECT_NEAR(fit.betas[2], -3.0, 0.1);
  rows[0].lang.reset();
  EXPECT_THROW(fit_mixed_effects(rows, Predictors::Language), Error);
}

TEST(ResultsCsv, LoadAndRegressionRows) {
  const auto dir = testing_support::fresh_dir("csv");
  {
    std::ofstream out(dir / "r.csv");
    out << "model_id,model_family,model_type,params_b,lang,metric,value\n";
    out << "m1,fam,E2E,1.5,De,contrastive_quality_global,0.25\n";
    out << "\"m,2\",fam2,CTC,0.3,Es,contrastive_quality_global,0.5\n";
    out << "m1,fam,E2E,1.5,De,bleu,30\n";
  }
  const auto rows = load_results_csv(dir / "r.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].model_id, "m,2");
  const auto reg = regression_rows(rows, "contrastive_quality_global", std::exp(1.0));
  ASSERT_EQ(reg.size(), 2u);
  EXPECT_NEAR(reg[0].log_size, std::log(1.5e9), 1e-9);
  EXPECT_EQ(reg[1].is_ctc, 1);
  EXPECT_EQ(reg[1].lang, "Es");
  const auto reg10 = regression_rows(rows, "contrastive_quality_global", 10.0);
  EXPECT_NEAR(reg10[0].log_size, std::log10(1.5e9), 1e-9);

  {
    std::ofstream out(dir / "bad.csv");
    out << "model,family\n";
  }
  EXPECT_THROW(load_results_csv(dir / "bad.csv"), Error);
}
