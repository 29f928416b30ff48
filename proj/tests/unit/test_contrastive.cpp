#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "contraprost/contrastive.hpp"
#include "contraprost/error.hpp"
#include "support.hpp"

using namespace contraprost::contrastive;
using contraprost::Error;
using contraprost::bench::CaseLabel;

namespace {

LikelihoodRecord lik(double cond, double uncond, long n) {
  LikelihoodRecord r;
  r.example_id = "e";
  r.model_id = "m";
  r.cond_sum_logprob = cond;
  r.uncond_sum_logprob = uncond;
  r.token_count = n;
  r.uncond_token_count = n;
  return r;
}

AgreementSet values(double aa, double ba, double bb, double ab) { return {aa, ba, bb, ab}; }

}  // namespace

TEST(NormalizedLikelihood, Examples) {
  EXPECT_NEAR(normalized_likelihood(lik(-4.0, -8.0, 4)), std::exp(1.0), 1e-12);
  EXPECT_DOUBLE_EQ(normalized_likelihood(lik(-3.0, -3.0, 7), NormMode::Geometric), 1.0);
  EXPECT_DOUBLE_EQ(normalized_likelihood(lik(-3.0, -3.0, 7), NormMode::Literal), 1.0);
  EXPECT_NEAR(normalized_likelihood(lik(-1.3, -2.9, 1), NormMode::Literal),
              normalized_likelihood(lik(-1.3, -2.9, 1), NormMode::Geometric), 1e-15);
}

TEST(NormalizedLikelihood, Validation) {
  EXPECT_THROW(normalized_likelihood(lik(-1, -1, 0)), Error);
  EXPECT_THROW(normalized_likelihood(lik(0.5, -1, 3)), Error);
  auto r = lik(-1, -1, 3);
  r.uncond_token_count = 4;
  EXPECT_THROW(normalized_likelihood(r), Error);
}

TEST(Cascade, ToyWeightedMean) {
  // L(Y|Z) per hypothesis given as single-token sums so geometric mode leaves them as is.
  std::vector<CascadeHypothesis> h{{std::log(0.8), std::log(0.5), 1}, {std::log(0.2), std::log(0.1), 1}};
  EXPECT_NEAR(std::exp(cascade_conditional_log_likelihood(h, NormMode::Geometric)), 0.42, 1e-12);
}

TEST(Cascade, SingleHypothesisMatchesDirectRecord) {
  CascadeLikelihoodRecord c;
  c.example_id = "e";
  c.model_id = "m";
  c.hypotheses = {{-0.7, -6.0, 3}};
  c.uncond_sum_logprob = -9.0;
  c.uncond_token_count = 3;
  EXPECT_NEAR(log_cascade_likelihood(c), log_normalized_likelihood(lik(-6.0, -9.0, 3)), 1e-12);
  c.hypotheses.push_back(c.hypotheses[0]);
  EXPECT_NEAR(log_cascade_likelihood(c), log_normalized_likelihood(lik(-6.0, -9.0, 3)), 1e-12);
}

TEST(Cascade, HypothesisLimitAndLengthWarning) {
  CascadeLikelihoodRecord c;
  c.example_id = "e";
  c.model_id = "m";
  c.uncond_sum_logprob = -1;
  c.uncond_token_count = 2;
  EXPECT_THROW(validate(c), Error);
  c.hypotheses.assign(6, {-0.1, -1.0, 10});
  EXPECT_THROW(validate(c), Error);
  c.hypotheses.resize(5);
  EXPECT_NO_THROW(validate(c));
  EXPECT_FALSE(cascade_length_warning(c));
  c.hypotheses[1].mt_token_count = 13;
  EXPECT_TRUE(cascade_length_warning(c));
  c.hypotheses[1].mt_token_count = 12;
  EXPECT_FALSE(cascade_length_warning(c));
}

TEST(Quality, AgreementAndStandardMean) {
  QualityRecord q;
  q.qe_score = 0.988;
  EXPECT_EQ(quality_agreement(q), 0.988);
  q.qe_score = 1.2;
  EXPECT_THROW(quality_agreement(q), Error);

  std::vector<QualityRecord> rs(2);
  rs[0].qe_score = 0.8;
  rs[1].qe_score = 0.6;
  rs[1].audio_case = rs[1].ref_case = CaseLabel::B;
  EXPECT_NEAR(standard_quality(rs), 0.7, 1e-15);
  rs[1].ref_case = CaseLabel::A;
  EXPECT_THROW(standard_quality(rs), Error);
}

TEST(Conditions, HandExamples) {
  auto v = evaluate_example("e", "m", Metric::Likelihood, values(0.9, 0.4, 0.3, 0.6));
  EXPECT_NEAR(v.d1, 0.5, 1e-15);
  EXPECT_NEAR(v.d2, -0.3, 1e-15);
  EXPECT_TRUE(v.directional);
  EXPECT_FALSE(v.global);

  v = evaluate_example("e", "m", Metric::Likelihood, values(0.5, 0.5, 0.5, 0.5));
  EXPECT_FALSE(v.directional);
  EXPECT_FALSE(v.global);

  v = evaluate_example("e", "m", Metric::Quality, values(0.9, 0.1, 0.8, 0.2));
  EXPECT_TRUE(v.directional);
  EXPECT_TRUE(v.global);
}

TEST(Conditions, MissingValuesAreListed) {
  AgreementSet s;
  s.a_given_a = 0.3;
  s.b_given_b = 0.2;
  try {
    evaluate_example("ex7", "m", Metric::Likelihood, s);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("f(Y^b|X^a)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("f(Y^a|X^b)"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("f(Y^a|X^a)"), std::string::npos) << msg;
  }
}

TEST(Conditions, ScaleInvarianceAndMonotonicity) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
    const auto base = evaluate_example("e", "m", Metric::Quality, values(a, b, c, d));
    const double k = 0.1 + 10 * u(gen);
    const auto scaled = evaluate_example("e", "m", Metric::Quality, values(k * a, k * b, k * c, k * d));
    EXPECT_EQ(base.directional, scaled.directional);
    EXPECT_EQ(base.global, scaled.global);
    const auto bumped = evaluate_example("e", "m", Metric::Quality, values(a + u(gen), b, c, d));
    if (base.directional) EXPECT_TRUE(bumped.directional);
  }
}

TEST(Aggregate, CountsAndOrdering) {
  std::vector<ExampleVerdict> vs(3);
  vs[0] = {"a", "m", Metric::Likelihood, true, false, 0, 0};
  vs[1] = {"b", "m", Metric::Likelihood, false, false, 0, 0};
  vs[2] = {"c", "m", Metric::Likelihood, true, true, 0, 0};
  auto all = aggregate(vs, GroupBy::All);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_NEAR(all[0].directional_pct, 66.7, 0.05);
  EXPECT_NEAR(all[0].global_pct, 100.0 / 3.0, 1e-12);

  GroupIndex idx{{"a", {"Z", "z1"}}, {"b", {"A", "a1"}}, {"c", {"Z", "z2"}}};
  auto cats = aggregate(vs, GroupBy::Category, idx);
  ASSERT_EQ(cats.size(), 2u);
  EXPECT_EQ(cats[0].group, "A");
  EXPECT_EQ(cats[1].count, 2u);
  EXPECT_THROW(aggregate(std::vector<ExampleVerdict>{}, GroupBy::All), Error);

  std::reverse(vs.begin(), vs.end());
  auto again = aggregate(vs, GroupBy::Category, idx);
  EXPECT_EQ(again[1].directional_pct, cats[1].directional_pct);
}

TEST(ScoresFile, RoundTripAndUnknownKinds) {
  const auto dir = testing_support::fresh_dir("scores");
  ScoreSet s;
  s.likelihood.push_back(lik(-2, -3, 2));
  CascadeLikelihoodRecord c;
  c.example_id = "e";
  c.model_id = "casc";
  c.audio_case = CaseLabel::B;
  c.hypotheses = {{-0.1, -2, 2}, {-2.5, -3, 3}};
  c.uncond_sum_logprob = -4;
  c.uncond_token_count = 2;
  s.cascade.push_back(c);
  QualityRecord q;
  q.example_id = "e";
  q.model_id = "m";
  q.qe_score = 0.5;
  q.hypothesis_text = "Hallo";
  s.quality.push_back(q);
  save_scores(dir / "s.jsonl", s);
  auto back = load_scores(dir / "s.jsonl");
  ASSERT_EQ(back.likelihood.size(), 1u);
  ASSERT_EQ(back.cascade.size(), 1u);
  ASSERT_EQ(back.quality.size(), 1u);
  EXPECT_EQ(back.cascade[0].hypotheses.size(), 2u);
  EXPECT_EQ(back.cascade[0].audio_case, CaseLabel::B);
  EXPECT_EQ(back.quality[0].hypothesis_text, "Hallo");
  EXPECT_THROW(load_scores(dir / "s.jsonl", 1), Error);

  {
    std::ofstream out(dir / "extra.jsonl");
    out << R"({"kind":"quality","example_id":"e","audio_case":"A","ref_case":"A","model_id":"m","qe_score":0.1,"note":"x"})"
        << "\n";
  }
  EXPECT_EQ(load_scores(dir / "extra.jsonl").quality.size(), 1u);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << R"({"kind":"bleu","example_id":"e"})" << "\n";
  }
  EXPECT_THROW(load_scores(dir / "bad.jsonl"), Error);
}

TEST(Verdicts, RoundTrip) {
  const auto dir = testing_support::fresh_dir("verdicts");
  ExampleVerdict v{"e1", "m", Metric::Quality, true, false, 0.25, -0.125};
  contraprost::jsonl::write_lines(dir / "v.jsonl", {to_json(v)});
  const auto back = load_verdicts(dir / "v.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].example_id, "e1");
  EXPECT_EQ(back[0].metric, Metric::Quality);
  EXPECT_TRUE(back[0].directional);
  EXPECT_EQ(back[0].d2, -0.125);
}
