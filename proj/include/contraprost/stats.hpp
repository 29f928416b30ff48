#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace contraprost::stats {

// ---------------------------------------------------------------------------
// Paired bootstrap

struct PairedIndicators {
  std::vector<int> model_a_solved;  // 0/1 per example
  std::vector<int> model_b_solved;
  // Optional. When present, examples are resampled in id order so the
  // result does not depend on the input row order.
  std::vector<std::string> example_ids;
};

struct BootstrapSettings {
  std::size_t resamples = 10000;
  double ci = 0.95;
  std::uint64_t seed = 0;
};

struct BootstrapResult {
  double delta = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool significant = false;
};

// Percentile interval of mean(a) - mean(b) over resampled example indices.
// Resample r draws from SplitMix64(seed).split(r).
BootstrapResult bootstrap_compare(const PairedIndicators& pi, const BootstrapSettings& settings = {});

// Linear-interpolation quantile of sorted data, q in [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

// ---------------------------------------------------------------------------
// Rank correlation

// 1-based ranks, ties get their average rank.
std::vector<double> average_ranks(std::span<const double> values);
double spearman(std::span<const double> a, std::span<const double> b);

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rho;
};

// Pairwise Spearman correlation; throws naming any constant metric.
CorrelationMatrix spearman_matrix(const std::map<std::string, std::vector<double>>& metrics);

// ---------------------------------------------------------------------------
// Random-intercept linear mixed model

struct RegressionRow {
  std::string model_family;
  double score = 0.0;
  double log_size = 0.0;
  int is_aed = 0;
  int is_ctc = 0;
  std::optional<std::string> lang;
};

enum class Predictors { TypeAndSize, Language };

struct RegressionFit {
  std::vector<std::string> names;
  std::vector<double> betas;
  std::vector<double> std_errors;
  std::vector<std::pair<double, double>> ci95;
  double sigma_u2 = 0.0;
  double sigma_e2 = 0.0;
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_groups = 0;
  std::vector<std::string> warnings;
};

struct MixedModelData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::size_t> group;  // group index per row, 0..n_groups-1
  std::vector<std::string> names;
};

// Builds the fixed-effect design for `predictors`. TypeAndSize uses
// [1, log_size, aed, ctc]; Language uses an intercept plus one dummy per
// language other than the lexicographically first.
MixedModelData build_design(std::span<const RegressionRow> rows, Predictors predictors);

// Maximum-likelihood fit of y = X b + u_group + e. The variance ratio
// sigma_u2/sigma_e2 is profiled: for each ratio b comes from a GLS solve,
// and the ratio is located by golden-section search on its logarithm.
RegressionFit fit_random_intercept(const MixedModelData& data);

RegressionFit fit_mixed_effects(std::span<const RegressionRow> rows, Predictors predictors);

// Log-likelihood of the model at arbitrary parameters.
double random_intercept_loglik(const MixedModelData& data, const Eigen::VectorXd& beta, double sigma_u2,
                               double sigma_e2);

// ---------------------------------------------------------------------------
// results.csv

struct ResultRow {
  std::string model_id;
  std::string model_family;
  std::string model_type;  // E2E, AED or CTC (cascade ASR flavour)
  double params_b = 0.0;   // parameters, billions
  std::string lang;
  std::string metric;
  double value = 0.0;
};

std::vector<ResultRow> load_results_csv(const std::filesystem::path& path);

// Rows of one metric as regression rows; log_size = log_base(params_b * 1e9).
std::vector<RegressionRow> regression_rows(std::span<const ResultRow> results, const std::string& metric,
                                           double log_base);

}  // namespace contraprost::stats
