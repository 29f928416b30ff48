#include <algorithm>
#include <map>
#include <set>

#include "contraprost/error.hpp"
#include "contraprost/pipeline.hpp"
#include "contraprost/stats.hpp"
#include "pipeline_internal.hpp"

namespace contraprost::pipeline {

namespace {

using jsonl::Json;

Json fit_json(const stats::RegressionFit& f) {
  Json j;
  j["n_obs"] = f.n_obs;
  j["n_groups"] = f.n_groups;
  j["coefficients"] = Json::array();
  for (std::size_t i = 0; i < f.names.size(); ++i)
    j["coefficients"].push_back({{"name", f.names[i]},
                                 {"estimate", f.betas[i]},
                                 {"std_error", f.std_errors[i]},
                                 {"ci95_low", f.ci95[i].first},
                                 {"ci95_high", f.ci95[i].second}});
  j["sigma_u2"] = f.sigma_u2;
  j["sigma_e2"] = f.sigma_e2;
  j["log_likelihood"] = f.log_likelihood;
  j["warnings"] = f.warnings;
  return j;
}

void fit_rows(const std::string& label, const std::vector<stats::RegressionRow>& rows, stats::Predictors p,
              Json& sink, std::vector<std::vector<std::string>>& table, CommandResult& result) {
  try {
    const auto fit = stats::fit_mixed_effects(rows, p);
    sink = fit_json(fit);
    for (std::size_t i = 0; i < fit.names.size(); ++i)
      table.push_back({label, fit.names[i], detail::fixed(fit.betas[i], 4), detail::fixed(fit.std_errors[i], 4),
                       detail::fixed(fit.ci95[i].first, 4), detail::fixed(fit.ci95[i].second, 4)});
    for (const auto& w : fit.warnings) result.messages.push_back("warning: " + label + ": " + w);
  } catch (const Error& e) {
    sink = Json{{"error", e.what()}};
    result.messages.push_back("regression " + label + " failed: " + e.what());
    result.exit_code = kExitPartial;
  }
}

Json regressions(const RunConfig& cfg, const std::vector<stats::ResultRow>& results, std::string& text,
                 CommandResult& result) {
  const auto rows = stats::regression_rows(results, cfg.regression_metric, cfg.log_base);
  if (rows.empty()) throw Error("results contain no rows for metric '" + cfg.regression_metric + "'");
  Json out;
  out["metric"] = cfg.regression_metric;
  out["method"] = "maximum likelihood, random intercept per model family, Wald intervals";
  out["log_base"] = cfg.log_base;
  std::vector<std::vector<std::string>> table;

  std::map<std::string, std::vector<stats::RegressionRow>> by_lang;
  for (const auto& r : rows) by_lang[r.lang.value_or("")].push_back(r);
  out["type_and_size"] = Json::object();
  for (const auto& [lang, subset] : by_lang) {
    Json sink;
    fit_rows(lang.empty() ? "all" : lang, subset, stats::Predictors::TypeAndSize, sink, table, result);
    out["type_and_size"][lang.empty() ? "all" : lang] = sink;
  }
  if (by_lang.size() > 1) {
    Json sink;
    fit_rows("pooled", rows, stats::Predictors::Language, sink, table, result);
    out["language"] = sink;
  }
  text += "Mixed-effects regression on " + cfg.regression_metric + "\n";
  text += format_table({"Fit", "Term", "Estimate", "SE", "CI low", "CI high"}, table) + "\n";
  return out;
}

Json correlations(const std::vector<stats::ResultRow>& results, std::string& text, CommandResult& result) {
  // Observations are (model, language) pairs that carry every metric.
  std::set<std::string> metric_names;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> obs;
  for (const auto& r : results) {
    metric_names.insert(r.metric);
    if (!obs[{r.model_id, r.lang}].emplace(r.metric, r.value).second)
      throw Error("results.csv repeats metric " + r.metric + " for model " + r.model_id + " / " + r.lang);
  }
  std::map<std::string, std::vector<double>> columns;
  std::size_t complete = 0;
  for (const auto& [key, values] : obs) {
    if (values.size() != metric_names.size()) continue;
    ++complete;
    for (const auto& [m, v] : values) columns[m].push_back(v);
  }
  Json out;
  out["observations"] = complete;
  if (metric_names.size() < 2 || complete < 2) {
    out["error"] = "need at least two metrics observed on at least two (model, language) pairs";
    result.messages.push_back("warning: correlation matrix skipped");
    return out;
  }
  try {
    const auto cm = stats::spearman_matrix(columns);
    out["metrics"] = cm.names;
    out["rho"] = cm.rho;
    std::vector<std::string> header{"Spearman"};
    header.insert(header.end(), cm.names.begin(), cm.names.end());
    std::vector<std::vector<std::string>> table;
    for (std::size_t i = 0; i < cm.names.size(); ++i) {
      std::vector<std::string> row{cm.names[i]};
      for (double v : cm.rho[i]) row.push_back(detail::fixed(v, 3));
      table.push_back(row);
    }
    text += "Rank correlation over " + std::to_string(complete) + " observations\n" + format_table(header, table) +
            "\n";
  } catch (const Error& e) {
    out["error"] = e.what();
    result.messages.push_back(std::string("correlation matrix failed: ") + e.what());
    result.exit_code = kExitPartial;
  }
  return out;
}

Json bootstraps(const RunConfig& cfg, const std::vector<contrastive::ExampleVerdict>& verdicts,
                const contrastive::GroupIndex& index, std::string& text) {
  // metric -> model -> example -> verdict
  std::map<std::string, std::map<std::string, std::map<std::string, const contrastive::ExampleVerdict*>>> table;
  for (const auto& v : verdicts) {
    auto& slot = table[std::string(contrastive::to_string(v.metric))][v.model_id][v.example_id];
    if (slot) throw Error("verdicts repeat example " + v.example_id + " for model " + v.model_id);
    slot = &v;
  }
  Json rows = Json::array();
  std::vector<std::vector<std::string>> lines;
  for (const auto& [metric, models] : table) {
    for (auto a = models.begin(); a != models.end(); ++a) {
      for (auto b = std::next(a); b != models.end(); ++b) {
        for (const char* condition : {"directional", "global"}) {
          const bool global = std::string(condition) == "global";
          std::map<std::string, stats::PairedIndicators> groups;
          for (const auto& [id, va] : a->second) {
            auto vb = b->second.find(id);
            if (vb == b->second.end()) continue;
            std::vector<std::string> keys{"All"};
            if (auto g = index.find(id); g != index.end()) keys.push_back(g->second.category);
            for (const auto& k : keys) {
              auto& pi = groups[k];
              pi.example_ids.push_back(id);
              pi.model_a_solved.push_back(global ? va->global : va->directional);
              pi.model_b_solved.push_back(global ? vb->second->global : vb->second->directional);
            }
          }
          for (const auto& [group, pi] : groups) {
            const auto r = stats::bootstrap_compare(pi, cfg.bootstrap);
            rows.push_back({{"metric", metric},
                            {"condition", condition},
                            {"group", group},
                            {"model_a", a->first},
                            {"model_b", b->first},
                            {"n", pi.model_a_solved.size()},
                            {"delta", r.delta},
                            {"ci_low", r.ci_low},
                            {"ci_high", r.ci_high},
                            {"significant", r.significant}});
            lines.push_back({metric + " " + condition + " " + group, a->first + " vs " + b->first,
                             std::to_string(pi.model_a_solved.size()), detail::fixed(r.delta, 4),
                             detail::fixed(r.ci_low, 4), detail::fixed(r.ci_high, 4), r.significant ? "yes" : "no"});
          }
        }
      }
    }
  }
  text += "Paired bootstrap (" + std::to_string(cfg.bootstrap.resamples) + " resamples, seed " +
          std::to_string(cfg.bootstrap.seed) + ")\n";
  text += format_table({"Comparison", "Models", "n", "Delta", "CI low", "CI high", "Significant"}, lines) + "\n";
  return rows;
}

}  // namespace

CommandResult cmd_stats(const RunConfig& cfg) {
  if (cfg.results_path.empty() && cfg.verdicts_path.empty())
    throw Error("stats needs a results table, a verdicts file, or both");
  if (!cfg.results_path.empty()) detail::require_file(cfg.results_path, "results table");
  if (!cfg.verdicts_path.empty()) detail::require_file(cfg.verdicts_path, "verdicts file");

  CommandResult result;
  const Json meta = run_meta(cfg, "stats");
  Json report;
  report["_meta"] = meta;
  report["settings"] = {{"resamples", cfg.bootstrap.resamples},
                        {"ci", cfg.bootstrap.ci},
                        {"seed", cfg.bootstrap.seed},
                        {"regression_metric", cfg.regression_metric},
                        {"log_base", cfg.log_base}};
  std::string text;

  if (!cfg.results_path.empty()) {
    const auto results = stats::load_results_csv(cfg.results_path);
    report["regression"] = regressions(cfg, results, text, result);
    report["correlation"] = correlations(results, text, result);
  }
  if (!cfg.verdicts_path.empty()) {
    contrastive::GroupIndex index;
    if (!cfg.manifest_path.empty()) {
      detail::require_file(cfg.manifest_path, "manifest");
      const auto examples = bench::load_manifest(cfg.manifest_path, detail::lang_set(cfg));
      index = contrastive::make_group_index(examples);
    }
    report["bootstrap"] = bootstraps(cfg, contrastive::load_verdicts(cfg.verdicts_path), index, text);
  }

  detail::write_json(cfg.output_dir / "stats_report.json", report);
  jsonl::write_text(cfg.output_dir / "stats_report.txt", text);
  result.outputs = {cfg.output_dir / "stats_report.json", cfg.output_dir / "stats_report.txt"};
  return result;
}

}  // namespace contraprost::pipeline
