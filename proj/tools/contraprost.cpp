#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contraprost/config.hpp"
#include "contraprost/error.hpp"
#include "contraprost/jsonl.hpp"
#include "contraprost/pipeline.hpp"
#include "contraprost/prompts.hpp"

namespace {

using contraprost::Error;
using contraprost::RunConfig;
namespace pipeline = contraprost::pipeline;

struct Overrides {
  std::string config;
  std::string metric, norm_mode, output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> resamples;
  std::optional<double> ci;
  std::vector<std::string> thresholds;
  std::vector<std::string> sets;
};

std::pair<std::string, std::string> split_pair(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(std::string(flag) + " expects key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Config file (key = value, [sections])")->required();
  cmd->add_option("--metric", o.metric, "Likelihood, Quality or all");
  cmd->add_option("--norm-mode", o.norm_mode, "geometric or literal");
  cmd->add_option("--seed", o.seed, "Bootstrap seed");
  cmd->add_option("--resamples", o.resamples, "Bootstrap resamples");
  cmd->add_option("--ci", o.ci, "Bootstrap confidence level");
  cmd->add_option("--threshold", o.thresholds, "Objective threshold, Category=value (repeatable)");
  cmd->add_option("--output", o.output, "Output directory");
  cmd->add_option("--set", o.sets, "Any config key, key=value (repeatable)");
}

RunConfig build_config(const Overrides& o) {
  const std::filesystem::path cwd = std::filesystem::current_path();
  RunConfig cfg = contraprost::load_config(o.config);
  for (const auto& s : o.sets) {
    const auto [k, v] = split_pair(s, "--set");
    contraprost::apply_override(cfg, k, v, cwd);
  }
  if (!o.metric.empty()) contraprost::apply_override(cfg, "metric", o.metric);
  if (!o.norm_mode.empty()) contraprost::apply_override(cfg, "norm_mode", o.norm_mode);
  if (o.seed) contraprost::apply_override(cfg, "bootstrap.seed", std::to_string(*o.seed));
  if (o.resamples) contraprost::apply_override(cfg, "bootstrap.resamples", std::to_string(*o.resamples));
  if (o.ci) {
    std::ostringstream ss;
    ss.precision(17);
    ss << *o.ci;
    contraprost::apply_override(cfg, "bootstrap.ci", ss.str());
  }
  for (const auto& t : o.thresholds) {
    const auto [k, v] = split_pair(t, "--threshold");
    contraprost::apply_override(cfg, "thresholds." + k, v);
  }
  if (const char* env = std::getenv("CONTRAPROST_OUTPUT"); env && *env)
    contraprost::apply_override(cfg, "output_dir", env, cwd);
  if (!o.output.empty()) contraprost::apply_override(cfg, "output_dir", o.output, cwd);
  return cfg;
}

int report(const pipeline::CommandResult& r) {
  for (const auto& m : r.messages) std::cerr << m << "\n";
  for (const auto& p : r.outputs) std::cout << p.string() << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive prosody evaluation toolkit"};
  app.require_subcommand(1);

  Overrides eval_o, filter_o, rank_o, stats_o;
  auto* evaluate = app.add_subcommand("evaluate", "Score contrastive conditions and summarize per model");
  add_run_options(evaluate, eval_o);
  auto* filter = app.add_subcommand("filter", "Apply the translation filters per target language");
  add_run_options(filter, filter_o);
  auto* rank = app.add_subcommand("rank-candidates", "Select the best synthesized voice per prosodic case");
  add_run_options(rank, rank_o);
  auto* stat = app.add_subcommand("stats", "Regressions, correlations and bootstrap comparisons");
  add_run_options(stat, stats_o);

  auto* render = app.add_subcommand("render-prompt", "Render a prompt template");
  std::string kind;
  std::vector<std::string> slots;
  std::vector<std::string> slot_files;
  bool list_slots = false;
  std::string out_path;
  render->add_option("--kind", kind, "ExampleGeneration, OracleTranslation or PostEditing")->required();
  render->add_option("--slot", slots, "Slot value, name=value (repeatable)");
  render->add_option("--slot-file", slot_files, "Slot value read from a file, name=path (repeatable)");
  render->add_flag("--list-slots", list_slots, "Print the slots the template needs");
  render->add_option("-o,--out", out_path, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pipeline::kExitUsage;
  }

  try {
    if (*evaluate) return report(pipeline::cmd_evaluate(build_config(eval_o)));
    if (*filter) return report(pipeline::cmd_filter(build_config(filter_o)));
    if (*rank) return report(pipeline::cmd_rank_candidates(build_config(rank_o)));
    if (*stat) return report(pipeline::cmd_stats(build_config(stats_o)));
    if (*render) {
      namespace prompts = contraprost::prompts;
      prompts::PromptTemplate t;
      t.kind = prompts::parse_prompt_kind(kind);
      if (list_slots) {
        for (const auto& s : prompts::required_slots(t.kind)) std::cout << s << "\n";
        return 0;
      }
      for (const auto& s : slots) {
        auto [k, v] = split_pair(s, "--slot");
        t.slots.insert_or_assign(k, v);
      }
      for (const auto& s : slot_files) {
        const auto [k, path] = split_pair(s, "--slot-file");
        t.slots.insert_or_assign(k, contraprost::jsonl::read_text(path));
      }
      const auto text = prompts::render_prompt(t);
      if (out_path.empty())
        std::cout << text;
      else
        contraprost::jsonl::write_text(out_path, text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pipeline::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return pipeline::kExitInternal;
  }
  return pipeline::kExitUsage;
}
