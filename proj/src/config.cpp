#include "contraprost/config.hpp"

#include <cstdio>
#include <sstream>

#include "contraprost/error.hpp"

namespace contraprost {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads one scalar starting at `pos`: a quoted string or a bare token ending
// at ',' / ']' / '#'.
std::string read_scalar(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos < s.size() && s[pos] == '"') {
    std::string out;
    for (++pos; pos < s.size(); ++pos) {
      if (s[pos] == '\\' && pos + 1 < s.size()) {
        out.push_back(s[++pos]);
      } else if (s[pos] == '"') {
        ++pos;
        return out;
      } else {
        out.push_back(s[pos]);
      }
    }
    throw Error("unterminated string");
  }
  const auto end = s.find_first_of(",]#", pos);
  std::string out = trim(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
  pos = end == std::string::npos ? s.size() : end;
  return out;
}

std::vector<std::string> parse_value(const std::string& raw) {
  std::size_t pos = 0;
  while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
  std::vector<std::string> items;
  if (pos < raw.size() && raw[pos] == '[') {
    ++pos;
    for (;;) {
      while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
      if (pos >= raw.size()) throw Error("unterminated list");
      if (raw[pos] == ']') break;
      items.push_back(read_scalar(raw, pos));
      while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
      if (pos < raw.size() && raw[pos] == ',') ++pos;
    }
    return items;
  }
  items.push_back(read_scalar(raw, pos));
  return items;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error("config key '" + key + "' expects a number, got '" + v + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto u = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return u;
  } catch (const std::exception&) {
  }
  throw Error("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
}

const std::string& single(const std::string& key, const std::vector<std::string>& items) {
  if (items.size() != 1) throw Error("config key '" + key + "' expects a single value");
  return items.front();
}

void assign(RunConfig& cfg, const std::string& key, const std::vector<std::string>& items,
            const std::filesystem::path& base) {
  auto one = [&]() -> const std::string& { return single(key, items); };
  if (key == "manifest") {
    cfg.manifest_path = resolve(one(), base);
  } else if (key == "scores") {
    cfg.scores_paths.clear();
    for (const auto& s : items) cfg.scores_paths.push_back(resolve(s, base));
  } else if (key == "metric") {
    if (one() == "all" || one() == "All")
      cfg.metric.reset();
    else
      cfg.metric = contrastive::parse_metric(one());
  } else if (key == "norm_mode") {
    cfg.norm_mode = contrastive::parse_norm_mode(one());
  } else if (key == "max_hypotheses") {
    cfg.max_hypotheses = to_uint(key, one());
    if (cfg.max_hypotheses == 0) throw Error("max_hypotheses must be >= 1");
  } else if (key == "langs") {
    cfg.langs = items;
  } else if (key == "output_dir") {
    cfg.output_dir = resolve(one(), base);
  } else if (key == "candidates") {
    cfg.candidates_path = resolve(one(), base);
  } else if (key == "alignments") {
    cfg.alignments_path = resolve(one(), base);
  } else if (key == "posteriors") {
    cfg.posteriors_path = resolve(one(), base);
  } else if (key == "punct_probs") {
    cfg.punct_probs_path = resolve(one(), base);
  } else if (key == "audio_root") {
    cfg.audio_root = resolve(one(), base);
  } else if (key == "results") {
    cfg.results_path = resolve(one(), base);
  } else if (key == "verdicts") {
    cfg.verdicts_path = resolve(one(), base);
  } else if (key == "regression_metric") {
    cfg.regression_metric = one();
  } else if (key == "log_base") {
    cfg.log_base = one() == "e" ? 2.718281828459045 : to_double(key, one());
    if (!(cfg.log_base > 1.0)) throw Error("log_base must be > 1");
  } else if (key == "bootstrap.resamples") {
    cfg.bootstrap.resamples = to_uint(key, one());
    if (cfg.bootstrap.resamples == 0) throw Error("bootstrap.resamples must be >= 1");
  } else if (key == "bootstrap.ci") {
    cfg.bootstrap.ci = to_double(key, one());
    if (!(cfg.bootstrap.ci > 0.0 && cfg.bootstrap.ci < 1.0)) throw Error("bootstrap.ci must be in (0,1)");
  } else if (key == "bootstrap.seed") {
    cfg.bootstrap.seed = to_uint(key, one());
  } else if (key.starts_with("thresholds.")) {
    const auto cat = key.substr(std::string("thresholds.").size());
    bench::parse_category(cat);
    cfg.thresholds[cat] = to_double(key, one());
  } else if (key == "stress_weights.loud") {
    cfg.stress_weights.lambda_loud = to_double(key, one());
  } else if (key == "stress_weights.pitch") {
    cfg.stress_weights.lambda_pitch = to_double(key, one());
  } else if (key == "stress_weights.dur") {
    cfg.stress_weights.lambda_dur = to_double(key, one());
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

double RunConfig::threshold_for(bench::Category c) const {
  auto it = thresholds.find(std::string(bench::to_string(c)));
  return it == thresholds.end() ? 0.0 : it->second;
}

jsonl::Json RunConfig::to_json() const {
  jsonl::Json j;
  j["manifest"] = manifest_path.generic_string();
  j["scores"] = jsonl::Json::array();
  for (const auto& p : scores_paths) j["scores"].push_back(p.generic_string());
  j["metric"] = metric ? std::string(contrastive::to_string(*metric)) : std::string("all");
  j["norm_mode"] = contrastive::to_string(norm_mode);
  j["max_hypotheses"] = max_hypotheses;
  j["thresholds"] = jsonl::Json::object();
  for (auto c : bench::all_categories()) j["thresholds"][std::string(bench::to_string(c))] = threshold_for(c);
  j["bootstrap"] = {{"resamples", bootstrap.resamples}, {"ci", bootstrap.ci}, {"seed", bootstrap.seed}};
  j["langs"] = langs;
  j["output_dir"] = output_dir.generic_string();
  j["candidates"] = candidates_path.generic_string();
  j["alignments"] = alignments_path.generic_string();
  j["posteriors"] = posteriors_path.generic_string();
  j["punct_probs"] = punct_probs_path.generic_string();
  j["audio_root"] = audio_root.generic_string();
  j["stress_weights"] = {{"loud", stress_weights.lambda_loud},
                         {"pitch", stress_weights.lambda_pitch},
                         {"dur", stress_weights.lambda_dur}};
  j["results"] = results_path.generic_string();
  j["verdicts"] = verdicts_path.generic_string();
  j["regression_metric"] = regression_metric;
  j["log_base"] = log_base;
  return j;
}

std::string RunConfig::hash() const { return fnv1a_hex(to_json().dump()); }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw Error("malformed section header");
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw Error("expected key = value");
      std::string key = trim(t.substr(0, eq));
      if (!section.empty()) key = section + "." + key;
      assign(cfg, key, parse_value(t.substr(eq + 1)), base_dir);
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(jsonl::read_text(path), path.parent_path());
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value,
                    const std::filesystem::path& base_dir) {
  const bool list_key = key == "scores" || key == "langs";
  assign(cfg, key, list_key ? split_commas(value) : std::vector<std::string>{value}, base_dir);
}

}  // namespace contraprost
