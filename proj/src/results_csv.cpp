#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "contraprost/error.hpp"
#include "contraprost/stats.hpp"

namespace contraprost::stats {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(where + "not a number: '" + s + "'");
  }
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::vector<ResultRow> load_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<std::string> expected = {"model_id", "model_family", "model_type", "params_b",
                                             "lang",     "metric",       "value"};
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != expected)
    throw Error(path.string() + ":1: header must be model_id,model_family,model_type,params_b,lang,metric,value");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    auto f = split_csv(line);
    if (f.size() != expected.size()) throw Error(where + "expected 7 columns");
    ResultRow r{f[0], f[1], f[2], parse_double(f[3], where), f[4], f[5], parse_double(f[6], where)};
    const auto type = upper(r.model_type);
    if (type != "E2E" && type != "AED" && type != "CTC")
      throw Error(where + "model_type must be E2E, AED or CTC");
    if (!(r.params_b > 0.0)) throw Error(where + "params_b must be positive");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RegressionRow> regression_rows(std::span<const ResultRow> results, const std::string& metric,
                                           double log_base) {
  if (!(log_base > 1.0)) throw Error("log base must be > 1");
  std::vector<RegressionRow> out;
  for (const auto& r : results) {
    if (r.metric != metric) continue;
    const auto type = upper(r.model_type);
    RegressionRow row;
    row.model_family = r.model_family;
    row.score = r.value;
    row.log_size = std::log(r.params_b * 1e9) / std::log(log_base);
    row.is_aed = type == "AED" ? 1 : 0;
    row.is_ctc = type == "CTC" ? 1 : 0;
    row.lang = r.lang;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace contraprost::stats
