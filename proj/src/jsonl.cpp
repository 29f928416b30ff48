#include "contraprost/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "contraprost/error.hpp"

namespace contraprost::jsonl {

namespace {

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    if (first_record && obj.size() == 1 && obj.contains(kMetaKey)) {
      first_record = false;
      continue;
    }
    first_record = false;
    fn(obj, line_no);
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<Json>& rows,
                 const Json* meta) {
  std::ostringstream out;
  if (meta != nullptr) {
    Json header;
    header[kMetaKey] = *meta;
    out << header.dump() << '\n';
  }
  for (const auto& row : rows) out << row.dump() << '\n';
  write_text(path, out.str());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace contraprost::jsonl
