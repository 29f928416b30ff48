#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace contraprost::prompts {

enum class PromptKind { ExampleGeneration, OracleTranslation, PostEditing };

std::string_view to_string(PromptKind k);
PromptKind parse_prompt_kind(std::string_view s);

struct PromptTemplate {
  PromptKind kind = PromptKind::ExampleGeneration;
  std::map<std::string, std::string> slots;
};

// Raw template text with `{slot}` placeholders.
std::string_view template_text(PromptKind kind);

// Slot names referenced by the template, in order of first appearance.
std::vector<std::string> required_slots(PromptKind kind);

// Single-pass substitution; slot values are inserted verbatim. Throws
// contraprost::Error listing every unfilled slot.
std::string render_prompt(const PromptTemplate& t);

// "- item" per line, for rule/constraint/example lists.
std::string bullet_list(const std::vector<std::string>& items);
// "[T, T_A, T_B]" style candidate list, 0-based indices.
std::string indexed_list(const std::vector<std::string>& items);

}  // namespace contraprost::prompts
