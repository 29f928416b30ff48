#include "contraprost/prompts.hpp"

#include <algorithm>

#include "contraprost/error.hpp"

namespace contraprost::prompts {

namespace {

constexpr std::string_view kExampleGeneration =
    "You are a helpful assistant with expert knowledge in linguistics, speech, and prosody. Your task is to come up "
    "with examples of English sentences where different prosody would change the meaning of the sentence "
    "significantly.\n"
    "\n"
    "{category_details}\n"
    "\n"
    "Here are some examples to guide you:\n"
    "\n"
    "{examples}\n"
    "\n"
    "Strictly follow these rules:\n"
    "\n"
    "{rules}\n"
    "\n"
    "Provide a rating of how significant is the difference between the two meanings.\n"
    "\n"
    "Generate {n} such examples, with rating as high as possible, in the domain of {domain}.\n";

constexpr std::string_view kOracleTranslation =
    "You are a helpful assistant with expert knowledge in speech, prosody, linguistics and translation, "
    "particularly in English and {target_lang}.\n"
    "You will be provided with a sentence in English (S) and two different prosodic variations (S_A, S_B), "
    "focused on {category}, which correspond to two different semantic interpretations.\n"
    "\n"
    "Your task is to translate S, S_A and S_B into {target_lang}, as T, T_A, and T_B.\n"
    "\n"
    "Carry out the translation in these steps:\n"
    "\n"
    "(1) Translate S into T.\n"
    "\n"
    "(2) Translate S_A to T_A and S_B to T_B, by focusing on how T should change in order to reflect the "
    "additional information from the prosodies.\n"
    "\n"
    "The following constraints should be applied: {constraints}\n"
    "\n"
    "The sentence S is: {sentence}\n"
    "\n"
    "The two different prosodic variations are:\n"
    "\n"
    "S_A. {prosody_a} ({meaning_a})\n"
    "\n"
    "S_B. {prosody_b} ({meaning_b})\n";

constexpr std::string_view kPostEditing =
    "You are a helpful assistant and an expert translator. You will be provided with a sentence in English and "
    "different possible translations in {target_lang}.\n"
    "The English sentence can contain rich prosodic text with {category_info}, that affects the meaning of the "
    "sentence.\n"
    "Your task is to select the most appropriate and prosody-aware translation.\n"
    "First provide a brief explanation of your reasoning and then the index of the selected translation.\n"
    "\n"
    "The sentence S to be translated is {sentence} and the candidate translations are:\n"
    "{candidates}\n";

bool is_slot_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Calls fn(slot_name, begin, end) for each {slot} placeholder.
template <typename Fn>
void scan_slots(std::string_view text, Fn&& fn) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_slot_char(text[j])) ++j;
    if (j < text.size() && text[j] == '}' && j > i + 1) {
      fn(std::string(text.substr(i + 1, j - i - 1)), i, j + 1);
      i = j;
    }
  }
}

}  // namespace

std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::ExampleGeneration: return "ExampleGeneration";
    case PromptKind::OracleTranslation: return "OracleTranslation";
    case PromptKind::PostEditing: return "PostEditing";
  }
  return "?";
}

PromptKind parse_prompt_kind(std::string_view s) {
  for (auto k : {PromptKind::ExampleGeneration, PromptKind::OracleTranslation, PromptKind::PostEditing})
    if (to_string(k) == s) return k;
  throw Error("unknown prompt kind '" + std::string(s) +
              "' (expected ExampleGeneration, OracleTranslation or PostEditing)");
}

std::string_view template_text(PromptKind kind) {
  switch (kind) {
    case PromptKind::ExampleGeneration: return kExampleGeneration;
    case PromptKind::OracleTranslation: return kOracleTranslation;
    case PromptKind::PostEditing: return kPostEditing;
  }
  return {};
}

std::vector<std::string> required_slots(PromptKind kind) {
  std::vector<std::string> out;
  scan_slots(template_text(kind), [&](std::string name, std::size_t, std::size_t) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
  });
  return out;
}

std::string render_prompt(const PromptTemplate& t) {
  std::vector<std::string> missing;
  for (const auto& name : required_slots(t.kind))
    if (!t.slots.contains(name)) missing.push_back(name);
  if (!missing.empty()) {
    std::string msg = std::string(to_string(t.kind)) + " prompt: unfilled slot(s): ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
    throw Error(msg);
  }
  const std::string_view text = template_text(t.kind);
  std::string out;
  std::size_t cursor = 0;
  scan_slots(text, [&](const std::string& name, std::size_t begin, std::size_t end) {
    out.append(text.substr(cursor, begin - cursor));
    out.append(t.slots.at(name));
    cursor = end;
  });
  out.append(text.substr(cursor));
  return out;
}

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "\n- " : "- ") + items[i];
  return out;
}

std::string indexed_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + std::to_string(i) + ": " + items[i];
  return out + "]";
}

}  // namespace contraprost::prompts
