#include "gtt/analytics/probes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gtt/common/assets.hpp"
#include "gtt/common/errors.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

namespace {

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '*'; }

std::vector<std::regex> compile(const nlohmann::json& patterns, std::string_view category) {
  std::vector<std::regex> out;
  for (const auto& p : patterns) {
    try {
      out.emplace_back(p.get<std::string>(), std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad " + std::string(category) + " pattern '" + p.get<std::string>() + "': " + e.what());
    }
  }
  return out;
}

bool any_match(const std::vector<std::regex>& rules, std::string_view text) {
  return std::any_of(rules.begin(), rules.end(),
                     [&](const std::regex& r) { return std::regex_search(text.begin(), text.end(), r); });
}

std::vector<std::string> sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    const auto t = trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush();
      continue;
    }
    current += c;
    if (!is_terminator(c)) continue;
    std::size_t j = i + 1;
    while (j < text.size() && (is_terminator(text[j]) || is_closer(text[j]))) current += text[j++];
    if (j == text.size() || std::isspace(static_cast<unsigned char>(text[j]))) {
      flush();
    }
    i = j - 1;
  }
  flush();
  return out;
}

bool ends_with_question(std::string_view s) {
  while (!s.empty() && (is_closer(s.back()) || std::isspace(static_cast<unsigned char>(s.back())))) {
    s.remove_suffix(1);
  }
  return !s.empty() && s.back() == '?';
}

std::string strip_answer_tags(std::string_view message) {
  static const std::regex tag(R"(<\s*/?\s*answer\s*>)", std::regex::icase);
  return std::regex_replace(std::string(message), tag, " ");
}

std::string next_word(std::string_view& s) {
  std::size_t i = 0;
  while (i < s.size() && !std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  std::string word;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    ++i;
  }
  s.remove_prefix(i);
  return word;
}

}  // namespace

std::string_view to_string(ProbeClass c) {
  switch (c) {
    case ProbeClass::kCapability:
      return "capability_probe";
    case ProbeClass::kSignature:
      return "signature_probe";
    case ProbeClass::kOther:
      return "other";
  }
  return "?";
}

ProbeClass probe_class_from_string(std::string_view s) {
  if (s == "capability_probe") return ProbeClass::kCapability;
  if (s == "signature_probe") return ProbeClass::kSignature;
  if (s == "other") return ProbeClass::kOther;
  throw ConfigError("unknown probe class: " + std::string(s));
}

ProbeRules ProbeRules::from_json(const nlohmann::json& j) {
  ProbeRules r;
  try {
    r.version = j.at("version").get<std::string>();
    r.imperatives = j.at("imperatives").get<std::vector<std::string>>();
    r.signature_ = compile(j.at("signature"), "signature");
    r.capability_ = compile(j.at("capability"), "capability");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed probe rules: ") + e.what());
  }
  for (auto& w : r.imperatives) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
  }
  std::sort(r.imperatives.begin(), r.imperatives.end());
  return r;
}

ProbeRules ProbeRules::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open probe rules " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed probe rules " + path.string() + ": " + e.what());
  }
}

const ProbeRules& ProbeRules::defaults() {
  static const ProbeRules rules = from_json(nlohmann::json::parse(assets::get("probe_rules.json")));
  return rules;
}

bool ProbeRules::signature(std::string_view unit) const { return any_match(signature_, unit); }
bool ProbeRules::capability(std::string_view unit) const { return any_match(capability_, unit); }

bool ProbeRules::starts_with_imperative(std::string_view sentence) const {
  std::string word = next_word(sentence);
  if (word == "please") word = next_word(sentence);
  return std::binary_search(imperatives.begin(), imperatives.end(), word);
}

std::vector<std::string> extract_question_units(std::string_view message, const ProbeRules& rules) {
  std::vector<std::string> units;
  for (auto& s : sentences(strip_answer_tags(message))) {
    if (ends_with_question(s) || rules.starts_with_imperative(s)) units.push_back(std::move(s));
  }
  return units;
}

ProbeClass classify_question_unit(std::string_view unit, const ProbeRules& rules) {
  if (rules.signature(unit)) return ProbeClass::kSignature;
  if (rules.capability(unit)) return ProbeClass::kCapability;
  return ProbeClass::kOther;
}

double ProbeReport::capability_fraction() const {
  return units ? static_cast<double>(capability) / static_cast<double>(units) : 0.0;
}
double ProbeReport::signature_fraction() const {
  return units ? static_cast<double>(signature) / static_cast<double>(units) : 0.0;
}
double ProbeReport::first_turn_signature_fraction() const {
  return first_turn_units ? static_cast<double>(first_turn_signature) / static_cast<double>(first_turn_units) : 0.0;
}

ProbeReport probe_report(const std::vector<TrialRecord>& records, const ProbeRules& rules) {
  ProbeReport r;
  r.rules_version = rules.version;
  for (const auto& rec : records) {
    if (rec.failed()) continue;
    ++r.trials;
    bool first = true;
    for (const auto& m : rec.transcript) {
      if (m.channel != Channel::kMain || m.sender != Sender::kDistinguisher) continue;
      ++r.messages;
      for (const auto& unit : extract_question_units(m.content, rules)) {
        const ProbeClass c = classify_question_unit(unit, rules);
        ++r.units;
        if (c == ProbeClass::kCapability) ++r.capability;
        if (c == ProbeClass::kSignature) ++r.signature;
        if (c == ProbeClass::kOther) ++r.other;
        if (first) {
          ++r.first_turn_units;
          if (c == ProbeClass::kSignature) ++r.first_turn_signature;
        }
      }
      first = false;
    }
  }
  return r;
}

void to_json(nlohmann::json& j, const ProbeReport& r) {
  j = {{"rules_version", r.rules_version},
       {"trials", r.trials},
       {"messages", r.messages},
       {"units", r.units},
       {"capability", r.capability},
       {"signature", r.signature},
       {"other", r.other},
       {"first_turn_units", r.first_turn_units},
       {"first_turn_signature", r.first_turn_signature},
       {"capability_fraction", r.capability_fraction()},
       {"signature_fraction", r.signature_fraction()},
       {"first_turn_signature_fraction", r.first_turn_signature_fraction()}};
}

}  // namespace gtt
