#pragma once

#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gtt {

struct TrialRecord;

enum class ProbeClass { kCapability, kSignature, kOther };

std::string_view to_string(ProbeClass c);
ProbeClass probe_class_from_string(std::string_view s);

/// Keyword and regex lists per category, matched case-insensitively.
class ProbeRules {
 public:
  std::string version;
  std::vector<std::string> imperatives;

  /// The rule table shipped in assets/probe_rules.json.
  static const ProbeRules& defaults();
  static ProbeRules from_json(const nlohmann::json& j);
  static ProbeRules from_file(const std::filesystem::path& path);

  bool signature(std::string_view unit) const;
  bool capability(std::string_view unit) const;
  bool starts_with_imperative(std::string_view sentence) const;

 private:
  std::vector<std::regex> signature_;
  std::vector<std::regex> capability_;
};

/// Sentences ending in '?' or opening with a probe imperative, in order.
/// Answer tags are removed first, so a bare verdict is never a unit.
std::vector<std::string> extract_question_units(std::string_view message,
                                                const ProbeRules& rules = ProbeRules::defaults());

/// Signature wins ties; capability needs a capability rule and no signature rule.
ProbeClass classify_question_unit(std::string_view unit, const ProbeRules& rules = ProbeRules::defaults());

struct ProbeReport {
  std::string rules_version;
  std::size_t trials = 0;
  std::size_t messages = 0;
  std::size_t units = 0;
  std::size_t capability = 0;
  std::size_t signature = 0;
  std::size_t other = 0;
  std::size_t first_turn_units = 0;
  std::size_t first_turn_signature = 0;

  double capability_fraction() const;
  double signature_fraction() const;
  double first_turn_signature_fraction() const;
};

/// Tallies the distinguisher's main-channel messages of every finished record.
ProbeReport probe_report(const std::vector<TrialRecord>& records, const ProbeRules& rules = ProbeRules::defaults());

void to_json(nlohmann::json& j, const ProbeReport& r);

}  // namespace gtt
