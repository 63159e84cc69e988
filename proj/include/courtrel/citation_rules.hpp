#pragma once

#include <optional>
#include <string>
#include <vector>

namespace courtrel {

enum class CitationPatternClass { SignalPrefix, ReporterCite, CaseName, ShortCite };

std::string to_string(CitationPatternClass cls);
std::optional<CitationPatternClass> parse_pattern_class(const std::string& name);

struct CitationRule {
  std::string id;
  std::string description;
  CitationPatternClass pattern = CitationPatternClass::ReporterCite;
  bool enabled = true;
  // pattern-class parameters, `key=value` with `|`-separated list values:
  //   signal-prefix : signals=See|See also|Cf.|E.g.,|Accord
  //   reporter-cite : reporters=U. S.|S. Ct.|F.2d|F.3d
  //   case-name     : reporters=... (for the accompanying cite check)
  //   short-cite    : forms=Id.|Ibid.
  std::string parameters;
};

struct CitationRuleSet {
  std::vector<CitationRule> rules;  // evaluated in order; first match wins

  static CitationRuleSet builtin();
};

struct CitationMatch {
  bool is_citation = false;
  std::optional<std::string> matched_rule_id;
};

// Examines one sentence (the source side of a pair). Pure; rule order fully
// determines matched_rule_id.
CitationMatch detect_citation(const std::string& sentence, const CitationRuleSet& rules);

// Line-oriented rule files: id<TAB>pattern_class<TAB>enabled<TAB>parameters
// (`#` comments allowed, `_` for empty parameters). Every loaded set must
// still cover all four pattern classes.
CitationRuleSet load_rules(std::istream& in);
CitationRuleSet load_rules_file(const std::string& path);

}  // namespace courtrel
