#include "courtrel/citation_rules.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "courtrel/util.hpp"

namespace courtrel {

std::string to_string(CitationPatternClass cls) {
  switch (cls) {
    case CitationPatternClass::SignalPrefix: return "signal-prefix";
    case CitationPatternClass::ReporterCite: return "reporter-cite";
    case CitationPatternClass::CaseName: return "case-name";
    case CitationPatternClass::ShortCite: return "short-cite";
  }
  return "?";
}

std::optional<CitationPatternClass> parse_pattern_class(const std::string& name) {
  static const std::map<std::string, CitationPatternClass> table = {
      {"signal-prefix", CitationPatternClass::SignalPrefix},
      {"reporter-cite", CitationPatternClass::ReporterCite},
      {"case-name", CitationPatternClass::CaseName},
      {"short-cite", CitationPatternClass::ShortCite}};
  auto it = table.find(to_lower(trim(name)));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

std::map<std::string, std::vector<std::string>> parse_parameters(const std::string& params,
                                                                 const std::string& rule_id) {
  std::map<std::string, std::vector<std::string>> out;
  std::string p = trim(params);
  if (p.empty() || p == "_") return out;
  for (const std::string& kv : split(p, ';')) {
    std::string entry = trim(kv);
    if (entry.empty()) continue;
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw ParseError("rule '" + rule_id + "': malformed parameter '" + entry + "'");
    std::string key = trim(entry.substr(0, eq));
    for (const std::string& v : split(entry.substr(eq + 1), '|')) out[key].push_back(trim(v));
  }
  return out;
}

std::string escape_regex(const std::string& s) {
  static const std::string special = R"(\.^$|()[]{}*+?)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// "U. S." / "F.2d" -> a pattern tolerant of spacing after periods.
std::string reporter_pattern(const std::string& reporter) {
  std::string out;
  for (char c : reporter) {
    if (c == ' ') continue;
    if (c == '.') {
      out += "\\.\\s*";
    } else {
      out += escape_regex(std::string(1, c));
    }
  }
  return out;
}

const std::vector<std::string>& default_reporters() {
  static const std::vector<std::string> reps = {"U. S.",    "S. Ct.",  "F.2d",
                                                "F.3d",     "F. Supp.", "L. Ed. 2d",
                                                "L. Ed."};
  return reps;
}

const std::vector<std::string>& default_signals() {
  static const std::vector<std::string> sigs = {"See also", "See", "Cf.", "E.g.,", "Accord"};
  return sigs;
}

std::regex make_reporter_regex(const std::vector<std::string>& reporters) {
  std::string alts;
  for (const std::string& r : reporters) {
    if (!alts.empty()) alts += "|";
    alts += reporter_pattern(r);
  }
  return std::regex(R"(\b\d{1,4}\s+(?:)" + alts + R"()\s*\d{1,4}\b)");
}

const std::regex& case_name_regex() {
  static const std::regex re(
      R"([A-Z][A-Za-z0-9.'&-]*(?:\s+(?:of|the|for|de|la|[A-Z][A-Za-z0-9.'&-]*)){0,6}\s+v\.\s+[A-Z])");
  return re;
}

const std::regex& year_parenthetical_regex() {
  static const std::regex re(R"(\(\d{4}\))");
  return re;
}

struct CompiledRule {
  CitationPatternClass pattern;
  std::regex signal;         // signal-prefix
  std::regex reporter;       // reporter-cite / case-name companion
  std::regex standalone;     // short-cite
  std::regex pinpoint;       // short-cite "Id., at <n>"
};

CompiledRule compile_rule(const CitationRule& rule) {
  auto params = parse_parameters(rule.parameters, rule.id);
  CompiledRule c;
  c.pattern = rule.pattern;
  switch (rule.pattern) {
    case CitationPatternClass::SignalPrefix: {
      std::vector<std::string> signals =
          params.count("signals") ? params["signals"] : default_signals();
      std::string alts;
      for (const std::string& s : signals) {
        if (!alts.empty()) alts += "|";
        alts += escape_regex(s);
      }
      c.signal = std::regex("^\\s*(?:" + alts + ")\\s");
      c.reporter = make_reporter_regex(params.count("reporters") ? params["reporters"]
                                                                 : default_reporters());
      break;
    }
    case CitationPatternClass::ReporterCite:
    case CitationPatternClass::CaseName:
      c.reporter = make_reporter_regex(params.count("reporters") ? params["reporters"]
                                                                 : default_reporters());
      break;
    case CitationPatternClass::ShortCite: {
      std::vector<std::string> forms =
          params.count("forms") ? params["forms"] : std::vector<std::string>{"Id.", "Ibid."};
      std::string alts;
      for (const std::string& f : forms) {
        if (!alts.empty()) alts += "|";
        alts += escape_regex(f);
      }
      c.standalone = std::regex("^\\s*(?:" + alts + ")\\s*$");
      c.pinpoint = std::regex(R"(^\s*Id\.\s*,?\s*at\s+\d+)");
      break;
    }
  }
  return c;
}

bool rule_matches(const CompiledRule& rule, const std::string& sentence) {
  switch (rule.pattern) {
    case CitationPatternClass::SignalPrefix:
      return std::regex_search(sentence, rule.signal) &&
             (std::regex_search(sentence, case_name_regex()) ||
              std::regex_search(sentence, rule.reporter));
    case CitationPatternClass::ReporterCite:
      return std::regex_search(sentence, rule.reporter);
    case CitationPatternClass::CaseName:
      return std::regex_search(sentence, case_name_regex()) &&
             (std::regex_search(sentence, rule.reporter) ||
              std::regex_search(sentence, year_parenthetical_regex()));
    case CitationPatternClass::ShortCite:
      return std::regex_match(sentence, rule.standalone) ||
             std::regex_search(sentence, rule.pinpoint);
  }
  return false;
}

void validate(const CitationRuleSet& set) {
  std::set<std::string> ids;
  std::set<CitationPatternClass> classes;
  for (const CitationRule& r : set.rules) {
    if (!ids.insert(r.id).second) throw ParseError("duplicate rule id '" + r.id + "'");
    classes.insert(r.pattern);
    parse_parameters(r.parameters, r.id);  // reject malformed parameters early
  }
  if (classes.size() < 4)
    throw ParseError("rule set must cover all four pattern classes");
}

}  // namespace

CitationRuleSet CitationRuleSet::builtin() {
  CitationRuleSet set;
  set.rules = {
      {"R1", "signal word followed by a case name or reporter cite",
       CitationPatternClass::SignalPrefix, true, ""},
      {"R2", "volume-reporter-page cite", CitationPatternClass::ReporterCite, true, ""},
      {"R3", "case name with an accompanying cite or year", CitationPatternClass::CaseName, true,
       ""},
      {"R4", "short-form cite (Id. / Ibid.)", CitationPatternClass::ShortCite, true, ""},
  };
  return set;
}

CitationMatch detect_citation(const std::string& sentence, const CitationRuleSet& rules) {
  for (const CitationRule& rule : rules.rules) {
    if (!rule.enabled) continue;
    CompiledRule compiled = compile_rule(rule);
    if (rule_matches(compiled, sentence)) return {true, rule.id};
  }
  return {false, std::nullopt};
}

CitationRuleSet load_rules(std::istream& in) {
  CitationRuleSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 4)
      throw ParseError("expected id<TAB>pattern_class<TAB>enabled<TAB>parameters", lineno);
    CitationRule rule;
    rule.id = trim(fields[0]);
    auto cls = parse_pattern_class(fields[1]);
    if (!cls.has_value())
      throw ParseError("unknown pattern class '" + fields[1] + "'", lineno);
    rule.pattern = *cls;
    std::string enabled = to_lower(trim(fields[2]));
    if (enabled == "true" || enabled == "1" || enabled == "yes")
      rule.enabled = true;
    else if (enabled == "false" || enabled == "0" || enabled == "no")
      rule.enabled = false;
    else
      throw ParseError("bad enabled flag '" + fields[2] + "'", lineno);
    rule.parameters = trim(fields[3]) == "_" ? "" : trim(fields[3]);
    set.rules.push_back(std::move(rule));
  }
  validate(set);
  return set;
}

CitationRuleSet load_rules_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule file: " + path);
  return load_rules(in);
}

}  // namespace courtrel
