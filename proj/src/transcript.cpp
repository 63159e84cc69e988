#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "courtrel/corpus.hpp"
#include "courtrel/util.hpp"

namespace courtrel {

namespace {

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> abbrevs = {
      "v.",    "vs.",   "U. S.", "U.S.",  "S. Ct.", "L. Ed.", "F. Supp.",
      "Id.",   "No.",   "Nos.",  "Ct.",   "Cir.",   "Supp.",  "St.",
      "Mr.",   "Mrs.",  "Ms.",   "Dr.",   "Jr.",    "Sr.",    "Prof.",
      "Inc.",  "Co.",   "Corp.", "Ltd.",  "Bros.",  "Dist.",  "Div.",
      "Dept.", "Rep.",  "Sen.",  "Gov.",  "Stat.",  "Sec.",   "Art.",
      "Ann.",  "Rev.",  "Ed.",   "Vol.",  "pp.",    "p.",     "n.",
      "e.g.",  "i.e.",  "cf.",   "Cf.",   "al.",    "etc.",   "a.m.",
      "p.m."};
  return abbrevs;
}

bool is_roman_numeral_line(const std::string& t) {
  if (t.empty()) return false;
  std::size_t end = t.size();
  if (t[end - 1] == '.') --end;
  if (end == 0) return false;
  for (std::size_t i = 0; i < end; ++i) {
    static const std::string roman = "IVXLCDM";
    if (roman.find(t[i]) == std::string::npos) return false;
  }
  return true;
}

bool is_page_number_line(const std::string& t) {
  bool digit_seen = false;
  for (char c : t) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit_seen = true;
    } else if (c != '-' && !std::isspace(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return digit_seen;
}

// Case titles read "LEE v. UNITED STATES": all letters uppercase once the
// "v."/"vs." connector tokens are set aside.
bool is_all_caps_line(const std::string& t) {
  bool letter_seen = false;
  for (const std::string& word : split_ws(t)) {
    if (word == "v." || word == "vs." || word == "v" || word == "vs") continue;
    for (char c : word) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        letter_seen = true;
        if (std::islower(static_cast<unsigned char>(c))) return false;
      }
    }
  }
  return letter_seen;
}

bool ends_with_sentence_punct(const std::string& t) {
  for (auto it = t.rbegin(); it != t.rend(); ++it) {
    char c = *it;
    if (c == '"' || c == '\'' || c == ')' || c == ']') continue;
    return c == '.' || c == '!' || c == '?';
  }
  return false;
}

}  // namespace

TranscriptOptions::TranscriptOptions() : abbreviations(default_abbreviations()) {}

std::vector<std::string> load_abbreviation_file(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> abbreviation_units(const std::vector<std::string>& abbreviations) {
  std::set<std::string> units;
  for (const std::string& a : abbreviations) {
    for (const std::string& part : split_ws(a)) {
      if (!part.empty() && part.back() == '.') units.insert(part);
    }
  }
  return std::vector<std::string>(units.begin(), units.end());
}

bool is_heading_line(const std::string& line) {
  std::string t = trim(line);
  if (t.empty()) return false;
  if (is_page_number_line(t)) return true;
  if (is_roman_numeral_line(t)) return true;
  if (is_all_caps_line(t)) return true;
  if (split_ws(t).size() < 4 && !ends_with_sentence_punct(t)) return true;
  return false;
}

std::vector<std::string> load_transcript(const std::string& text,
                                         const TranscriptOptions& options) {
  // Body assembly: drop heading lines, reflow the rest into one stream.
  std::string body;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || is_heading_line(t)) continue;
    if (!body.empty()) body.push_back(' ');
    body += t;
  }

  std::set<std::string> units;
  for (const std::string& u : abbreviation_units(options.abbreviations)) units.insert(u);

  auto is_open_punct = [](char c) {
    return c == '(' || c == '[' || c == '{' || c == '"' || c == '\'';
  };

  std::vector<std::string> sentences;
  const std::size_t n = body.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    char c = body[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    // Absorb closing quotes/brackets into the sentence.
    std::size_t j = i + 1;
    while (j < n && (body[j] == '"' || body[j] == '\'' || body[j] == ')' || body[j] == ']'))
      ++j;
    bool at_end = j >= n;
    if (!at_end && !std::isspace(static_cast<unsigned char>(body[j]))) {
      ++i;
      continue;
    }
    // Peek at the first character of the next chunk; lowercase or digit
    // continuation means we are inside a citation or enumeration.
    std::size_t k = j;
    while (k < n && std::isspace(static_cast<unsigned char>(body[k]))) ++k;
    if (!at_end && k < n &&
        (std::islower(static_cast<unsigned char>(body[k])) ||
         std::isdigit(static_cast<unsigned char>(body[k])))) {
      i = j;
      continue;
    }
    if (c == '.') {
      // The word carrying this period, opening punctuation stripped.
      std::size_t b = i;
      while (b > start && !std::isspace(static_cast<unsigned char>(body[b - 1]))) --b;
      while (b < i && is_open_punct(body[b])) ++b;
      std::string word = body.substr(b, i - b + 1);
      if (units.count(word) && !at_end) {
        i = j;
        continue;
      }
    }
    std::string sentence = trim(body.substr(start, j - start));
    if (!sentence.empty()) sentences.push_back(sentence);
    start = k;
    i = k;
  }
  std::string tail = trim(body.substr(start));
  if (!tail.empty()) sentences.push_back(tail);
  return sentences;
}

}  // namespace courtrel
