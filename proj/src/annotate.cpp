#include "courtrel/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "courtrel/util.hpp"

namespace courtrel {

namespace {

bool ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Multi-byte opening/closing quotes we peel as standalone tokens.
const std::vector<std::string>& unicode_quotes() {
  static const std::vector<std::string> q = {"‘", "’", "“", "”"};
  return q;
}

// Length of a peelable punctuation unit at position i, else 0.
std::size_t punct_unit_len(const std::string& s, std::size_t i) {
  char c = s[i];
  static const std::string ascii_punct = "\"'()[]{},;:.!?`";
  if (ascii_punct.find(c) != std::string::npos) return 1;
  for (const std::string& q : unicode_quotes()) {
    if (s.compare(i, q.size(), q) == 0) return q.size();
  }
  return 0;
}

}  // namespace

TokenizerOptions::TokenizerOptions() {
  for (const std::string& u : courtrel::abbreviation_units(TranscriptOptions().abbreviations))
    abbreviation_units.insert(u);
}

std::vector<RawToken> tokenize(const std::string& text, const TokenizerOptions& options) {
  std::vector<RawToken> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t chunk_end = i;
    while (chunk_end < n && !std::isspace(static_cast<unsigned char>(text[chunk_end])))
      ++chunk_end;

    std::size_t b = i;
    std::size_t e = chunk_end;
    // Leading punctuation, one token per unit.
    while (b < e) {
      std::size_t len = punct_unit_len(text, b);
      if (len == 0 || b + len > e) break;
      // Keep a leading '$' or digit-led unit attached (money, enumerations).
      if (text[b] == '.' && b + 1 < e && std::isdigit(static_cast<unsigned char>(text[b + 1])))
        break;
      out.push_back({text.substr(b, len), b, b + len});
      b += len;
    }
    // Trailing punctuation, peeled in reverse.
    std::vector<RawToken> trailing;
    while (e > b) {
      // Find a punctuation unit ending exactly at e.
      std::size_t len = 0;
      if (punct_unit_len(text, e - 1) == 1) {
        len = 1;
      } else {
        for (const std::string& q : unicode_quotes()) {
          if (e >= q.size() && text.compare(e - q.size(), q.size(), q) == 0) {
            len = q.size();
            break;
          }
        }
      }
      if (len == 0) break;
      if (text[e - len] == '.') {
        // A final period stays attached to configured abbreviation units.
        std::string with_period = text.substr(b, e - b);
        if (options.abbreviation_units.count(with_period)) break;
      }
      trailing.push_back({text.substr(e - len, len), e - len, e});
      e -= len;
    }
    if (e > b) out.push_back({text.substr(b, e - b), b, e});
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(*it);
    i = chunk_end;
  }
  return out;
}

bool is_quote_token(const std::string& surface) {
  if (surface == "\"" || surface == "'" || surface == "``" || surface == "''") return true;
  for (const std::string& q : unicode_quotes()) {
    if (surface == q) return true;
  }
  return false;
}

bool is_punct_surface(const std::string& surface) {
  if (surface.empty()) return true;
  for (char c : surface) {
    if (ascii_alnum(c)) return false;
  }
  // Pure multi-byte sequences (unicode quotes) land here as well.
  return true;
}

bool is_pronoun_token(const Token& token) {
  if (is_pronoun_tag(token.pos)) return true;
  static const std::set<std::string> pronouns = {
      "he",  "him",  "his",  "she",   "her",  "hers", "it",   "its",
      "they", "them", "their", "theirs", "himself", "herself", "itself", "themselves"};
  return pronouns.count(to_lower(token.surface)) > 0;
}

// ---------------------------------------------------------------------------
// Resources
// ---------------------------------------------------------------------------

namespace {

void load_word_list(const std::string& path, std::set<std::string>& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open resource file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.insert(to_lower(t));
  }
}

}  // namespace

AnnotationResources AnnotationResources::builtin() {
  AnnotationResources r;
  r.version = "builtin";
  static const char* stop[] = {
      "a",    "an",   "the",  "and",  "or",   "but",  "if",   "of",   "at",  "by",
      "for",  "with", "about", "to",  "from", "in",   "on",   "into", "as",  "is",
      "was",  "are",  "were", "be",   "been", "being", "am",  "has",  "have", "had",
      "do",   "does", "did",  "will", "would", "shall", "should", "can", "could", "may",
      "might", "must", "he",  "him",  "his",  "she",  "her",  "it",   "its", "they",
      "them", "their", "this", "that", "these", "those", "i",  "we",   "you", "who",
      "whom", "which", "what", "not", "no",   "nor",  "so",   "than", "then", "there",
      "here", "when", "where", "how", "all",  "any",  "both", "each", "few", "more",
      "most", "other", "some", "such"};
  for (const char* w : stop) r.stopwords.insert(w);
  static const std::pair<const char*, const char*> lex[] = {
      {"he", "PRP"},   {"she", "PRP"},  {"it", "PRP"},    {"they", "PRP"},  {"him", "PRP"},
      {"them", "PRP"}, {"his", "PRP$"}, {"her", "PRP$"},  {"its", "PRP$"},  {"their", "PRP$"},
      {"the", "DT"},   {"a", "DT"},     {"an", "DT"},     {"this", "DT"},   {"that", "DT"},
      {"is", "VBZ"},   {"was", "VBD"},  {"are", "VBP"},   {"were", "VBD"},  {"be", "VB"},
      {"been", "VBN"}, {"has", "VBZ"},  {"have", "VBP"},  {"had", "VBD"},   {"moved", "VBD"},
      {"of", "IN"},    {"in", "IN"},    {"on", "IN"},     {"with", "IN"},   {"from", "IN"},
      {"to", "TO"},    {"and", "CC"},   {"or", "CC"},     {"but", "CC"},    {"when", "WRB"},
      {"not", "RB"},   {"never", "RB"}, {"court", "NN"},  {"law", "NN"},    {"judge", "NN"}};
  for (const auto& [w, t] : lex) r.pos_lexicon[w] = t;
  r.ne_gazetteer["Jae Lee"] = NeTag::PERSON;
  r.ne_gazetteer["Lee"] = NeTag::PERSON;
  r.ne_gazetteer["United States"] = NeTag::LOCATION;
  r.ne_gazetteer["South Korea"] = NeTag::LOCATION;
  return r;
}

AnnotationResources load_annotation_resources(const std::string& dir) {
  namespace fs = std::filesystem;
  AnnotationResources r;
  std::string fingerprint_input;

  const std::string stopwords_path = (fs::path(dir) / "stopwords.txt").string();
  load_word_list(stopwords_path, r.stopwords);
  fingerprint_input += read_file(stopwords_path);
  if (r.stopwords.empty()) throw std::runtime_error("stopword list is empty: " + stopwords_path);

  const std::string lexicon_path = (fs::path(dir) / "pos_lexicon.tsv").string();
  {
    std::ifstream in(lexicon_path);
    if (!in) throw std::runtime_error("cannot open resource file: " + lexicon_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      std::vector<std::string> fields = split(line, '\t');
      if (fields.size() != 2) throw ParseError("expected word<TAB>pos", lineno);
      if (!is_valid_pos_tag(trim(fields[1])))
        throw ParseError("unknown POS tag '" + fields[1] + "'", lineno);
      r.pos_lexicon[to_lower(trim(fields[0]))] = trim(fields[1]);
    }
    fingerprint_input += read_file(lexicon_path);
  }

  const std::string gazetteer_path = (fs::path(dir) / "gazetteer.tsv").string();
  {
    std::ifstream in(gazetteer_path);
    if (!in) throw std::runtime_error("cannot open resource file: " + gazetteer_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      std::vector<std::string> fields = split(line, '\t');
      if (fields.size() != 2) throw ParseError("expected phrase<TAB>type", lineno);
      auto tag = parse_ne_tag(trim(fields[1]));
      if (!tag.has_value() || *tag == NeTag::NONE)
        throw ParseError("gazetteer type must be one of the 7 entity types, got '" + fields[1] +
                             "'",
                         lineno);
      r.ne_gazetteer[trim(fields[0])] = *tag;
    }
    fingerprint_input += read_file(gazetteer_path);
  }

  r.version = hex64(fnv1a64(fingerprint_input));
  return r;
}

// ---------------------------------------------------------------------------
// POS / lemma / NER
// ---------------------------------------------------------------------------

namespace {

bool all_digits_like(const std::string& s) {
  bool digit = false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)))
      digit = true;
    else if (c != ',' && c != '.' && c != '-' && c != '/')
      return false;
  }
  return digit;
}

std::string guess_pos(const std::string& surface, const AnnotationResources& res) {
  if (is_punct_surface(surface)) return "PUNCT";
  if (all_digits_like(surface)) return "CD";
  const std::string lower = to_lower(surface);
  auto it = res.pos_lexicon.find(lower);
  if (it != res.pos_lexicon.end()) return it->second;
  auto ends = [&](const char* suf) {
    std::size_t m = std::strlen(suf);
    return lower.size() > m + 1 && lower.compare(lower.size() - m, m, suf) == 0;
  };
  if (ends("ly")) return "RB";
  if (ends("ing")) return "VBG";
  if (ends("ed")) return "VBD";
  if (ends("est") && lower.size() > 4) return "JJS";
  if (ends("ous") || ends("ful") || ends("ive") || ends("able") || ends("ible") || ends("al") ||
      ends("ic"))
    return "JJ";
  if (ends("tion") || ends("sion") || ends("ment") || ends("ness") || ends("ity") ||
      ends("ance") || ends("ence"))
    return "NN";
  if (std::isupper(static_cast<unsigned char>(surface[0]))) return "NNP";
  if (ends("s") && !ends("ss") && !ends("us") && !ends("is")) return "NNS";
  return "NN";
}

const std::map<std::string, std::string>& irregular_verbs() {
  static const std::map<std::string, std::string> m = {
      {"was", "be"},    {"were", "be"},   {"is", "be"},      {"are", "be"},
      {"am", "be"},     {"been", "be"},   {"being", "be"},   {"has", "have"},
      {"had", "have"},  {"having", "have"}, {"does", "do"},  {"did", "do"},
      {"done", "do"},   {"doing", "do"},  {"went", "go"},    {"gone", "go"},
      {"held", "hold"}, {"made", "make"}, {"said", "say"},   {"saw", "see"},
      {"seen", "see"},  {"took", "take"}, {"taken", "take"}, {"found", "find"},
      {"gave", "give"}, {"given", "give"}, {"got", "get"},   {"came", "come"},
      {"knew", "know"}, {"known", "know"}, {"thought", "think"}, {"brought", "bring"},
      {"sought", "seek"}, {"felt", "feel"}, {"kept", "keep"}, {"left", "leave"},
      {"met", "meet"},  {"paid", "pay"},  {"ran", "run"},    {"told", "tell"},
      {"won", "win"},   {"wrote", "write"}, {"written", "write"}, {"rose", "rise"},
      {"fell", "fall"}, {"drew", "draw"}, {"drawn", "draw"}, {"chose", "choose"},
      {"spoke", "speak"}, {"stood", "stand"}, {"understood", "understand"},
      {"upheld", "uphold"}};
  return m;
}

const std::map<std::string, std::string>& irregular_nouns() {
  static const std::map<std::string, std::string> m = {
      {"men", "man"},   {"women", "woman"}, {"children", "child"},
      {"feet", "foot"}, {"teeth", "tooth"}, {"mice", "mouse"}};
  return m;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string strip_verb_inflection(const std::string& w) {
  auto it = irregular_verbs().find(w);
  if (it != irregular_verbs().end()) return it->second;
  auto ends = [&](const char* suf) {
    std::size_t m = std::strlen(suf);
    return w.size() > m + 1 && w.compare(w.size() - m, m, suf) == 0;
  };
  if (ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        !is_vowel(stem.back()))
      return stem.substr(0, stem.size() - 1);
    if (stem.size() > 1 && !is_vowel(stem.back()) && is_vowel(stem[stem.size() - 2]) &&
        stem.back() != 'w' && stem.back() != 'x' && stem.back() != 'y')
      return stem + "e";
    return stem;
  }
  if (ends("ied")) return w.substr(0, w.size() - 3) + "y";
  if (ends("ed")) {
    std::string drop_d = w.substr(0, w.size() - 1);
    if (drop_d.size() > 1 && drop_d[drop_d.size() - 1] == 'e') return drop_d;
    std::string stem = w.substr(0, w.size() - 2);
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        !is_vowel(stem.back()))
      return stem.substr(0, stem.size() - 1);
    return stem;
  }
  if (ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends("es") && (ends("ches") || ends("shes") || ends("xes") || ends("zes") || ends("sses")))
    return w.substr(0, w.size() - 2);
  if (ends("s") && !ends("ss")) return w.substr(0, w.size() - 1);
  return w;
}

std::string strip_plural(const std::string& w) {
  auto it = irregular_nouns().find(w);
  if (it != irregular_nouns().end()) return it->second;
  auto ends = [&](const char* suf) {
    std::size_t m = std::strlen(suf);
    return w.size() > m + 1 && w.compare(w.size() - m, m, suf) == 0;
  };
  if (ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends("ches") || ends("shes") || ends("xes") || ends("zes") || ends("sses"))
    return w.substr(0, w.size() - 2);
  if (ends("s") && !ends("ss") && !ends("us") && !ends("is"))
    return w.substr(0, w.size() - 1);
  return w;
}

std::string lemma_for(const std::string& surface, const std::string& pos) {
  const std::string lower = to_lower(surface);
  if (is_verb_tag(pos)) return strip_verb_inflection(lower);
  if (pos == "NNS" || pos == "NNPS") return strip_plural(lower);
  return lower;
}

bool regex_ne(const std::string& surface, NeTag& out) {
  static const std::regex money(R"(^\$[0-9][0-9,]*(\.[0-9]+)?$)");
  static const std::regex percent(R"(^[0-9]+(\.[0-9]+)?%$)");
  static const std::regex year(R"(^(1[5-9][0-9]{2}|20[0-9]{2})s?$)");
  static const std::regex clock(R"(^[0-9]{1,2}:[0-9]{2}(:[0-9]{2})?$)");
  static const std::set<std::string> months = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  static const std::set<std::string> time_words = {"a.m.", "p.m.", "noon", "midnight"};
  if (std::regex_match(surface, money)) {
    out = NeTag::MONEY;
    return true;
  }
  if (std::regex_match(surface, percent)) {
    out = NeTag::PERCENT;
    return true;
  }
  if (std::regex_match(surface, year) || months.count(to_lower(surface))) {
    out = NeTag::DATE;
    return true;
  }
  if (std::regex_match(surface, clock) || time_words.count(to_lower(surface))) {
    out = NeTag::TIME;
    return true;
  }
  return false;
}

}  // namespace

AnnotatedSentence annotate_sentence(const std::string& text,
                                    const AnnotationResources& resources) {
  AnnotatedSentence sent;
  sent.raw = text;
  std::vector<RawToken> raw = tokenize(text);
  sent.tokens.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Token t;
    t.surface = raw[i].text;
    t.index = static_cast<int>(i);
    t.pos = guess_pos(t.surface, resources);
    t.lemma = lemma_for(t.surface, t.pos);
    sent.tokens.push_back(std::move(t));
  }
  // Longest-match gazetteer pass (up to 6 tokens), then token-level rules.
  const std::size_t n = sent.tokens.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t best_len = 0;
    NeTag best_tag = NeTag::NONE;
    std::string phrase;
    for (std::size_t len = 1; len <= 6 && i + len <= n; ++len) {
      if (len > 1) phrase += ' ';
      phrase += sent.tokens[i + len - 1].surface;
      auto it = resources.ne_gazetteer.find(phrase);
      if (it != resources.ne_gazetteer.end()) {
        best_len = len;
        best_tag = it->second;
      }
    }
    if (best_len > 0) {
      for (std::size_t k = 0; k < best_len; ++k) {
        sent.tokens[i + k].ner = best_tag;
        if (best_tag == NeTag::PERSON || best_tag == NeTag::ORGANIZATION ||
            best_tag == NeTag::LOCATION) {
          sent.tokens[i + k].pos = "NNP";
          sent.tokens[i + k].lemma = to_lower(sent.tokens[i + k].surface);
        }
      }
      i += best_len;
      continue;
    }
    NeTag tag = NeTag::NONE;
    if (regex_ne(sent.tokens[i].surface, tag)) sent.tokens[i].ner = tag;
    ++i;
  }
  return sent;
}

// ---------------------------------------------------------------------------
// Coreference
// ---------------------------------------------------------------------------

namespace {

struct MentionRef {
  int sentence = 0;  // 0 target, 1 source
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  NeTag tag = NeTag::NONE;
};

std::vector<MentionRef> entity_mentions(const AnnotatedSentence& sent, int which) {
  std::vector<MentionRef> out;
  std::size_t i = 0;
  while (i < sent.tokens.size()) {
    NeTag tag = sent.tokens[i].ner;
    if (tag != NeTag::PERSON && tag != NeTag::ORGANIZATION) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < sent.tokens.size() && sent.tokens[j].ner == tag) ++j;
    out.push_back({which, i, j, tag});
    i = j;
  }
  return out;
}

bool is_third_person_pronoun(const Token& t) {
  static const std::set<std::string> third = {"he",   "him",  "his",  "she",  "her",
                                              "hers", "it",   "its",  "they", "them",
                                              "their", "theirs"};
  return third.count(to_lower(t.surface)) > 0;
}

}  // namespace

SentencePair naive_coref(const SentencePair& pair) {
  SentencePair out = pair;
  std::vector<MentionRef> mentions = entity_mentions(out.target, 0);
  {
    std::vector<MentionRef> src = entity_mentions(out.source, 1);
    mentions.insert(mentions.end(), src.begin(), src.end());
  }
  if (mentions.empty()) return out;

  // One chain per distinct mention text, id assigned by first occurrence.
  std::map<std::string, std::string> chain_of_text;
  std::vector<std::string> chain_ids(mentions.size());
  int next_chain = 0;
  auto sentence_of = [&](int which) -> AnnotatedSentence& {
    return which == 0 ? out.target : out.source;
  };
  for (std::size_t m = 0; m < mentions.size(); ++m) {
    const AnnotatedSentence& sent = sentence_of(mentions[m].sentence);
    std::string text;
    for (std::size_t k = mentions[m].begin; k < mentions[m].end; ++k) {
      if (!text.empty()) text.push_back(' ');
      text += to_lower(sent.tokens[k].surface);
    }
    auto it = chain_of_text.find(text);
    if (it == chain_of_text.end())
      it = chain_of_text.emplace(text, "c" + std::to_string(next_chain++)).first;
    chain_ids[m] = it->second;
  }
  for (std::size_t m = 0; m < mentions.size(); ++m) {
    AnnotatedSentence& sent = sentence_of(mentions[m].sentence);
    for (std::size_t k = mentions[m].begin; k < mentions[m].end; ++k)
      sent.tokens[k].coref_chain = chain_ids[m];
  }

  // Pronouns bind to the nearest preceding mention in target-then-source
  // document order.
  for (int which = 0; which <= 1; ++which) {
    AnnotatedSentence& sent = sentence_of(which);
    for (std::size_t p = 0; p < sent.tokens.size(); ++p) {
      if (!is_third_person_pronoun(sent.tokens[p])) continue;
      if (sent.tokens[p].coref_chain.has_value()) continue;
      const MentionRef* best = nullptr;
      std::size_t best_m = 0;
      for (std::size_t m = 0; m < mentions.size(); ++m) {
        const MentionRef& mr = mentions[m];
        bool precedes = mr.sentence < which || (mr.sentence == which && mr.end <= p);
        if (!precedes) continue;
        if (best == nullptr || mr.sentence > best->sentence ||
            (mr.sentence == best->sentence && mr.begin >= best->begin)) {
          best = &mr;
          best_m = m;
        }
      }
      if (best != nullptr) sent.tokens[p].coref_chain = chain_ids[best_m];
    }
  }

  // Representative mentions, merged across the pair.
  std::map<std::string, std::vector<Mention>> by_chain;
  for (int which = 0; which <= 1; ++which) {
    for (auto& [id, runs] : detail::collect_chain_mentions(sentence_of(which).tokens)) {
      for (Mention& m : runs) by_chain[id].push_back(std::move(m));
    }
  }
  for (int which = 0; which <= 1; ++which) {
    AnnotatedSentence& sent = sentence_of(which);
    sent.coref_chains.clear();
    std::set<std::string> referenced;
    for (const Token& t : sent.tokens) {
      if (t.coref_chain.has_value()) referenced.insert(*t.coref_chain);
    }
    for (const std::string& id : referenced) {
      auto rep = detail::pick_representative(by_chain[id]);
      if (rep.has_value()) sent.coref_chains[id] = *rep;
    }
  }
  return out;
}

namespace {

AnnotatedSentence substitute_sentence(const AnnotatedSentence& sent,
                                      const std::map<std::string, Mention>& representatives) {
  AnnotatedSentence out;
  out.coref_chains = sent.coref_chains;

  // First pass: decide replacements and build the old->new index map for the
  // carrier token of each original position.
  std::vector<int> new_index_of(sent.tokens.size(), 0);
  struct Emitted {
    Token token;
    int old_index;  // original token this one carries, -1 for fillers
  };
  std::vector<Emitted> emitted;
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    const Token& t = sent.tokens[i];
    bool replace = t.coref_chain.has_value() && is_pronoun_token(t);
    if (replace) {
      auto it = representatives.find(*t.coref_chain);
      if (it == representatives.end() || it->second.tokens.empty())
        throw std::invalid_argument("coref chain '" + *t.coref_chain +
                                    "' has no representative mention");
      const Mention& rep = it->second;
      for (std::size_t k = 0; k < rep.tokens.size(); ++k) {
        Token nt = rep.tokens[k];
        nt.coref_chain = t.coref_chain;
        nt.head.reset();
        nt.deprel.reset();
        bool carrier = (k + 1 == rep.tokens.size());
        if (carrier) {
          nt.head = t.head;  // remapped below
          nt.deprel = t.deprel;
        }
        emitted.push_back({std::move(nt), carrier ? static_cast<int>(i) : -1});
      }
    } else {
      emitted.push_back({t, static_cast<int>(i)});
    }
  }
  for (std::size_t j = 0; j < emitted.size(); ++j) {
    if (emitted[j].old_index >= 0) new_index_of[emitted[j].old_index] = static_cast<int>(j);
  }
  // Second pass: renumber and remap heads; filler tokens of a replacement
  // attach to their carrier as compounds.
  for (std::size_t j = 0; j < emitted.size(); ++j) {
    Token t = emitted[j].token;
    t.index = static_cast<int>(j);
    if (emitted[j].old_index < 0) {
      // Filler: head is the next carrier emitted from the same replacement.
      std::size_t k = j;
      while (k + 1 < emitted.size() && emitted[k].old_index < 0) ++k;
      t.head = static_cast<int>(k);
      t.deprel = "compound";
    } else if (t.head.has_value() && *t.head != kHeadRoot) {
      int h = *t.head;
      if (h >= 0 && h < static_cast<int>(new_index_of.size())) t.head = new_index_of[h];
    }
    out.tokens.push_back(std::move(t));
  }
  std::string raw;
  for (const Token& t : out.tokens) {
    if (!raw.empty()) raw.push_back(' ');
    raw += t.surface;
  }
  out.raw = raw;
  return out;
}

}  // namespace

SentencePair resolve_coreferences(const SentencePair& pair) {
  // Merge representative candidates across the pair: non-pronoun token runs
  // plus the stored representatives. A chain referenced only by pronouns and
  // missing from both coref_chains maps has no representative.
  auto pronoun_only = [](const Mention& m) {
    for (const Token& t : m.tokens) {
      if (!is_pronoun_token(t)) return false;
    }
    return !m.tokens.empty();
  };
  std::map<std::string, std::vector<Mention>> candidates;
  for (const AnnotatedSentence* sent : {&pair.target, &pair.source}) {
    for (auto& [id, runs] : detail::collect_chain_mentions(sent->tokens)) {
      for (Mention& m : runs) {
        if (!pronoun_only(m)) candidates[id].push_back(std::move(m));
      }
    }
  }
  for (const AnnotatedSentence* sent : {&pair.target, &pair.source}) {
    for (const auto& [id, rep] : sent->coref_chains) candidates[id].push_back(rep);
  }
  std::map<std::string, Mention> representatives;
  for (const auto& [id, mentions] : candidates) {
    auto rep = detail::pick_representative(mentions);
    if (rep.has_value()) representatives[id] = *rep;
  }

  SentencePair out;
  out.id = pair.id;
  out.target = substitute_sentence(pair.target, representatives);
  out.source = substitute_sentence(pair.source, representatives);
  return out;
}

std::vector<Token> remove_stopwords(const std::vector<Token>& tokens,
                                    const AnnotationResources& resources) {
  std::vector<Token> out;
  for (const Token& t : tokens) {
    if (resources.stopwords.count(to_lower(t.surface))) continue;
    out.push_back(t);
  }
  return out;
}

}  // namespace courtrel
