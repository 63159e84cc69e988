#include "courtrel/features.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "courtrel/util.hpp"

namespace courtrel {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "word_cos",     "noun_cos",     "verb_cos",          "adj_cos",
      "wor_t",        "wor_s",        "subj_overlap",      "obj_overlap",
      "subj_noun_overlap", "lcsr",    "ne_ratio",          "semantic_sim",
      "trans_elab",   "trans_followup", "ldr",             "attribution"};
  return names;
}

std::array<double, kFeatureCount> FeatureVector::to_array() const {
  return {word_cos, noun_cos, verb_cos,        adj_cos,     wor_t,      wor_s,
          subj_overlap, obj_overlap, subj_noun_overlap, lcsr, ne_ratio, semantic_sim,
          trans_elab,   trans_followup, ldr,   attribution};
}

FeatureVector FeatureVector::from_array(const std::array<double, kFeatureCount>& v) {
  FeatureVector f;
  f.word_cos = v[0];
  f.noun_cos = v[1];
  f.verb_cos = v[2];
  f.adj_cos = v[3];
  f.wor_t = v[4];
  f.wor_s = v[5];
  f.subj_overlap = v[6];
  f.obj_overlap = v[7];
  f.subj_noun_overlap = v[8];
  f.lcsr = v[9];
  f.ne_ratio = v[10];
  f.semantic_sim = v[11];
  f.trans_elab = v[12];
  f.trans_followup = v[13];
  f.ldr = v[14];
  f.attribution = v[15];
  return f;
}

// ---------------------------------------------------------------------------
// Bags and shared helpers
// ---------------------------------------------------------------------------

namespace {

bool is_word_token(const Token& t) {
  return !is_punct_tag(t.pos) && !is_punct_surface(t.surface);
}

std::vector<std::string> word_bag(const std::vector<Token>& tokens,
                                  const AnnotationResources& res) {
  std::vector<std::string> out;
  for (const Token& t : remove_stopwords(tokens, res)) {
    if (is_word_token(t)) out.push_back(to_lower(t.surface));
  }
  return out;
}

std::set<std::string> distinct_words(const std::vector<Token>& tokens,
                                     const AnnotationResources& res) {
  std::vector<std::string> bag = word_bag(tokens, res);
  return std::set<std::string>(bag.begin(), bag.end());
}

bool verb_excluded(const Token& t) {
  return t.lemma == "be" || t.lemma == "do" || t.lemma == "has" || t.lemma == "have";
}

std::vector<std::string> pos_bag(const std::vector<Token>& tokens,
                                 const AnnotationResources& res, char kind) {
  std::vector<std::string> out;
  for (const Token& t : remove_stopwords(tokens, res)) {
    if (!is_word_token(t)) continue;
    bool keep = false;
    switch (kind) {
      case 'n':
        keep = is_noun_tag(t.pos) || is_pronoun_tag(t.pos);
        break;
      case 'v':
        keep = is_verb_tag(t.pos) && !verb_excluded(t);
        break;
      case 'a':
        keep = is_adjective_tag(t.pos);
        break;
    }
    if (keep) out.push_back(to_lower(t.surface));
  }
  return out;
}

std::set<std::string> lemma_set(const std::vector<Token>& tokens, const AnnotationResources& res,
                                char kind) {
  std::set<std::string> out;
  for (const Token& t : remove_stopwords(tokens, res)) {
    if (!is_word_token(t)) continue;
    bool keep = kind == 'n' ? is_noun_tag(t.pos) : is_verb_tag(t.pos);
    if (keep) out.insert(t.lemma.empty() ? to_lower(t.surface) : t.lemma);
  }
  return out;
}

std::vector<std::string> lower_words(const AnnotatedSentence& sent) {
  std::vector<std::string> out;
  for (const Token& t : sent.tokens) {
    if (is_word_token(t)) out.push_back(to_lower(t.surface));
  }
  return out;
}

}  // namespace

double cosine_similarity(const std::vector<std::string>& bag_s,
                         const std::vector<std::string>& bag_t) {
  if (bag_s.empty() || bag_t.empty()) return 0.0;
  std::map<std::string, int> fs;
  std::map<std::string, int> ft;
  for (const std::string& w : bag_s) ++fs[w];
  for (const std::string& w : bag_t) ++ft[w];
  double dot = 0.0;
  for (const auto& [w, c] : fs) {
    auto it = ft.find(w);
    if (it != ft.end()) dot += static_cast<double>(c) * it->second;
  }
  double ns = 0.0;
  double nt = 0.0;
  for (const auto& [w, c] : fs) ns += static_cast<double>(c) * c;
  for (const auto& [w, c] : ft) nt += static_cast<double>(c) * c;
  // sqrt(ns*nt) keeps identical bags at exactly 1: the norms are
  // integer-valued, so their product and its square root are exact.
  return std::clamp(dot / std::sqrt(ns * nt), 0.0, 1.0);
}

PosCosines pos_filtered_cosines(const SentencePair& pair, const AnnotationResources& res) {
  PosCosines out;
  out.word = cosine_similarity(word_bag(pair.source.tokens, res),
                               word_bag(pair.target.tokens, res));
  out.noun = cosine_similarity(pos_bag(pair.source.tokens, res, 'n'),
                               pos_bag(pair.target.tokens, res, 'n'));
  out.verb = cosine_similarity(pos_bag(pair.source.tokens, res, 'v'),
                               pos_bag(pair.target.tokens, res, 'v'));
  out.adj = cosine_similarity(pos_bag(pair.source.tokens, res, 'a'),
                              pos_bag(pair.target.tokens, res, 'a'));
  return out;
}

std::pair<double, double> word_overlap_ratios(const SentencePair& pair,
                                              const AnnotationResources& res) {
  std::set<std::string> t = distinct_words(pair.target.tokens, res);
  std::set<std::string> s = distinct_words(pair.source.tokens, res);
  std::size_t common = 0;
  for (const std::string& w : t) common += s.count(w);
  double wor_t = t.empty() ? 0.0 : static_cast<double>(common) / t.size();
  double wor_s = s.empty() ? 0.0 : static_cast<double>(common) / s.size();
  return {wor_t, wor_s};
}

// ---------------------------------------------------------------------------
// Grammatical overlap
// ---------------------------------------------------------------------------

namespace {

bool has_dependencies(const AnnotatedSentence& sent) {
  for (const Token& t : sent.tokens) {
    if (t.deprel.has_value()) return true;
  }
  return false;
}

bool is_auxiliary_verb(const Token& t) {
  static const std::set<std::string> aux = {"be", "do", "have", "has", "will", "would", "can",
                                            "could", "may", "might", "must", "shall", "should"};
  return aux.count(t.lemma) > 0 || t.pos == "MD";
}

void shallow_subjects_objects(const AnnotatedSentence& sent, std::set<std::string>& subjects,
                              std::set<std::string>& objects) {
  std::size_t verb_pos = sent.tokens.size();
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    if (is_verb_tag(sent.tokens[i].pos) && !is_auxiliary_verb(sent.tokens[i])) {
      verb_pos = i;
      break;
    }
  }
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    const Token& t = sent.tokens[i];
    if (i < verb_pos && (is_noun_tag(t.pos) || is_pronoun_tag(t.pos)))
      subjects.insert(to_lower(t.surface));
    if (i > verb_pos && is_noun_tag(t.pos)) objects.insert(to_lower(t.surface));
  }
}

void dependency_subjects_objects(const AnnotatedSentence& sent, std::set<std::string>& subjects,
                                 std::set<std::string>& objects) {
  for (const Token& t : sent.tokens) {
    if (!t.deprel.has_value()) continue;
    std::string rel = to_lower(*t.deprel);
    if (rel.find("subj") != std::string::npos) subjects.insert(to_lower(t.surface));
    if (rel == "obj" || rel == "dobj" || rel == "iobj") objects.insert(to_lower(t.surface));
  }
}

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const std::string& x : a) n += b.count(x);
  return n;
}

}  // namespace

GrammaticalOverlap grammatical_overlap(const SentencePair& pair) {
  std::set<std::string> subj_s, obj_s, subj_t, obj_t;
  if (has_dependencies(pair.source))
    dependency_subjects_objects(pair.source, subj_s, obj_s);
  else
    shallow_subjects_objects(pair.source, subj_s, obj_s);
  if (has_dependencies(pair.target))
    dependency_subjects_objects(pair.target, subj_t, obj_t);
  else
    shallow_subjects_objects(pair.target, subj_t, obj_t);

  std::set<std::string> nouns_t;
  for (const Token& t : pair.target.tokens) {
    if (is_noun_tag(t.pos) || is_pronoun_tag(t.pos)) nouns_t.insert(to_lower(t.surface));
  }

  GrammaticalOverlap out;
  if (!subj_s.empty()) {
    out.subj_overlap = static_cast<double>(intersection_size(subj_s, subj_t)) / subj_s.size();
    out.subj_noun_overlap =
        static_cast<double>(intersection_size(subj_s, nouns_t)) / subj_s.size();
  }
  if (!obj_s.empty())
    out.obj_overlap = static_cast<double>(intersection_size(obj_s, obj_t)) / obj_s.size();
  return out;
}

// ---------------------------------------------------------------------------
// LCS ratio
// ---------------------------------------------------------------------------

namespace {

std::size_t rendered_length(const std::vector<std::string>& tokens, std::size_t begin,
                            std::size_t count) {
  if (count == 0) return 0;
  std::size_t len = count - 1;  // single spaces
  for (std::size_t i = 0; i < count; ++i) len += tokens[begin + i].size();
  return len;
}

std::vector<std::string> lower_surfaces(const AnnotatedSentence& sent) {
  std::vector<std::string> out;
  out.reserve(sent.tokens.size());
  for (const Token& t : sent.tokens) out.push_back(to_lower(t.surface));
  return out;
}

}  // namespace

double lcs_ratio(const SentencePair& pair) {
  std::vector<std::string> s = lower_surfaces(pair.source);
  std::vector<std::string> t = lower_surfaces(pair.target);
  if (s.empty()) return 0.0;
  // run[j] = length of the common token run ending at s[i], t[j].
  std::vector<std::size_t> prev(t.size(), 0), cur(t.size(), 0);
  std::size_t best_chars = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (s[i] == t[j]) {
        cur[j] = (i > 0 && j > 0) ? prev[j - 1] + 1 : 1;
        std::size_t chars = rendered_length(s, i + 1 - cur[j], cur[j]);
        best_chars = std::max(best_chars, chars);
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  std::size_t source_chars = rendered_length(s, 0, s.size());
  if (source_chars == 0) return 0.0;
  double ratio = static_cast<double>(best_chars) / static_cast<double>(source_chars);
  return std::clamp(ratio, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Entities, semantics, transitions, lengths, attribution
// ---------------------------------------------------------------------------

namespace {

int entity_mention_count(const AnnotatedSentence& sent) {
  int count = 0;
  std::size_t i = 0;
  while (i < sent.tokens.size()) {
    NeTag tag = sent.tokens[i].ner;
    if (tag == NeTag::NONE) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < sent.tokens.size() && sent.tokens[j].ner == tag) ++j;
    ++count;
    i = j;
  }
  return count;
}

}  // namespace

double ne_ratio(const SentencePair& pair) {
  int ne_s = entity_mention_count(pair.source);
  int ne_t = entity_mention_count(pair.target);
  int denom = std::max(ne_s, ne_t);
  if (denom == 0) return 0.0;
  return static_cast<double>(ne_s) / denom;
}

double semantic_similarity(const SentencePair& pair, const AnnotationResources& res,
                           const SimilarityLexicon& lexicon) {
  std::set<std::string> nouns_s = lemma_set(pair.source.tokens, res, 'n');
  std::set<std::string> nouns_t = lemma_set(pair.target.tokens, res, 'n');
  std::set<std::string> verbs_s = lemma_set(pair.source.tokens, res, 'v');
  std::set<std::string> verbs_t = lemma_set(pair.target.tokens, res, 'v');

  double total = 0.0;
  std::size_t terms = 0;
  for (const std::string& n : nouns_s) {
    double best = 0.0;
    for (const std::string& m : nouns_t) best = std::max(best, lexicon.similarity(n, m));
    total += best;
    ++terms;
  }
  for (const std::string& v : verbs_s) {
    double best = 0.0;
    for (const std::string& w : verbs_t) best = std::max(best, lexicon.similarity(v, w));
    total += best;
    ++terms;
  }
  if (terms == 0) return 0.0;
  return std::clamp(total / static_cast<double>(terms), 0.0, 1.0);
}

namespace {

bool phrase_matches_at(const std::vector<std::string>& words, std::size_t start,
                       const std::vector<std::string>& phrase) {
  if (phrase.empty() || start + phrase.size() > words.size()) return false;
  for (std::size_t k = 0; k < phrase.size(); ++k) {
    if (words[start + k] != phrase[k]) return false;
  }
  return true;
}

}  // namespace

std::pair<double, double> transition_features(const AnnotatedSentence& source,
                                              const TransitionResources& transitions) {
  std::vector<std::string> words = lower_words(source);
  double elab = 0.0;
  double followup = 0.0;
  if (!words.empty()) {
    for (const std::string& w : transitions.elaboration_words) {
      if (words[0] == w) {
        elab = 1.0;
        break;
      }
    }
    if (elab == 0.0) {
      for (const std::string& p : transitions.elaboration_phrases) {
        std::vector<std::string> phrase = split_ws(p);
        for (std::size_t start = 0; start < std::min<std::size_t>(6, words.size()); ++start) {
          if (phrase_matches_at(words, start, phrase)) {
            elab = 1.0;
            break;
          }
        }
        if (elab == 1.0) break;
      }
    }
    for (const std::string& w : transitions.followup_words) {
      if (words[0] == w) {
        followup = 1.0;
        break;
      }
    }
    if (followup == 0.0) {
      for (const std::string& p : transitions.followup_phrases) {
        if (phrase_matches_at(words, 0, split_ws(p))) {
          followup = 1.0;
          break;
        }
      }
    }
  }
  return {elab, followup};
}

double length_difference_ratio(const SentencePair& pair) {
  auto word_count = [](const AnnotatedSentence& sent) {
    std::size_t n = 0;
    for (const Token& t : sent.tokens) n += is_word_token(t) ? 1 : 0;
    return static_cast<double>(n);
  };
  double len_s = word_count(pair.source);
  double len_t = word_count(pair.target);
  double m = std::max(len_s, len_t);
  if (m == 0.0) return 0.5;
  return 0.5 + (len_s - len_t) / (2.0 * m);
}

namespace {

// Quoted spans of 1..6 word tokens between matching quote tokens; an
// unpaired trailing quote is treated as plain text.
std::vector<std::vector<std::string>> quoted_spans(const AnnotatedSentence& sent) {
  std::vector<std::vector<std::string>> spans;
  const auto& toks = sent.tokens;
  std::size_t i = 0;
  while (i < toks.size()) {
    if (!is_quote_token(toks[i].surface)) {
      ++i;
      continue;
    }
    std::size_t close = i + 1;
    while (close < toks.size() && !is_quote_token(toks[close].surface)) ++close;
    if (close >= toks.size()) break;  // unbalanced
    std::vector<std::string> span;
    for (std::size_t k = i + 1; k < close; ++k) {
      if (is_punct_surface(toks[k].surface)) continue;
      span.push_back(to_lower(toks[k].surface));
    }
    if (!span.empty() && span.size() <= 6) spans.push_back(std::move(span));
    i = close + 1;
  }
  return spans;
}

bool span_occurs_in(const std::vector<std::string>& span, const std::vector<std::string>& words) {
  if (span.empty() || span.size() > words.size()) return false;
  for (std::size_t start = 0; start + span.size() <= words.size(); ++start) {
    if (phrase_matches_at(words, start, span)) return true;
  }
  return false;
}

}  // namespace

double attribution_feature(const SentencePair& pair) {
  std::vector<std::string> words_t = lower_words(pair.target);
  std::vector<std::string> words_s = lower_words(pair.source);
  for (const auto& span : quoted_spans(pair.source)) {
    if (span_occurs_in(span, words_t)) return 1.0;
  }
  for (const auto& span : quoted_spans(pair.target)) {
    if (span_occurs_in(span, words_s)) return 1.0;
  }
  return 0.0;
}

FeatureVector extract_features(const SentencePair& pair, const AnnotationResources& resources,
                               const TransitionResources& transitions,
                               const SimilarityLexicon& lexicon) {
  // Coreference substitution feeds the POS-filtered cosines, grammatical
  // overlaps and semantic similarity; everything else reads the original
  // sentences.
  SentencePair resolved = resolve_coreferences(pair);

  FeatureVector fv;
  fv.word_cos = pos_filtered_cosines(pair, resources).word;
  PosCosines pos = pos_filtered_cosines(resolved, resources);
  fv.noun_cos = pos.noun;
  fv.verb_cos = pos.verb;
  fv.adj_cos = pos.adj;
  auto [wor_t, wor_s] = word_overlap_ratios(pair, resources);
  fv.wor_t = wor_t;
  fv.wor_s = wor_s;
  GrammaticalOverlap gram = grammatical_overlap(resolved);
  fv.subj_overlap = gram.subj_overlap;
  fv.obj_overlap = gram.obj_overlap;
  fv.subj_noun_overlap = gram.subj_noun_overlap;
  fv.lcsr = lcs_ratio(pair);
  fv.ne_ratio = ne_ratio(pair);
  fv.semantic_sim = semantic_similarity(resolved, resources, lexicon);
  auto [elab, followup] = transition_features(pair.source, transitions);
  fv.trans_elab = elab;
  fv.trans_followup = followup;
  fv.ldr = length_difference_ratio(pair);
  fv.attribution = attribution_feature(pair);
  return fv;
}

// ---------------------------------------------------------------------------
// Resources
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> load_line_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open resource file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(to_lower(t));
  }
  return out;
}

}  // namespace

TransitionResources TransitionResources::builtin() {
  TransitionResources r;
  r.elaboration_words = {"and",  "thus", "therefore", "first", "second", "also",
                         "moreover", "furthermore", "additionally", "further", "indeed",
                         "specifically", "accordingly", "consequently", "hence", "finally",
                         "next", "then", "likewise", "similarly"};
  r.elaboration_phrases = {"in addition", "for example", "for instance", "in other words",
                           "that is",     "in particular", "as a result", "in fact",
                           "to make that", "to this end"};
  r.followup_words = {"however", "although", "rather", "but", "nevertheless", "nonetheless",
                      "yet",     "still",    "though", "conversely", "instead", "whereas"};
  r.followup_phrases = {"in contrast", "on the contrary", "on the other hand", "even so",
                        "by contrast"};
  return r;
}

TransitionResources load_transition_resources(const std::string& dir) {
  namespace fs = std::filesystem;
  TransitionResources r;
  r.elaboration_words =
      load_line_list((fs::path(dir) / "transitions_elaboration_words.txt").string());
  r.elaboration_phrases =
      load_line_list((fs::path(dir) / "transitions_elaboration_phrases.txt").string());
  r.followup_words = load_line_list((fs::path(dir) / "transitions_followup_words.txt").string());
  r.followup_phrases =
      load_line_list((fs::path(dir) / "transitions_followup_phrases.txt").string());
  if (r.elaboration_words.empty() || r.elaboration_phrases.empty() ||
      r.followup_words.empty() || r.followup_phrases.empty())
    throw std::runtime_error("transition lists must be non-empty: " + dir);
  return r;
}

SimilarityLexicon SimilarityLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open similarity lexicon: " + path);
  SimilarityLexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError("expected word1<TAB>word2<TAB>similarity", lineno);
    double sim = 0.0;
    try {
      sim = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw ParseError("bad similarity value '" + fields[2] + "'", lineno);
    }
    if (sim < 0.0 || sim > 1.0)
      throw ParseError("similarity out of [0,1]: " + fields[2], lineno);
    lex.add(trim(fields[0]), trim(fields[1]), sim);
  }
  return lex;
}

SimilarityLexicon SimilarityLexicon::from_rows(
    const std::vector<std::tuple<std::string, std::string, double>>& rows) {
  SimilarityLexicon lex;
  for (const auto& [a, b, sim] : rows) lex.add(a, b, sim);
  return lex;
}

void SimilarityLexicon::add(const std::string& a, const std::string& b, double sim) {
  std::string la = to_lower(a);
  std::string lb = to_lower(b);
  if (la > lb) std::swap(la, lb);
  table_[{la, lb}] = sim;
}

double SimilarityLexicon::similarity(const std::string& a, const std::string& b) const {
  std::string la = to_lower(a);
  std::string lb = to_lower(b);
  if (la > lb) std::swap(la, lb);
  auto it = table_.find({la, lb});
  if (it != table_.end()) return it->second;
  return la == lb ? 1.0 : 0.0;
}

}  // namespace courtrel
