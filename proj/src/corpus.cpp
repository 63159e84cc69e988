#include "courtrel/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "courtrel/util.hpp"

namespace courtrel {

namespace {

// Name keys are lowercased with everything non-alphanumeric removed, so
// "Follow-up", "follow up" and "FollowUp" collide as intended.
std::string name_key(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

const std::vector<RelationLabel>& all_relation_labels() {
  static const std::vector<RelationLabel> labels = {
      RelationLabel::Elaboration, RelationLabel::Redundancy, RelationLabel::Citation,
      RelationLabel::ShiftInView, RelationLabel::NoRelation};
  return labels;
}

const std::vector<CstRelation>& all_cst_relations() {
  static const std::vector<CstRelation> values = {
      CstRelation::Identity,       CstRelation::Equivalent,
      CstRelation::Subsumption,    CstRelation::Contradiction,
      CstRelation::HistoricalBackground, CstRelation::Modality,
      CstRelation::Attribution,    CstRelation::Summary,
      CstRelation::FollowUp,       CstRelation::IndirectSpeech,
      CstRelation::Elaboration,    CstRelation::Fulfillment,
      CstRelation::Description,    CstRelation::Overlap,
      CstRelation::Paraphrase,     CstRelation::Citation,
      CstRelation::ChangeOfPerspective, CstRelation::ReaderProfile};
  return values;
}

std::string to_string(RelationLabel label) {
  switch (label) {
    case RelationLabel::Elaboration: return "Elaboration";
    case RelationLabel::Redundancy: return "Redundancy";
    case RelationLabel::Citation: return "Citation";
    case RelationLabel::ShiftInView: return "Shift in View";
    case RelationLabel::NoRelation: return "No Relation";
  }
  return "?";
}

std::string to_string(CstRelation cst) {
  switch (cst) {
    case CstRelation::Identity: return "Identity";
    case CstRelation::Equivalent: return "Equivalent";
    case CstRelation::Subsumption: return "Subsumption";
    case CstRelation::Contradiction: return "Contradiction";
    case CstRelation::HistoricalBackground: return "Historical Background";
    case CstRelation::Modality: return "Modality";
    case CstRelation::Attribution: return "Attribution";
    case CstRelation::Summary: return "Summary";
    case CstRelation::FollowUp: return "Follow-up";
    case CstRelation::IndirectSpeech: return "Indirect Speech";
    case CstRelation::Elaboration: return "Elaboration";
    case CstRelation::Fulfillment: return "Fulfillment";
    case CstRelation::Description: return "Description";
    case CstRelation::Overlap: return "Overlap";
    case CstRelation::Paraphrase: return "Paraphrase";
    case CstRelation::Citation: return "Citation";
    case CstRelation::ChangeOfPerspective: return "Change of Perspective";
    case CstRelation::ReaderProfile: return "Reader Profile";
  }
  return "?";
}

int tiebreak_rank(RelationLabel label) {
  switch (label) {
    case RelationLabel::Elaboration: return 0;
    case RelationLabel::NoRelation: return 1;
    case RelationLabel::Citation: return 2;
    case RelationLabel::ShiftInView: return 3;
    case RelationLabel::Redundancy: return 4;
  }
  return 5;
}

const std::vector<RelationLabel>& canonical_label_order() {
  static const std::vector<RelationLabel> order = {
      RelationLabel::Elaboration, RelationLabel::NoRelation, RelationLabel::Citation,
      RelationLabel::ShiftInView, RelationLabel::Redundancy};
  return order;
}

std::optional<RelationLabel> parse_relation_label(const std::string& name) {
  static const std::map<std::string, RelationLabel> table = [] {
    std::map<std::string, RelationLabel> t;
    for (RelationLabel l : all_relation_labels()) t[name_key(to_string(l))] = l;
    return t;
  }();
  auto it = table.find(name_key(name));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<CstRelation> parse_cst_relation(const std::string& name) {
  static const std::map<std::string, CstRelation> table = [] {
    std::map<std::string, CstRelation> t;
    for (CstRelation c : all_cst_relations()) t[name_key(to_string(c))] = c;
    // Dataset exports sometimes spell out the partial-equivalence alias.
    t[name_key("Overlap (Partial Equivalence)")] = CstRelation::Overlap;
    t[name_key("Partial Equivalence")] = CstRelation::Overlap;
    return t;
  }();
  auto it = table.find(name_key(name));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

RelationLabel map_cst_to_relation(CstRelation cst) {
  switch (cst) {
    case CstRelation::Identity:
      return RelationLabel::Redundancy;
    case CstRelation::Citation:
      return RelationLabel::Citation;
    case CstRelation::ChangeOfPerspective:
    case CstRelation::Contradiction:
      return RelationLabel::ShiftInView;
    default:
      // Paraphrase, Modality, Subsumption, Elaboration, Indirect Speech,
      // Follow-up, Overlap, Fulfillment, Description, Historical Background,
      // Reader Profile, Attribution, plus Equivalent and Summary.
      return RelationLabel::Elaboration;
  }
}

// ---------------------------------------------------------------------------

std::string to_string(NeTag tag) {
  switch (tag) {
    case NeTag::PERSON: return "PERSON";
    case NeTag::ORGANIZATION: return "ORGANIZATION";
    case NeTag::LOCATION: return "LOCATION";
    case NeTag::MONEY: return "MONEY";
    case NeTag::PERCENT: return "PERCENT";
    case NeTag::DATE: return "DATE";
    case NeTag::TIME: return "TIME";
    case NeTag::NONE: return "NONE";
  }
  return "?";
}

std::optional<NeTag> parse_ne_tag(const std::string& name) {
  static const std::map<std::string, NeTag> table = {
      {"PERSON", NeTag::PERSON},   {"ORGANIZATION", NeTag::ORGANIZATION},
      {"LOCATION", NeTag::LOCATION}, {"MONEY", NeTag::MONEY},
      {"PERCENT", NeTag::PERCENT}, {"DATE", NeTag::DATE},
      {"TIME", NeTag::TIME},       {"NONE", NeTag::NONE},
      {"O", NeTag::NONE}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

const std::set<std::string>& pos_tagset() {
  static const std::set<std::string> tags = {
      "CC", "CD", "DT", "EX",  "FW",  "IN",   "JJ",  "JJR", "JJS", "LS",
      "MD", "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB",
      "RBR", "RBS", "RP", "SYM", "TO",  "UH",  "VB",  "VBD", "VBG", "VBN",
      "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "PUNCT"};
  return tags;
}

}  // namespace

bool is_valid_pos_tag(const std::string& tag) { return pos_tagset().count(tag) > 0; }
bool is_noun_tag(const std::string& tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}
bool is_proper_noun_tag(const std::string& tag) { return tag == "NNP" || tag == "NNPS"; }
bool is_pronoun_tag(const std::string& tag) { return tag == "PRP" || tag == "PRP$"; }
bool is_verb_tag(const std::string& tag) {
  return tag == "VB" || tag == "VBD" || tag == "VBG" || tag == "VBN" || tag == "VBP" ||
         tag == "VBZ";
}
bool is_adjective_tag(const std::string& tag) {
  return tag == "JJ" || tag == "JJR" || tag == "JJS";
}
bool is_punct_tag(const std::string& tag) { return tag == "PUNCT"; }

std::string Mention::text() const {
  std::string out;
  for (const Token& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotated corpus reader/writer
// ---------------------------------------------------------------------------

namespace {

bool mention_has_proper_noun(const Mention& m) {
  for (const Token& t : m.tokens) {
    if (is_proper_noun_tag(t.pos)) return true;
  }
  return false;
}

bool mention_is_pronoun_only(const Mention& m) {
  for (const Token& t : m.tokens) {
    if (!is_pronoun_tag(t.pos)) return false;
  }
  return !m.tokens.empty();
}

}  // namespace

namespace detail {

// Representative = longest mention containing a proper noun, then longest
// non-pronoun mention, then the longest pronoun run; ties go to the earliest.
// Mentions must be given in document order.
std::optional<Mention> pick_representative(const std::vector<Mention>& mentions) {
  const Mention* best = nullptr;
  int best_class = -1;  // 2 proper noun, 1 non-pronoun, 0 pronoun-only
  for (const Mention& m : mentions) {
    if (m.tokens.empty()) continue;
    int cls = mention_has_proper_noun(m) ? 2 : (mention_is_pronoun_only(m) ? 0 : 1);
    if (best == nullptr || cls > best_class ||
        (cls == best_class && m.tokens.size() > best->tokens.size())) {
      best = &m;
      best_class = cls;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

// Contiguous runs of tokens sharing a chain id, in document order.
std::map<std::string, std::vector<Mention>> collect_chain_mentions(
    const std::vector<Token>& tokens) {
  std::map<std::string, std::vector<Mention>> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!tokens[i].coref_chain.has_value()) {
      ++i;
      continue;
    }
    const std::string& id = *tokens[i].coref_chain;
    Mention m;
    std::size_t j = i;
    while (j < tokens.size() && tokens[j].coref_chain.has_value() &&
           *tokens[j].coref_chain == id) {
      m.tokens.push_back(tokens[j]);
      ++j;
    }
    out[id].push_back(std::move(m));
    i = j;
  }
  return out;
}

}  // namespace detail

namespace {

void finalize_sentence(AnnotatedSentence& sent, int first_line) {
  // Validate index contiguity and head references.
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    if (sent.tokens[i].index != static_cast<int>(i))
      throw ParseError("token indices must be contiguous from 0 (got " +
                           std::to_string(sent.tokens[i].index) + " at position " +
                           std::to_string(i) + ")",
                       first_line + static_cast<int>(i) + 1);
    if (sent.tokens[i].head.has_value()) {
      int h = *sent.tokens[i].head;
      if (h != kHeadRoot && (h < 0 || h >= static_cast<int>(sent.tokens.size())))
        throw ParseError("dangling head index " + std::to_string(h),
                         first_line + static_cast<int>(i) + 1);
    }
  }
  // Build per-sentence representative mentions from chain runs.
  sent.coref_chains.clear();
  for (auto& [id, mentions] : detail::collect_chain_mentions(sent.tokens)) {
    auto rep = detail::pick_representative(mentions);
    if (rep.has_value()) sent.coref_chains[id] = *rep;
  }
  if (sent.raw.empty()) {
    // No #text line; reconstruct from surfaces.
    std::string raw;
    for (const Token& t : sent.tokens) {
      if (!raw.empty()) raw.push_back(' ');
      raw += t.surface;
    }
    sent.raw = raw;
  }
}

std::optional<std::string> opt_field(const std::string& f) {
  if (f == "_") return std::nullopt;
  return f;
}

}  // namespace

std::vector<AnnotatedSentence> parse_annotated_corpus(std::istream& in) {
  std::vector<AnnotatedSentence> sentences;
  AnnotatedSentence cur;
  bool open = false;
  int first_line = 0;
  std::set<int> seen_indices;
  std::string line;
  int lineno = 0;

  auto flush = [&]() {
    if (!open) return;
    if (cur.tokens.empty())
      throw ParseError("sentence with #text but no tokens", first_line);
    finalize_sentence(cur, first_line);
    sentences.push_back(std::move(cur));
    cur = AnnotatedSentence{};
    seen_indices.clear();
    open = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = trim(line);
    if (trimmed.empty()) {
      flush();
      continue;
    }
    if (starts_with(trimmed, "#text")) {
      flush();
      std::size_t eq = trimmed.find('=');
      cur.raw = eq == std::string::npos ? "" : trim(trimmed.substr(eq + 1));
      open = true;
      first_line = lineno;
      continue;
    }
    if (trimmed[0] == '#') continue;

    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 8)
      throw ParseError("expected 8 tab-separated fields, got " + std::to_string(fields.size()),
                       lineno);
    Token tok;
    try {
      tok.index = std::stoi(fields[0]);
    } catch (const std::exception&) {
      throw ParseError("bad token index '" + fields[0] + "'", lineno);
    }
    if (seen_indices.count(tok.index))
      throw ParseError("duplicate token index " + std::to_string(tok.index), lineno);
    seen_indices.insert(tok.index);
    tok.surface = fields[1];
    tok.lemma = fields[2];
    tok.pos = fields[3];
    if (!is_valid_pos_tag(tok.pos)) throw ParseError("unknown POS tag '" + tok.pos + "'", lineno);
    auto ner = parse_ne_tag(fields[4]);
    if (!ner.has_value()) throw ParseError("unknown NER tag '" + fields[4] + "'", lineno);
    tok.ner = *ner;
    if (fields[5] != "_") {
      if (fields[5] == "ROOT" || fields[5] == "root") {
        tok.head = kHeadRoot;
      } else {
        try {
          tok.head = std::stoi(fields[5]);
        } catch (const std::exception&) {
          throw ParseError("bad head field '" + fields[5] + "'", lineno);
        }
      }
    }
    tok.deprel = opt_field(fields[6]);
    tok.coref_chain = opt_field(fields[7]);
    if (!open) {
      open = true;
      first_line = lineno;
    }
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  return sentences;
}

void write_annotated_corpus(const std::vector<AnnotatedSentence>& sentences, std::ostream& out) {
  auto field = [](const std::optional<std::string>& v) { return v.has_value() ? *v : "_"; };
  for (const AnnotatedSentence& sent : sentences) {
    out << "#text = " << sent.raw << "\n";
    for (const Token& t : sent.tokens) {
      out << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << t.pos << '\t'
          << to_string(t.ner) << '\t';
      if (t.head.has_value())
        out << (*t.head == kHeadRoot ? std::string("ROOT") : std::to_string(*t.head));
      else
        out << '_';
      out << '\t' << field(t.deprel) << '\t' << field(t.coref_chain) << "\n";
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Pair dataset / judge annotations
// ---------------------------------------------------------------------------

namespace {

AnnotatedSentence basic_sentence(const std::string& raw) {
  AnnotatedSentence s;
  s.raw = raw;
  int idx = 0;
  for (const std::string& w : split_ws(raw)) {
    Token t;
    t.surface = w;
    t.lemma = to_lower(w);
    t.pos = "NN";
    t.index = idx++;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

}  // namespace

std::vector<LabeledPair> parse_pair_dataset(std::istream& in) {
  std::vector<LabeledPair> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 4)
      throw ParseError("expected id<TAB>target<TAB>source<TAB>label, got " +
                           std::to_string(fields.size()) + " fields",
                       lineno);
    for (std::size_t i = 0; i < 4; ++i) {
      if (trim(fields[i]).empty())
        throw ParseError("missing field " + std::to_string(i + 1), lineno);
    }
    LabeledPair rec;
    rec.pair.id = trim(fields[0]);
    rec.pair.target = basic_sentence(trim(fields[1]));
    rec.pair.source = basic_sentence(trim(fields[2]));
    const std::string label_name = trim(fields[3]);
    if (auto cst = parse_cst_relation(label_name)) {
      rec.label = *cst;
    } else if (auto rel = parse_relation_label(label_name)) {
      rec.label = *rel;
    } else {
      throw ParseError("unknown label name '" + label_name + "'", lineno);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<JudgeAnnotation> parse_judge_annotations(std::istream& in) {
  std::vector<JudgeAnnotation> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("expected pair_id<TAB>judge_id<TAB>label", lineno);
    JudgeAnnotation ann;
    ann.pair_id = trim(fields[0]);
    ann.judge_id = trim(fields[1]);
    auto label = parse_relation_label(trim(fields[2]));
    if (!label.has_value()) throw ParseError("unknown label name '" + fields[2] + "'", lineno);
    ann.label = *label;
    if (!seen.insert({ann.pair_id, ann.judge_id}).second)
      throw ParseError("duplicate annotation for pair '" + ann.pair_id + "' by judge '" +
                           ann.judge_id + "'",
                       lineno);
    out.push_back(std::move(ann));
  }
  return out;
}

std::map<CstRelation, int> census(const std::vector<LabeledPair>& dataset) {
  std::map<CstRelation, int> counts;
  for (const LabeledPair& rec : dataset) {
    if (const CstRelation* cst = std::get_if<CstRelation>(&rec.label)) ++counts[*cst];
  }
  return counts;
}

}  // namespace courtrel
