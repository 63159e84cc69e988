#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace courtrel {

// ---------------------------------------------------------------------------
// Relation labels
// ---------------------------------------------------------------------------

enum class RelationLabel { Elaboration, Redundancy, Citation, ShiftInView, NoRelation };

// All 18 source relation types that can appear in labeled pair datasets.
enum class CstRelation {
  Identity,
  Equivalent,
  Subsumption,
  Contradiction,
  HistoricalBackground,
  Modality,
  Attribution,
  Summary,
  FollowUp,
  IndirectSpeech,
  Elaboration,
  Fulfillment,
  Description,
  Overlap,
  Paraphrase,
  Citation,
  ChangeOfPerspective,
  ReaderProfile,
};

inline constexpr int kRelationLabelCount = 5;
inline constexpr int kCstRelationCount = 18;

const std::vector<RelationLabel>& all_relation_labels();
const std::vector<CstRelation>& all_cst_relations();

std::string to_string(RelationLabel label);
std::string to_string(CstRelation cst);

// Fixed priority used to break score ties and to order reports:
// Elaboration < NoRelation < Citation < ShiftInView < Redundancy.
int tiebreak_rank(RelationLabel label);
const std::vector<RelationLabel>& canonical_label_order();

// Case-insensitive, punctuation-insensitive name lookup ("Follow-up",
// "follow up" and "FollowUp" all resolve). Empty optional means unknown.
std::optional<RelationLabel> parse_relation_label(const std::string& name);
std::optional<CstRelation> parse_cst_relation(const std::string& name);

// Total map from source relation types onto the five output labels.
RelationLabel map_cst_to_relation(CstRelation cst);

// ---------------------------------------------------------------------------
// Annotated sentences
// ---------------------------------------------------------------------------

enum class NeTag { PERSON, ORGANIZATION, LOCATION, MONEY, PERCENT, DATE, TIME, NONE };

std::string to_string(NeTag tag);
std::optional<NeTag> parse_ne_tag(const std::string& name);

// Penn-style tag inventory plus PUNCT. Tags are kept as validated strings.
bool is_valid_pos_tag(const std::string& tag);
bool is_noun_tag(const std::string& tag);     // NN NNS NNP NNPS
bool is_proper_noun_tag(const std::string& tag);
bool is_pronoun_tag(const std::string& tag);  // PRP PRP$
bool is_verb_tag(const std::string& tag);     // VB VBD VBG VBN VBP VBZ
bool is_adjective_tag(const std::string& tag);
bool is_punct_tag(const std::string& tag);

inline constexpr int kHeadRoot = -1;  // distinguished ROOT marker for Token::head

struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;              // entry of the documented tagset
  NeTag ner = NeTag::NONE;
  int index = 0;                // 0-based position in the sentence
  std::optional<int> head;      // token index, or kHeadRoot
  std::optional<std::string> deprel;
  std::optional<std::string> coref_chain;

  bool operator==(const Token&) const = default;
};

// An owned copy of a mention's tokens (the representative of a chain).
struct Mention {
  std::vector<Token> tokens;

  std::string text() const;  // surfaces joined with single spaces
  bool operator==(const Mention&) const = default;
};

struct AnnotatedSentence {
  std::string raw;
  std::vector<Token> tokens;
  std::map<std::string, Mention> coref_chains;  // chain id -> representative mention

  bool operator==(const AnnotatedSentence&) const = default;
};

// Ordered pair. `source` is the later sentence and is the one compared
// against `target`; every asymmetric feature uses this orientation.
struct SentencePair {
  std::string id;
  AnnotatedSentence target;
  AnnotatedSentence source;

  bool operator==(const SentencePair&) const = default;
};

struct JudgeAnnotation {
  std::string pair_id;
  std::string judge_id;
  RelationLabel label = RelationLabel::NoRelation;

  bool operator==(const JudgeAnnotation&) const = default;
};

namespace detail {
// Contiguous runs of tokens sharing a chain id, in document order.
std::map<std::string, std::vector<Mention>> collect_chain_mentions(
    const std::vector<Token>& tokens);
// Representative = longest mention containing a proper noun, then longest
// non-pronoun mention, then the longest pronoun run; ties go to the earliest.
std::optional<Mention> pick_representative(const std::vector<Mention>& mentions);
}  // namespace detail

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

// Tab-separated token files:
//   #text = <raw sentence>
//   index<TAB>surface<TAB>lemma<TAB>pos<TAB>ner<TAB>head<TAB>deprel<TAB>coref_chain
// with a blank line after each sentence and `_` for absent optional fields.
// head is a token index or the literal ROOT.
std::vector<AnnotatedSentence> parse_annotated_corpus(std::istream& in);
void write_annotated_corpus(const std::vector<AnnotatedSentence>& sentences, std::ostream& out);

// Labeled sentence pairs, one record per line:
//   id<TAB>target_text<TAB>source_text<TAB>label
// `#` comment lines and blank lines are skipped. Labels resolve against the
// source relation names first, then the five output labels ("No Relation").
using PairLabel = std::variant<CstRelation, RelationLabel>;

struct LabeledPair {
  SentencePair pair;  // sentences carry raw text plus a plain whitespace tokenization
  PairLabel label;
};

std::vector<LabeledPair> parse_pair_dataset(std::istream& in);

// pair_id<TAB>judge_id<TAB>label, same comment/blank-line rules.
std::vector<JudgeAnnotation> parse_judge_annotations(std::istream& in);

// Histogram over the source relation types. Entries labeled directly with an
// output label (e.g. "No Relation") are not counted here.
std::map<CstRelation, int> census(const std::vector<LabeledPair>& dataset);

// ---------------------------------------------------------------------------
// Transcript preprocessing
// ---------------------------------------------------------------------------

struct TranscriptOptions {
  // Words that never end a sentence. Multi-word entries ("U. S.") are also
  // honored unit by unit.
  std::vector<std::string> abbreviations;

  TranscriptOptions();
};

// Single-word abbreviation units derived from an abbreviation list
// ("U. S." contributes "U." and "S.").
std::vector<std::string> abbreviation_units(const std::vector<std::string>& abbreviations);

// One abbreviation per line, `#` comments allowed.
std::vector<std::string> load_abbreviation_file(const std::string& path);

bool is_heading_line(const std::string& line);

// Strips case titles, section headings and page numbers, then splits the
// remaining text into sentences with abbreviation-aware boundaries.
std::vector<std::string> load_transcript(const std::string& text,
                                         const TranscriptOptions& options = TranscriptOptions());

}  // namespace courtrel
