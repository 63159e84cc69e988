#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "courtrel/corpus.hpp"

namespace courtrel {

struct AnnotationResources {
  std::set<std::string> stopwords;                 // lowercase
  std::map<std::string, std::string> pos_lexicon;  // lowercase word -> POS tag
  std::map<std::string, NeTag> ne_gazetteer;       // phrase -> entity type
  std::string version;

  // Built-in resources sufficient for the bundled fixtures; production runs
  // load the resource directory instead.
  static AnnotationResources builtin();
};

AnnotationResources load_annotation_resources(const std::string& dir);

struct RawToken {
  std::string text;
  std::size_t begin = 0;  // character offsets into the input
  std::size_t end = 0;

  bool operator==(const RawToken&) const = default;
};

struct TokenizerOptions {
  // Word units whose trailing period stays attached ("v.", "U.", "S.", ...).
  std::set<std::string> abbreviation_units;

  TokenizerOptions();
};

// Splits punctuation from words except inside hyphenated/numeric compounds
// and configured abbreviation units. Token texts are substrings of the
// input, so joining them with the original inter-token characters
// reproduces it exactly.
std::vector<RawToken> tokenize(const std::string& text,
                               const TokenizerOptions& options = TokenizerOptions());

bool is_quote_token(const std::string& surface);
bool is_punct_surface(const std::string& surface);
bool is_pronoun_token(const Token& token);

// Lemma (plural/inflection stripping with an irregulars table), POS
// (lexicon, then suffix rules, then NN) and NER (longest-match gazetteer,
// then MONEY/PERCENT/DATE/TIME rules). head/deprel are left absent.
AnnotatedSentence annotate_sentence(const std::string& text, const AnnotationResources& resources);

// Links each third-person pronoun to the nearest preceding PERSON or
// ORGANIZATION mention, scanning target then source. Returns the pair with
// chain ids and representative mentions filled in; pronouns with no
// candidate stay unchained.
SentencePair naive_coref(const SentencePair& pair);

// Replaces every chained pronoun with its chain's representative mention,
// renumbering token indices and remapping heads. Representatives are merged
// across both sentences, so a source pronoun can resolve to a target
// mention. Throws std::invalid_argument for a chain id with no
// representative anywhere in the pair.
SentencePair resolve_coreferences(const SentencePair& pair);

// Order-preserving filter; comparison is case-insensitive on the surface.
std::vector<Token> remove_stopwords(const std::vector<Token>& tokens,
                                    const AnnotationResources& resources);

}  // namespace courtrel
