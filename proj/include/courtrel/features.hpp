#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "courtrel/annotate.hpp"
#include "courtrel/corpus.hpp"

namespace courtrel {

inline constexpr int kFeatureCount = 16;

// Manifest order; embedded in every serialized model and feature dump.
const std::array<std::string, kFeatureCount>& feature_names();

// All components lie in [0,1]; trans_elab, trans_followup and attribution
// are 0/1.
struct FeatureVector {
  double word_cos = 0.0;
  double noun_cos = 0.0;
  double verb_cos = 0.0;
  double adj_cos = 0.0;
  double wor_t = 0.0;
  double wor_s = 0.0;
  double subj_overlap = 0.0;
  double obj_overlap = 0.0;
  double subj_noun_overlap = 0.0;
  double lcsr = 0.0;
  double ne_ratio = 0.0;
  double semantic_sim = 0.0;
  double trans_elab = 0.0;
  double trans_followup = 0.0;
  double ldr = 0.0;
  double attribution = 0.0;

  std::array<double, kFeatureCount> to_array() const;
  static FeatureVector from_array(const std::array<double, kFeatureCount>& values);

  bool operator==(const FeatureVector&) const = default;
};

struct TransitionResources {
  std::vector<std::string> elaboration_words;    // lowercase single words
  std::vector<std::string> elaboration_phrases;  // lowercase multi-word phrases
  std::vector<std::string> followup_words;
  std::vector<std::string> followup_phrases;

  static TransitionResources builtin();
};

TransitionResources load_transition_resources(const std::string& dir);

// word1<TAB>word2<TAB>similarity rows with similarity in [0,1]; lookups are
// symmetric and fall back to exact-match (1) / mismatch (0).
class SimilarityLexicon {
 public:
  SimilarityLexicon() = default;
  static SimilarityLexicon load(const std::string& path);
  static SimilarityLexicon from_rows(
      const std::vector<std::tuple<std::string, std::string, double>>& rows);

  void add(const std::string& a, const std::string& b, double sim);
  double similarity(const std::string& a, const std::string& b) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
};

// Cosine over frequency vectors: dot / (|a| * |b|); 0 when either bag is
// empty.
double cosine_similarity(const std::vector<std::string>& bag_s,
                         const std::vector<std::string>& bag_t);

struct PosCosines {
  double word = 0.0;
  double noun = 0.0;
  double verb = 0.0;
  double adj = 0.0;
};

// Bags are lowercased surfaces with punctuation dropped and stopwords
// removed. The noun bag includes pronouns; the verb bag drops tokens whose
// lemma is be/do/has/have; the adjective bag keeps comparatives and
// superlatives.
PosCosines pos_filtered_cosines(const SentencePair& pair, const AnnotationResources& resources);

// (wor_t, wor_s) over distinct non-punctuation words, stopwords removed.
std::pair<double, double> word_overlap_ratios(const SentencePair& pair,
                                              const AnnotationResources& resources);

struct GrammaticalOverlap {
  double subj_overlap = 0.0;
  double obj_overlap = 0.0;
  double subj_noun_overlap = 0.0;
};

// Subjects/objects come from dependency relations when present (any *subj
// relation; obj/dobj/iobj). Without dependencies a shallow heuristic is
// used: subjects are nouns/pronouns before the first non-auxiliary verb,
// objects are nouns after it. All ratios divide by the source-side count
// and are 0 when it is 0.
GrammaticalOverlap grammatical_overlap(const SentencePair& pair);

// Longest contiguous common token run (case-insensitive surfaces, stopwords
// retained), scored by character length when rendered with single spaces,
// divided by the source rendered the same way.
double lcs_ratio(const SentencePair& pair);

// Entity-mention count ratio NE(S)/max(NE(S),NE(T)); 0 when both are 0.
double ne_ratio(const SentencePair& pair);

// Per source noun the best lexicon similarity to any target noun, likewise
// for verbs, averaged over all scored terms; 0 when the source has neither.
double semantic_similarity(const SentencePair& pair, const AnnotationResources& resources,
                           const SimilarityLexicon& lexicon);

// trans_elab: first word in the elaboration word list, or an elaboration
// phrase starting within the first six words. trans_followup: first word in
// the follow-up word list, or a follow-up phrase at the sentence start.
std::pair<double, double> transition_features(const AnnotatedSentence& source,
                                              const TransitionResources& transitions);

// 0.5 + (len(S)-len(T)) / (2*max(len(S),len(T))), word counts; 0.5 when both
// are empty.
double length_difference_ratio(const SentencePair& pair);

// 1 iff a quoted span (1..6 tokens between matching quote tokens) in one
// sentence occurs, case-insensitively, as a word run in the other.
double attribution_feature(const SentencePair& pair);

FeatureVector extract_features(const SentencePair& pair, const AnnotationResources& resources,
                               const TransitionResources& transitions,
                               const SimilarityLexicon& lexicon);

}  // namespace courtrel
