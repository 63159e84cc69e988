#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "courtrel/annotate.hpp"
#include "courtrel/citation_rules.hpp"
#include "courtrel/corpus.hpp"
#include "courtrel/eval.hpp"
#include "courtrel/features.hpp"
#include "courtrel/svm.hpp"

namespace courtrel {

inline constexpr int kRecordStoreVersion = 1;

struct PairRecord {
  std::string pair_id;
  std::string transcript_id;
  std::string target_text;
  std::string source_text;
  RelationLabel predicted = RelationLabel::NoRelation;
  std::string provenance;  // "svm" or "rule:<id>"
  std::optional<std::vector<std::pair<RelationLabel, double>>> scores;
  std::optional<FeatureVector> features;
  std::vector<JudgeAnnotation> judge_annotations;

  bool operator==(const PairRecord&) const = default;
};

// Annotates both texts and runs the pronoun-linking fallback so the pair is
// ready for feature extraction.
SentencePair make_annotated_pair(const std::string& id, const std::string& target_text,
                                 const std::string& source_text,
                                 const AnnotationResources& resources);

// Citation gate first: a source sentence matching a citation rule yields a
// Citation record with rule provenance and no feature extraction. Everything
// else goes through the model, recording scores and the feature vector.
PairRecord classify_pair(const SentencePair& pair, const SvmModel& model,
                         const CitationRuleSet& rules, const AnnotationResources& resources,
                         const TransitionResources& transitions,
                         const SimilarityLexicon& lexicon);

// Consecutive-sentence pairs (target = earlier sentence) with ids
// <transcript_id>:<index>. window > 1 also pairs sentences up to that many
// positions apart. jobs > 1 classifies pairs concurrently; output order is
// by pair index either way.
std::vector<PairRecord> run_transcript(const std::string& transcript_id,
                                       const std::string& text, const SvmModel& model,
                                       const CitationRuleSet& rules,
                                       const AnnotationResources& resources,
                                       const TransitionResources& transitions,
                                       const SimilarityLexicon& lexicon, int window = 1,
                                       int jobs = 1,
                                       const TranscriptOptions& transcript_options = {});

struct RecordFilter {
  std::optional<std::string> transcript_id;
  std::optional<RelationLabel> predicted;
  std::optional<std::string> provenance;
};

// Append-only line-delimited store keyed by pair_id, with a schema-versioned
// header line and a pair_id index side-file (<path>.idx).
class RecordStore {
 public:
  explicit RecordStore(std::string path);

  void append(const PairRecord& record);
  void append_all(const std::vector<PairRecord>& records);
  std::vector<PairRecord> load(const RecordFilter& filter = {}) const;
  // Merges judge annotations into existing records and rewrites the store.
  // Unknown pair ids and duplicate (pair_id, judge_id) entries are errors.
  void attach_annotations(const std::vector<JudgeAnnotation>& annotations);

  const std::string& path() const { return path_; }

 private:
  std::vector<std::string> known_ids() const;
  std::string path_;
};

std::string record_to_json_line(const PairRecord& record);
PairRecord record_from_json_line(const std::string& line, int lineno);

// Pure merge used by RecordStore::attach_annotations and by evaluation.
// Errors on unknown pair ids and duplicate (pair_id, judge_id) entries.
std::vector<PairRecord> merge_annotations(std::vector<PairRecord> records,
                                          const std::vector<JudgeAnnotation>& annotations);

// Seeded uniform shuffle of all records, first n taken and partitioned in
// order into n/cluster_size clusters. Errors when fewer than n records exist
// or cluster_size does not divide n.
std::vector<std::vector<PairRecord>> sample_for_annotation(std::vector<PairRecord> records,
                                                           int n, std::uint64_t seed,
                                                           int cluster_size = 5);

// Export for judges: cluster, pair id, both texts and an empty label column.
std::string format_annotation_export(const std::vector<std::vector<PairRecord>>& clusters);

std::vector<ScoredPair> as_scored(const std::vector<PairRecord>& records);

}  // namespace courtrel
