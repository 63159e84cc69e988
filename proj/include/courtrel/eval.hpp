#pragma once

#include <optional>
#include <string>
#include <vector>

#include "courtrel/corpus.hpp"

namespace courtrel {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<RelationLabel> labels);

  void add(RelationLabel actual, RelationLabel predicted, long count = 1);
  long at(RelationLabel actual, RelationLabel predicted) const;
  long row_sum(RelationLabel actual) const;
  long col_sum(RelationLabel predicted) const;
  long total() const;
  const std::vector<RelationLabel>& labels() const { return labels_; }

  // Row percentages (actual -> predicted), 0 for empty rows.
  double row_percent(RelationLabel actual, RelationLabel predicted) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int index_of(RelationLabel label) const;
  std::vector<RelationLabel> labels_;
  std::vector<long> counts_;  // row-major
};

// Undefined cells (zero denominators) stay explicit, mirroring "-" in
// printed reports; they are never coerced to 0.
struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct MetricsReport {
  std::vector<std::pair<RelationLabel, ClassMetrics>> per_class;

  const ClassMetrics* find(RelationLabel label) const;
};

MetricsReport precision_recall_f1(const ConfusionMatrix& matrix);

// Slim evaluation view of a classified pair.
struct ScoredPair {
  std::string pair_id;
  RelationLabel predicted = RelationLabel::NoRelation;
  std::vector<std::pair<std::string, RelationLabel>> judge_labels;  // (judge_id, label)
};

enum class GoldPolicy { BothAgree, AtLeastOne };

std::string to_string(GoldPolicy policy);
std::optional<GoldPolicy> parse_gold_policy(const std::string& name);

// BothAgree keeps only pairs whose judges all gave the same label (that
// label is the gold row); pairs need at least two annotations. AtLeastOne
// expands a pair into one row per distinct judged label, so row sums count
// pairs where some judge chose the label.
ConfusionMatrix build_confusion(const std::vector<ScoredPair>& records, GoldPolicy policy);

// Set-based variant for the at-least-one reading: precision counts a
// prediction correct when any judge chose it, recall divides by the pairs
// where some judge chose the class.
MetricsReport at_least_one_report(const std::vector<ScoredPair>& records);

// Fraction of pairs whose two judges agree. Every record needs exactly two
// judge annotations.
double overall_corr_hh(const std::vector<ScoredPair>& records);

// Mean of 1.0 / 0.5 / 0.0 per pair for both / one / neither judge matching
// the system label.
double overall_corr_hs(const std::vector<ScoredPair>& records);

// n(V)/n(U) where U = pairs where at least one judge chose the class and
// V = pairs where both did; empty U gives an undefined result.
std::optional<double> per_class_corr_hh(const std::vector<ScoredPair>& records,
                                        RelationLabel label);

// Jaccard of the system set and the at-least-one-judge set; undefined when
// both are empty.
std::optional<double> per_class_corr_hs(const std::vector<ScoredPair>& records,
                                        RelationLabel label);

// Correlation values reported for the original 200-pair human-judge study;
// shipped for report context only and never asserted by tests.
inline constexpr double kReferenceOverallCorrHumanHuman = 0.805;
inline constexpr double kReferenceOverallCorrHumanSystem = 0.813;

// Tab-separated grid with marginals / per-class rows with explicit
// "undefined" tokens.
std::string format_confusion(const ConfusionMatrix& matrix);
std::string format_metrics(const MetricsReport& report);

}  // namespace courtrel
