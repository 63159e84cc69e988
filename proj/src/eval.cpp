#include "courtrel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace courtrel {

ConfusionMatrix::ConfusionMatrix(std::vector<RelationLabel> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {
  std::set<RelationLabel> distinct(labels_.begin(), labels_.end());
  if (distinct.size() != labels_.size())
    throw std::invalid_argument("confusion matrix labels must be distinct");
}

int ConfusionMatrix::index_of(RelationLabel label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<int>(i);
  }
  throw std::invalid_argument("label '" + to_string(label) + "' not in confusion matrix");
}

void ConfusionMatrix::add(RelationLabel actual, RelationLabel predicted, long count) {
  if (count < 0) throw std::invalid_argument("confusion counts must be non-negative");
  counts_[index_of(actual) * labels_.size() + index_of(predicted)] += count;
}

long ConfusionMatrix::at(RelationLabel actual, RelationLabel predicted) const {
  return counts_[index_of(actual) * labels_.size() + index_of(predicted)];
}

long ConfusionMatrix::row_sum(RelationLabel actual) const {
  int r = index_of(actual);
  long sum = 0;
  for (std::size_t c = 0; c < labels_.size(); ++c) sum += counts_[r * labels_.size() + c];
  return sum;
}

long ConfusionMatrix::col_sum(RelationLabel predicted) const {
  int c = index_of(predicted);
  long sum = 0;
  for (std::size_t r = 0; r < labels_.size(); ++r) sum += counts_[r * labels_.size() + c];
  return sum;
}

long ConfusionMatrix::total() const {
  long sum = 0;
  for (long v : counts_) sum += v;
  return sum;
}

double ConfusionMatrix::row_percent(RelationLabel actual, RelationLabel predicted) const {
  long rs = row_sum(actual);
  if (rs == 0) return 0.0;
  return 100.0 * static_cast<double>(at(actual, predicted)) / static_cast<double>(rs);
}

const ClassMetrics* MetricsReport::find(RelationLabel label) const {
  for (const auto& [l, m] : per_class) {
    if (l == label) return &m;
  }
  return nullptr;
}

MetricsReport precision_recall_f1(const ConfusionMatrix& matrix) {
  MetricsReport report;
  for (RelationLabel label : matrix.labels()) {
    ClassMetrics m;
    long diag = matrix.at(label, label);
    long col = matrix.col_sum(label);
    long row = matrix.row_sum(label);
    if (col > 0) m.precision = static_cast<double>(diag) / col;
    if (row > 0) m.recall = static_cast<double>(diag) / row;
    if (m.precision.has_value() && m.recall.has_value() && *m.precision + *m.recall > 0.0)
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    report.per_class.emplace_back(label, m);
  }
  return report;
}

std::string to_string(GoldPolicy policy) {
  return policy == GoldPolicy::BothAgree ? "both-agree" : "at-least-one";
}

std::optional<GoldPolicy> parse_gold_policy(const std::string& name) {
  if (name == "both-agree") return GoldPolicy::BothAgree;
  if (name == "at-least-one") return GoldPolicy::AtLeastOne;
  return std::nullopt;
}

namespace {

std::set<RelationLabel> judged_labels(const ScoredPair& record) {
  std::set<RelationLabel> out;
  for (const auto& [judge, label] : record.judge_labels) out.insert(label);
  return out;
}

}  // namespace

ConfusionMatrix build_confusion(const std::vector<ScoredPair>& records, GoldPolicy policy) {
  ConfusionMatrix matrix(canonical_label_order());
  for (const ScoredPair& rec : records) {
    if (policy == GoldPolicy::BothAgree) {
      if (rec.judge_labels.size() < 2)
        throw std::invalid_argument("pair '" + rec.pair_id +
                                    "' needs at least 2 judge annotations under both-agree");
      std::set<RelationLabel> labels = judged_labels(rec);
      if (labels.size() != 1) continue;  // judges disagree; pair is dropped
      matrix.add(*labels.begin(), rec.predicted);
    } else {
      for (RelationLabel g : judged_labels(rec)) matrix.add(g, rec.predicted);
    }
  }
  return matrix;
}

MetricsReport at_least_one_report(const std::vector<ScoredPair>& records) {
  MetricsReport report;
  for (RelationLabel label : canonical_label_order()) {
    long predicted = 0;
    long judged = 0;
    long hit = 0;
    for (const ScoredPair& rec : records) {
      bool in_u = judged_labels(rec).count(label) > 0;
      bool in_s = rec.predicted == label;
      if (in_s) ++predicted;
      if (in_u) ++judged;
      if (in_s && in_u) ++hit;
    }
    ClassMetrics m;
    if (predicted > 0) m.precision = static_cast<double>(hit) / predicted;
    if (judged > 0) m.recall = static_cast<double>(hit) / judged;
    if (m.precision.has_value() && m.recall.has_value() && *m.precision + *m.recall > 0.0)
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    report.per_class.emplace_back(label, m);
  }
  return report;
}

namespace {

void require_two_judges(const ScoredPair& rec) {
  if (rec.judge_labels.size() != 2)
    throw std::invalid_argument("pair '" + rec.pair_id +
                                "' must carry exactly 2 judge annotations");
}

}  // namespace

double overall_corr_hh(const std::vector<ScoredPair>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  double sum = 0.0;
  for (const ScoredPair& rec : records) {
    require_two_judges(rec);
    sum += rec.judge_labels[0].second == rec.judge_labels[1].second ? 1.0 : 0.0;
  }
  return sum / static_cast<double>(records.size());
}

double overall_corr_hs(const std::vector<ScoredPair>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  double sum = 0.0;
  for (const ScoredPair& rec : records) {
    require_two_judges(rec);
    int matches = 0;
    for (const auto& [judge, label] : rec.judge_labels) matches += label == rec.predicted;
    sum += matches == 2 ? 1.0 : (matches == 1 ? 0.5 : 0.0);
  }
  return sum / static_cast<double>(records.size());
}

std::optional<double> per_class_corr_hh(const std::vector<ScoredPair>& records,
                                        RelationLabel label) {
  long u = 0;
  long v = 0;
  for (const ScoredPair& rec : records) {
    std::set<RelationLabel> labels = judged_labels(rec);
    bool any = labels.count(label) > 0;
    bool all = any && labels.size() == 1 && rec.judge_labels.size() >= 2;
    if (any) ++u;
    if (all) ++v;
  }
  if (u == 0) return std::nullopt;
  return static_cast<double>(v) / static_cast<double>(u);
}

std::optional<double> per_class_corr_hs(const std::vector<ScoredPair>& records,
                                        RelationLabel label) {
  long s_or_u = 0;
  long s_and_u = 0;
  for (const ScoredPair& rec : records) {
    bool in_s = rec.predicted == label;
    bool in_u = judged_labels(rec).count(label) > 0;
    if (in_s || in_u) ++s_or_u;
    if (in_s && in_u) ++s_and_u;
  }
  if (s_or_u == 0) return std::nullopt;
  return static_cast<double>(s_and_u) / static_cast<double>(s_or_u);
}

std::string format_confusion(const ConfusionMatrix& matrix) {
  std::ostringstream os;
  os << "actual\\predicted";
  for (RelationLabel l : matrix.labels()) os << '\t' << to_string(l);
  os << "\tsum\n";
  for (RelationLabel r : matrix.labels()) {
    os << to_string(r);
    for (RelationLabel c : matrix.labels()) os << '\t' << matrix.at(r, c);
    os << '\t' << matrix.row_sum(r) << '\n';
  }
  os << "sum";
  for (RelationLabel c : matrix.labels()) os << '\t' << matrix.col_sum(c);
  os << '\t' << matrix.total() << '\n';
  return os.str();
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v.has_value()) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::string format_metrics(const MetricsReport& report) {
  std::ostringstream os;
  os << "class\tprecision\trecall\tf1\n";
  for (const auto& [label, m] : report.per_class) {
    os << to_string(label) << '\t' << cell(m.precision) << '\t' << cell(m.recall) << '\t'
       << cell(m.f1) << '\n';
  }
  return os.str();
}

}  // namespace courtrel
