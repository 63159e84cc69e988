#include "doctest.h"

#include <algorithm>
#include <random>

#include "courtrel/eval.hpp"
#include "courtrel/util.hpp"

using namespace courtrel;

namespace {

// Integer reconstruction of the published 165-pair confusion matrix:
// rows/cols Elaboration, No Relation, Citation, Shift in View.
ConfusionMatrix published_matrix() {
  ConfusionMatrix m({RelationLabel::Elaboration, RelationLabel::NoRelation,
                     RelationLabel::Citation, RelationLabel::ShiftInView});
  m.add(RelationLabel::Elaboration, RelationLabel::Elaboration, 93);
  m.add(RelationLabel::Elaboration, RelationLabel::NoRelation, 6);
  m.add(RelationLabel::NoRelation, RelationLabel::Elaboration, 5);
  m.add(RelationLabel::NoRelation, RelationLabel::NoRelation, 37);
  m.add(RelationLabel::Citation, RelationLabel::NoRelation, 1);
  m.add(RelationLabel::Citation, RelationLabel::Citation, 20);
  m.add(RelationLabel::ShiftInView, RelationLabel::Elaboration, 3);
  return m;
}

ScoredPair scored(const std::string& id, RelationLabel predicted, RelationLabel j1,
                  RelationLabel j2) {
  ScoredPair p;
  p.pair_id = id;
  p.predicted = predicted;
  p.judge_labels = {{"j1", j1}, {"j2", j2}};
  return p;
}

}  // namespace

TEST_CASE("published matrix reconstruction: marginals match the printed sums") {
  ConfusionMatrix m = published_matrix();
  CHECK(m.row_sum(RelationLabel::Elaboration) == 99);
  CHECK(m.row_sum(RelationLabel::NoRelation) == 42);
  CHECK(m.row_sum(RelationLabel::Citation) == 21);
  CHECK(m.row_sum(RelationLabel::ShiftInView) == 3);
  CHECK(m.col_sum(RelationLabel::Elaboration) == 101);
  CHECK(m.col_sum(RelationLabel::NoRelation) == 44);
  CHECK(m.col_sum(RelationLabel::Citation) == 20);
  CHECK(m.col_sum(RelationLabel::ShiftInView) == 0);
  CHECK(m.total() == 165);
}

TEST_CASE("precision_recall_f1 reproduces every defined published value") {
  MetricsReport report = precision_recall_f1(published_matrix());
  const ClassMetrics* elab = report.find(RelationLabel::Elaboration);
  REQUIRE(elab != nullptr);
  CHECK(*elab->precision == doctest::Approx(0.921).epsilon(0.0011));
  CHECK(*elab->recall == doctest::Approx(0.939).epsilon(0.0011));
  CHECK(*elab->f1 == doctest::Approx(0.930).epsilon(0.0011));

  const ClassMetrics* norel = report.find(RelationLabel::NoRelation);
  CHECK(*norel->precision == doctest::Approx(0.841).epsilon(0.0011));
  CHECK(*norel->recall == doctest::Approx(0.881).epsilon(0.0011));
  CHECK(*norel->f1 == doctest::Approx(0.861).epsilon(0.0011));

  const ClassMetrics* cite = report.find(RelationLabel::Citation);
  CHECK(*cite->precision == doctest::Approx(1.0));
  CHECK(*cite->recall == doctest::Approx(0.952).epsilon(0.0011));
  CHECK(*cite->f1 == doctest::Approx(0.975).epsilon(0.0011));

  const ClassMetrics* shift = report.find(RelationLabel::ShiftInView);
  CHECK_FALSE(shift->precision.has_value());
  REQUIRE(shift->recall.has_value());
  CHECK(*shift->recall == 0.0);
  CHECK_FALSE(shift->f1.has_value());
}

TEST_CASE("row percentages match the printed matrix within 0.05 points") {
  ConfusionMatrix m = published_matrix();
  struct Cell {
    RelationLabel row, col;
    double percent;
  };
  const Cell cells[] = {
      {RelationLabel::Elaboration, RelationLabel::Elaboration, 93.9},
      {RelationLabel::Elaboration, RelationLabel::NoRelation, 6.1},
      {RelationLabel::NoRelation, RelationLabel::Elaboration, 11.9},
      {RelationLabel::NoRelation, RelationLabel::NoRelation, 88.1},
      {RelationLabel::Citation, RelationLabel::NoRelation, 4.8},
      {RelationLabel::Citation, RelationLabel::Citation, 95.2},
      {RelationLabel::ShiftInView, RelationLabel::Elaboration, 100.0},
  };
  for (const Cell& c : cells)
    CHECK(std::abs(m.row_percent(c.row, c.col) - c.percent) < 0.05);
}

TEST_CASE("metric identities: precision*colsum and recall*rowsum hit the diagonal") {
  ConfusionMatrix m = published_matrix();
  MetricsReport report = precision_recall_f1(m);
  for (const auto& [label, metrics] : report.per_class) {
    if (metrics.precision.has_value())
      CHECK(std::lround(*metrics.precision * m.col_sum(label)) == m.at(label, label));
    if (metrics.recall.has_value())
      CHECK(std::lround(*metrics.recall * m.row_sum(label)) == m.at(label, label));
  }
}

TEST_CASE("precision_recall_f1: identity matrix and undefined columns") {
  ConfusionMatrix ident(canonical_label_order());
  for (RelationLabel l : canonical_label_order()) ident.add(l, l, 2);
  for (const auto& [label, m] : precision_recall_f1(ident).per_class) {
    CHECK(*m.precision == doctest::Approx(1.0));
    CHECK(*m.recall == doctest::Approx(1.0));
    CHECK(*m.f1 == doctest::Approx(1.0));
  }

  ConfusionMatrix skew({RelationLabel::Elaboration, RelationLabel::Citation});
  skew.add(RelationLabel::Citation, RelationLabel::Elaboration, 4);
  MetricsReport report = precision_recall_f1(skew);
  const ClassMetrics* cite = report.find(RelationLabel::Citation);
  CHECK_FALSE(cite->precision.has_value());
  CHECK(*cite->recall == 0.0);
}

TEST_CASE("build_confusion: both-agree keeps only agreed pairs") {
  std::vector<ScoredPair> records = {
      scored("a", RelationLabel::Elaboration, RelationLabel::Elaboration,
             RelationLabel::Elaboration),
      scored("b", RelationLabel::Citation, RelationLabel::Citation, RelationLabel::Elaboration),
      scored("c", RelationLabel::NoRelation, RelationLabel::NoRelation,
             RelationLabel::NoRelation),
  };
  ConfusionMatrix m = build_confusion(records, GoldPolicy::BothAgree);
  CHECK(m.total() == 2);  // the disagreement is dropped
  CHECK(m.at(RelationLabel::Elaboration, RelationLabel::Elaboration) == 1);
  CHECK(m.at(RelationLabel::NoRelation, RelationLabel::NoRelation) == 1);

  std::vector<ScoredPair> short_one = {scored("a", RelationLabel::Elaboration,
                                              RelationLabel::Elaboration,
                                              RelationLabel::Elaboration)};
  short_one[0].judge_labels.resize(1);
  CHECK_THROWS_AS(build_confusion(short_one, GoldPolicy::BothAgree), std::invalid_argument);
}

TEST_CASE("build_confusion: zero records and perfect predictions") {
  ConfusionMatrix empty = build_confusion({}, GoldPolicy::BothAgree);
  CHECK(empty.total() == 0);
  for (RelationLabel l : empty.labels()) {
    CHECK(empty.row_sum(l) == 0);
    CHECK(empty.col_sum(l) == 0);
  }

  std::vector<ScoredPair> perfect;
  for (int i = 0; i < 10; ++i) {
    RelationLabel l = canonical_label_order()[i % 5];
    perfect.push_back(scored("p" + std::to_string(i), l, l, l));
  }
  ConfusionMatrix diag = build_confusion(perfect, GoldPolicy::BothAgree);
  CHECK(diag.total() == 10);
  for (RelationLabel l : diag.labels()) CHECK(diag.at(l, l) == diag.row_sum(l));
}

TEST_CASE("build_confusion: at-least-one expands disagreements") {
  std::vector<ScoredPair> records = {
      scored("a", RelationLabel::Elaboration, RelationLabel::Elaboration,
             RelationLabel::NoRelation),
  };
  ConfusionMatrix m = build_confusion(records, GoldPolicy::AtLeastOne);
  CHECK(m.at(RelationLabel::Elaboration, RelationLabel::Elaboration) == 1);
  CHECK(m.at(RelationLabel::NoRelation, RelationLabel::Elaboration) == 1);
  CHECK(m.row_sum(RelationLabel::Elaboration) == 1);
  CHECK(m.row_sum(RelationLabel::NoRelation) == 1);
}

TEST_CASE("at_least_one_report: prediction correct when any judge chose it") {
  std::vector<ScoredPair> records = {
      scored("a", RelationLabel::Elaboration, RelationLabel::Elaboration,
             RelationLabel::NoRelation),
      scored("b", RelationLabel::Elaboration, RelationLabel::NoRelation,
             RelationLabel::NoRelation),
      scored("c", RelationLabel::NoRelation, RelationLabel::NoRelation,
             RelationLabel::Citation),
  };
  MetricsReport report = at_least_one_report(records);
  const ClassMetrics* elab = report.find(RelationLabel::Elaboration);
  CHECK(*elab->precision == doctest::Approx(0.5));  // 1 of 2 predictions judged Elaboration
  CHECK(*elab->recall == doctest::Approx(1.0));     // U = {a}
  const ClassMetrics* norel = report.find(RelationLabel::NoRelation);
  CHECK(*norel->precision == doctest::Approx(1.0));
  CHECK(*norel->recall == doctest::Approx(1.0 / 3.0));  // U = {a,b,c}, hit only c
}

TEST_CASE("overall correlations: published formulas on synthetic sets") {
  // 4 pairs, 3 agreed -> 0.75
  std::vector<ScoredPair> hh = {
      scored("a", RelationLabel::Citation, RelationLabel::Elaboration,
             RelationLabel::Elaboration),
      scored("b", RelationLabel::Citation, RelationLabel::Citation, RelationLabel::Citation),
      scored("c", RelationLabel::Citation, RelationLabel::NoRelation,
             RelationLabel::NoRelation),
      scored("d", RelationLabel::Citation, RelationLabel::Elaboration,
             RelationLabel::NoRelation),
  };
  CHECK(overall_corr_hh(hh) == doctest::Approx(0.75));

  // m values 1, 0.5, 0.5, 0 -> mean 0.5
  std::vector<ScoredPair> hs = {
      scored("a", RelationLabel::Elaboration, RelationLabel::Elaboration,
             RelationLabel::Elaboration),
      scored("b", RelationLabel::Elaboration, RelationLabel::Elaboration,
             RelationLabel::NoRelation),
      scored("c", RelationLabel::NoRelation, RelationLabel::NoRelation,
             RelationLabel::Citation),
      scored("d", RelationLabel::Citation, RelationLabel::Elaboration,
             RelationLabel::NoRelation),
  };
  CHECK(overall_corr_hs(hs) == doctest::Approx(0.5));

  // system matches both judges everywhere -> 1.0
  std::vector<ScoredPair> all = {
      scored("a", RelationLabel::Citation, RelationLabel::Citation, RelationLabel::Citation),
      scored("b", RelationLabel::NoRelation, RelationLabel::NoRelation,
             RelationLabel::NoRelation),
  };
  CHECK(overall_corr_hs(all) == doctest::Approx(1.0));
  CHECK(overall_corr_hh(all) == doctest::Approx(1.0));

  std::vector<ScoredPair> bad = {scored("x", RelationLabel::Citation, RelationLabel::Citation,
                                        RelationLabel::Citation)};
  bad[0].judge_labels.resize(1);
  CHECK_THROWS_AS(overall_corr_hh(bad), std::invalid_argument);
  CHECK_THROWS_AS(overall_corr_hs(bad), std::invalid_argument);
}

TEST_CASE("per_class_corr_hh: published Shift in View and Citation cases") {
  // n(V) = 3 pairs where both judges chose the class, n(U) = 16.
  std::vector<ScoredPair> records;
  for (int i = 0; i < 3; ++i)
    records.push_back(scored("v" + std::to_string(i), RelationLabel::Elaboration,
                             RelationLabel::ShiftInView, RelationLabel::ShiftInView));
  for (int i = 0; i < 13; ++i)
    records.push_back(scored("u" + std::to_string(i), RelationLabel::Elaboration,
                             RelationLabel::ShiftInView, RelationLabel::Elaboration));
  auto hh = per_class_corr_hh(records, RelationLabel::ShiftInView);
  REQUIRE(hh.has_value());
  CHECK(*hh == doctest::Approx(0.1875));
  CHECK(std::abs(*hh - 0.188) < 0.001);

  // Citation with V = U gives exactly 1.
  std::vector<ScoredPair> cite;
  for (int i = 0; i < 20; ++i)
    cite.push_back(scored("c" + std::to_string(i), RelationLabel::Citation,
                          RelationLabel::Citation, RelationLabel::Citation));
  CHECK(*per_class_corr_hh(cite, RelationLabel::Citation) == 1.0);

  CHECK_FALSE(per_class_corr_hh(cite, RelationLabel::Redundancy).has_value());
}

TEST_CASE("per_class_corr_hs: Jaccard of system and judge sets") {
  // S = {p1, p2}, U = {p2, p3} -> 1/3
  std::vector<ScoredPair> records = {
      scored("p1", RelationLabel::Citation, RelationLabel::Elaboration,
             RelationLabel::Elaboration),
      scored("p2", RelationLabel::Citation, RelationLabel::Citation,
             RelationLabel::Elaboration),
      scored("p3", RelationLabel::Elaboration, RelationLabel::Citation,
             RelationLabel::Citation),
  };
  auto hs = per_class_corr_hs(records, RelationLabel::Citation);
  REQUIRE(hs.has_value());
  CHECK(*hs == doctest::Approx(1.0 / 3.0));

  // S = U nonempty -> 1; symmetric by construction.
  std::vector<ScoredPair> equal = {
      scored("q1", RelationLabel::ShiftInView, RelationLabel::ShiftInView,
             RelationLabel::NoRelation),
  };
  CHECK(*per_class_corr_hs(equal, RelationLabel::ShiftInView) == 1.0);

  // S empty, U nonempty -> 0; both empty -> undefined.
  std::vector<ScoredPair> miss = {
      scored("r1", RelationLabel::Elaboration, RelationLabel::ShiftInView,
             RelationLabel::ShiftInView),
  };
  CHECK(*per_class_corr_hs(miss, RelationLabel::ShiftInView) == 0.0);
  CHECK_FALSE(per_class_corr_hs(miss, RelationLabel::Redundancy).has_value());
}

TEST_CASE("overall_corr_hh equals the fraction of pairs kept under both-agree") {
  std::mt19937_64 rng(77);
  std::vector<ScoredPair> records;
  for (int i = 0; i < 60; ++i) {
    RelationLabel j1 = canonical_label_order()[bounded_u64(rng, 5)];
    RelationLabel j2 = canonical_label_order()[bounded_u64(rng, 5)];
    RelationLabel pred = canonical_label_order()[bounded_u64(rng, 5)];
    records.push_back(scored("r" + std::to_string(i), pred, j1, j2));
  }
  ConfusionMatrix m = build_confusion(records, GoldPolicy::BothAgree);
  CHECK(overall_corr_hh(records) ==
        doctest::Approx(static_cast<double>(m.total()) / records.size()));
}

TEST_CASE("metrics are order-invariant") {
  std::mt19937_64 rng(123);
  std::vector<ScoredPair> records;
  for (int i = 0; i < 40; ++i) {
    RelationLabel j1 = canonical_label_order()[bounded_u64(rng, 5)];
    RelationLabel j2 = canonical_label_order()[bounded_u64(rng, 5)];
    RelationLabel pred = canonical_label_order()[bounded_u64(rng, 5)];
    records.push_back(scored("r" + std::to_string(i), pred, j1, j2));
  }
  std::vector<ScoredPair> shuffled = records;
  deterministic_shuffle(shuffled, rng);
  CHECK(overall_corr_hh(records) == overall_corr_hh(shuffled));
  CHECK(overall_corr_hs(records) == overall_corr_hs(shuffled));
  CHECK(build_confusion(records, GoldPolicy::BothAgree) ==
        build_confusion(shuffled, GoldPolicy::BothAgree));
  for (RelationLabel l : canonical_label_order()) {
    CHECK(per_class_corr_hh(records, l) == per_class_corr_hh(shuffled, l));
    CHECK(per_class_corr_hs(records, l) == per_class_corr_hs(shuffled, l));
  }
}

TEST_CASE("format helpers carry explicit undefined markers") {
  ConfusionMatrix m = published_matrix();
  std::string grid = format_confusion(m);
  CHECK(grid.find("Shift in View") != std::string::npos);
  CHECK(grid.find("165") != std::string::npos);
  std::string metrics = format_metrics(precision_recall_f1(m));
  CHECK(metrics.find("undefined") != std::string::npos);
}

TEST_CASE("reference study constants are documented, not asserted") {
  CHECK(kReferenceOverallCorrHumanHuman == 0.805);
  CHECK(kReferenceOverallCorrHumanSystem == 0.813);
}
