#include "doctest.h"

#include <sstream>

#include "courtrel/corpus.hpp"
#include "courtrel/util.hpp"

using namespace courtrel;

namespace {

const char* kTwoSentenceCorpus =
    "#text = The court ruled against the motion\n"
    "0\tThe\tthe\tDT\tNONE\t1\tdet\t_\n"
    "1\tcourt\tcourt\tNN\tNONE\t2\tnsubj\t_\n"
    "2\truled\trule\tVBD\tNONE\tROOT\troot\t_\n"
    "3\tagainst\tagainst\tIN\tNONE\t4\tcase\t_\n"
    "4\tmotion\tmotion\tNN\tNONE\t2\tobl\t_\n"
    "\n"
    "#text = Lee moved to Korea with his parents\n"
    "0\tLee\tlee\tNNP\tPERSON\t1\tnsubj\tc0\n"
    "1\tmoved\tmove\tVBD\tNONE\tROOT\troot\t_\n"
    "2\tto\tto\tTO\tNONE\t3\tcase\t_\n"
    "3\tKorea\tkorea\tNNP\tLOCATION\t1\tobl\t_\n"
    "4\twith\twith\tIN\tNONE\t6\tcase\t_\n"
    "5\this\this\tPRP$\tNONE\t6\tnmod:poss\tc0\n"
    "6\tparents\tparent\tNNS\tNONE\t1\tobl\t_\n"
    "\n";

}  // namespace

TEST_CASE("parse_annotated_corpus: empty stream gives empty list") {
  std::istringstream in("");
  CHECK(parse_annotated_corpus(in).empty());
}

TEST_CASE("parse_annotated_corpus: two-sentence fixture preserves token counts") {
  std::istringstream in(kTwoSentenceCorpus);
  std::vector<AnnotatedSentence> sentences = parse_annotated_corpus(in);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].tokens.size() == 5);
  CHECK(sentences[1].tokens.size() == 7);
  CHECK(sentences[0].raw == "The court ruled against the motion");
  CHECK(sentences[1].tokens[0].ner == NeTag::PERSON);
  CHECK(sentences[1].tokens[1].head == kHeadRoot);
  CHECK(sentences[1].tokens[5].coref_chain == "c0");
  // Chain c0's representative is the proper-noun mention, not the pronoun.
  REQUIRE(sentences[1].coref_chains.count("c0") == 1);
  CHECK(sentences[1].coref_chains.at("c0").text() == "Lee");
}

TEST_CASE("parse_annotated_corpus: dangling head reports the line") {
  std::string text =
      "#text = bad\n"
      "0\ta\ta\tDT\tNONE\t99\t_\t_\n"
      "1\tb\tb\tNN\tNONE\t_\t_\t_\n"
      "\n";
  std::istringstream in(text);
  try {
    parse_annotated_corpus(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("head") != std::string::npos);
  }
}

TEST_CASE("parse_annotated_corpus: duplicate index and unknown tags are errors") {
  {
    std::istringstream in(
        "0\ta\ta\tDT\tNONE\t_\t_\t_\n"
        "0\tb\tb\tNN\tNONE\t_\t_\t_\n");
    CHECK_THROWS_AS(parse_annotated_corpus(in), ParseError);
  }
  {
    std::istringstream in("0\ta\ta\tDT\tPLANET\t_\t_\t_\n");
    CHECK_THROWS_AS(parse_annotated_corpus(in), ParseError);
  }
  {
    std::istringstream in("0\ta\ta\tZZ\tNONE\t_\t_\t_\n");
    CHECK_THROWS_AS(parse_annotated_corpus(in), ParseError);
  }
  {
    std::istringstream in("0\ta\ta\tDT\n");
    CHECK_THROWS_AS(parse_annotated_corpus(in), ParseError);
  }
}

TEST_CASE("annotated corpus round-trips through its canonical form") {
  std::istringstream in(kTwoSentenceCorpus);
  std::vector<AnnotatedSentence> first = parse_annotated_corpus(in);
  std::ostringstream out;
  write_annotated_corpus(first, out);
  std::istringstream in2(out.str());
  std::vector<AnnotatedSentence> second = parse_annotated_corpus(in2);
  CHECK(first == second);
  std::ostringstream out2;
  write_annotated_corpus(second, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("parse_pair_dataset: labels resolve against both enums") {
  std::istringstream in(
      "# comment\n"
      "p1\tThe court ruled.\tThe court ruled again.\tSubsumption\n"
      "p2\tAlpha.\tBeta.\tNo Relation\n"
      "p3\tGamma.\tDelta.\tfollow-up\n");
  std::vector<LabeledPair> ds = parse_pair_dataset(in);
  REQUIRE(ds.size() == 3);
  CHECK(std::get<CstRelation>(ds[0].label) == CstRelation::Subsumption);
  CHECK(std::get<RelationLabel>(ds[1].label) == RelationLabel::NoRelation);
  CHECK(std::get<CstRelation>(ds[2].label) == CstRelation::FollowUp);
  CHECK(ds[0].pair.id == "p1");
  CHECK(ds[0].pair.target.raw == "The court ruled.");
}

TEST_CASE("parse_pair_dataset: unknown label and missing fields are errors") {
  {
    std::istringstream in("p1\tA.\tB.\tSarcasm\n");
    CHECK_THROWS_AS(parse_pair_dataset(in), ParseError);
  }
  {
    std::istringstream in("p1\tA.\tB.\n");
    CHECK_THROWS_AS(parse_pair_dataset(in), ParseError);
  }
}

TEST_CASE("map_cst_to_relation: published row assignments") {
  CHECK(map_cst_to_relation(CstRelation::Identity) == RelationLabel::Redundancy);
  CHECK(map_cst_to_relation(CstRelation::Citation) == RelationLabel::Citation);
  CHECK(map_cst_to_relation(CstRelation::Contradiction) == RelationLabel::ShiftInView);
  CHECK(map_cst_to_relation(CstRelation::ChangeOfPerspective) == RelationLabel::ShiftInView);
  CHECK(map_cst_to_relation(CstRelation::FollowUp) == RelationLabel::Elaboration);
  CHECK(map_cst_to_relation(CstRelation::Subsumption) == RelationLabel::Elaboration);
  CHECK(map_cst_to_relation(CstRelation::Equivalent) == RelationLabel::Elaboration);
  CHECK(map_cst_to_relation(CstRelation::Summary) == RelationLabel::Elaboration);
}

TEST_CASE("map_cst_to_relation is total over all 18 source types") {
  CHECK(all_cst_relations().size() == kCstRelationCount);
  for (CstRelation cst : all_cst_relations()) {
    RelationLabel label = map_cst_to_relation(cst);
    bool known = false;
    for (RelationLabel l : all_relation_labels()) known = known || l == label;
    CHECK(known);
  }
}

TEST_CASE("census: counting and the published dataset sizes") {
  {
    std::istringstream in("");
    CHECK(census(parse_pair_dataset(in)).empty());
  }
  {
    std::istringstream in(
        "a\tx\ty\tFollow-up\n"
        "b\tx\ty\tFollow-up\n"
        "c\tx\ty\tFollow-up\n");
    std::map<CstRelation, int> counts = census(parse_pair_dataset(in));
    CHECK(counts.size() == 1);
    CHECK(counts[CstRelation::FollowUp] == 3);
  }
  {
    // Synthetic full export with the published per-type totals.
    const std::vector<std::pair<CstRelation, int>> published = {
        {CstRelation::Identity, 99},           {CstRelation::Equivalent, 101},
        {CstRelation::Subsumption, 590},       {CstRelation::Contradiction, 48},
        {CstRelation::HistoricalBackground, 245}, {CstRelation::Modality, 17},
        {CstRelation::Attribution, 134},       {CstRelation::Summary, 11},
        {CstRelation::FollowUp, 159},          {CstRelation::IndirectSpeech, 4},
        {CstRelation::Elaboration, 305},       {CstRelation::Fulfillment, 10},
        {CstRelation::Description, 244},       {CstRelation::Overlap, 429}};
    std::ostringstream synth;
    int id = 0;
    for (const auto& [cst, count] : published) {
      for (int i = 0; i < count; ++i)
        synth << "p" << id++ << "\ttarget text\tsource text\t" << to_string(cst) << "\n";
    }
    std::istringstream in(synth.str());
    std::map<CstRelation, int> counts = census(parse_pair_dataset(in));
    for (const auto& [cst, count] : published) CHECK(counts[cst] == count);
    CHECK(counts[CstRelation::Identity] == 99);
    CHECK(counts[CstRelation::Equivalent] == 101);
    CHECK(counts[CstRelation::Overlap] == 429);
  }
}

TEST_CASE("parse_judge_annotations: duplicates rejected") {
  std::istringstream ok("p1\tj1\tCitation\np1\tj2\tcitation\n");
  std::vector<JudgeAnnotation> anns = parse_judge_annotations(ok);
  REQUIRE(anns.size() == 2);
  CHECK(anns[0].label == RelationLabel::Citation);
  std::istringstream dup("p1\tj1\tCitation\np1\tj1\tElaboration\n");
  CHECK_THROWS_AS(parse_judge_annotations(dup), ParseError);
}

TEST_CASE("load_transcript: strips headings and splits with legal abbreviations") {
  std::vector<std::string> sentences =
      load_transcript("LEE v. UNITED STATES\nI\nThe question is X. A claim is Y.");
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0] == "The question is X.");
  CHECK(sentences[1] == "A claim is Y.");
}

TEST_CASE("load_transcript: empty input") { CHECK(load_transcript("").empty()); }

TEST_CASE("load_transcript: reporter citations never split") {
  std::vector<std::string> sentences =
      load_transcript("See INS v. St. Cyr, 533 U. S. 289, 322-323 (2001).");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0] == "See INS v. St. Cyr, 533 U. S. 289, 322-323 (2001).");
}

TEST_CASE("load_transcript: page numbers, roman numerals and short headings dropped") {
  std::string text =
      "TURNER v. OHIO\n"
      "No. 16-327\n"
      "IV\n"
      "12\n"
      "Syllabus\n"
      "The first point stands. The second point falls.\n";
  std::vector<std::string> sentences = load_transcript(text);
  REQUIRE(sentences.size() == 2);
  for (const std::string& s : sentences) {
    CHECK(s.find("TURNER") == std::string::npos);
    CHECK(s.find("16-327") == std::string::npos);
    CHECK(s.find("Syllabus") == std::string::npos);
  }
}

TEST_CASE("tiebreak rank orders the five labels as documented") {
  CHECK(tiebreak_rank(RelationLabel::Elaboration) == 0);
  CHECK(tiebreak_rank(RelationLabel::NoRelation) == 1);
  CHECK(tiebreak_rank(RelationLabel::Citation) == 2);
  CHECK(tiebreak_rank(RelationLabel::ShiftInView) == 3);
  CHECK(tiebreak_rank(RelationLabel::Redundancy) == 4);
}
