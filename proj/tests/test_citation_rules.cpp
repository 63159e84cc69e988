#include "doctest.h"

#include <fstream>
#include <sstream>

#include "courtrel/citation_rules.hpp"
#include "courtrel/util.hpp"

using namespace courtrel;

TEST_CASE("detect_citation: published example matches the signal rule") {
  CitationMatch m = detect_citation("See INS v. St. Cyr, 533 U. S. 289, 322-323 (2001).",
                                    CitationRuleSet::builtin());
  CHECK(m.is_citation);
  CHECK(m.matched_rule_id == "R1");
}

TEST_CASE("detect_citation: plain argumentative sentence does not match") {
  CitationMatch m = detect_citation(
      "The question is whether Lee can show he was prejudiced by that erroneous advice.",
      CitationRuleSet::builtin());
  CHECK_FALSE(m.is_citation);
  CHECK_FALSE(m.matched_rule_id.has_value());
}

TEST_CASE("detect_citation: short-form cite") {
  CitationMatch m = detect_citation("Id., at 59.", CitationRuleSet::builtin());
  CHECK(m.is_citation);
  CHECK(m.matched_rule_id == "R4");
}

TEST_CASE("detect_citation: rule order decides the match id") {
  // With R1 disabled the reporter rule picks up the same sentence.
  CitationRuleSet set = CitationRuleSet::builtin();
  set.rules[0].enabled = false;
  CitationMatch m =
      detect_citation("See INS v. St. Cyr, 533 U. S. 289, 322-323 (2001).", set);
  CHECK(m.is_citation);
  CHECK(m.matched_rule_id == "R2");
}

TEST_CASE("detect_citation: disabling every rule yields constant false") {
  CitationRuleSet set = CitationRuleSet::builtin();
  for (CitationRule& r : set.rules) r.enabled = false;
  CHECK_FALSE(detect_citation("See INS v. St. Cyr, 533 U. S. 289 (2001).", set).is_citation);
  CHECK_FALSE(detect_citation("Id.", set).is_citation);
}

TEST_CASE("load_rules: default-equivalent file, duplicate ids, unknown classes") {
  {
    std::istringstream in(
        "R1\tsignal-prefix\ttrue\t_\n"
        "R2\treporter-cite\ttrue\t_\n"
        "R3\tcase-name\ttrue\t_\n"
        "R4\tshort-cite\ttrue\t_\n");
    CitationRuleSet set = load_rules(in);
    CHECK(set.rules.size() == 4);
    CHECK(detect_citation("Ibid.", set).matched_rule_id == "R4");
  }
  {
    std::istringstream in(
        "R1\tsignal-prefix\ttrue\t_\n"
        "R2\treporter-cite\ttrue\t_\n"
        "R2\tcase-name\ttrue\t_\n"
        "R4\tshort-cite\ttrue\t_\n");
    CHECK_THROWS_AS(load_rules(in), ParseError);
  }
  {
    std::istringstream in("R1\tblockquote\ttrue\t_\n");
    CHECK_THROWS_AS(load_rules(in), ParseError);
  }
  {
    // All four pattern classes must be present.
    std::istringstream in(
        "R1\tsignal-prefix\ttrue\t_\n"
        "R4\tshort-cite\ttrue\t_\n");
    CHECK_THROWS_AS(load_rules(in), ParseError);
  }
  {
    std::istringstream in("R1\tsignal-prefix\ttrue\tsignals\n");
    CHECK_THROWS_AS(load_rules(in), ParseError);
  }
}

TEST_CASE("bundled rule file equals the built-in behavior") {
  CitationRuleSet from_file = load_rules_file(std::string(RESOURCES_DIR) + "/citation_rules.tsv");
  CitationRuleSet builtin = CitationRuleSet::builtin();
  const char* probes[] = {
      "See Strickland v. Washington, 466 U. S. 668, 694 (1984).",
      "The panel relied on 927 F.2d 888, 893 (CA6 1991).",
      "We reaffirmed that holding in Lafler v. Cooper (2012).",
      "Ibid.",
      "The judgment below therefore cannot stand.",
  };
  for (const char* probe : probes) {
    CHECK(detect_citation(probe, from_file).is_citation ==
          detect_citation(probe, builtin).is_citation);
  }
}

TEST_CASE("fixture corpus: default rules score 40/40 positives and 0/40 negatives") {
  std::ifstream in(std::string(FIXTURES_DIR) + "/citation_fixture.tsv");
  REQUIRE(in.good());
  CitationRuleSet rules = CitationRuleSet::builtin();
  int positives = 0, negatives = 0, true_pos = 0, false_pos = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    REQUIRE(fields.size() == 2);
    bool expected = fields[0] == "1";
    bool got = detect_citation(fields[1], rules).is_citation;
    if (expected) {
      ++positives;
      if (got) ++true_pos;
      if (!got) MESSAGE("missed positive: ", fields[1]);
    } else {
      ++negatives;
      if (got) {
        ++false_pos;
        MESSAGE("false positive: ", fields[1]);
      }
    }
  }
  CHECK(positives == 40);
  CHECK(negatives == 40);
  CHECK(true_pos == 40);
  CHECK(false_pos == 0);
}

TEST_CASE("detection is deterministic") {
  CitationRuleSet rules = CitationRuleSet::builtin();
  const std::string sentence = "Cf. Missouri v. Frye, 566 U. S. 134, 147 (2012).";
  CitationMatch a = detect_citation(sentence, rules);
  CitationMatch b = detect_citation(sentence, rules);
  CHECK(a.is_citation == b.is_citation);
  CHECK(a.matched_rule_id == b.matched_rule_id);
}
