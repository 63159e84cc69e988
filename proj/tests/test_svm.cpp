#include "doctest.h"

#include <fstream>
#include <sstream>

#include "courtrel/svm.hpp"
#include "courtrel/util.hpp"

using namespace courtrel;

namespace {

std::vector<TrainingExample> separable_set() {
  std::ifstream in(std::string(FIXTURES_DIR) + "/synthetic_separable.tsv");
  REQUIRE(in.good());
  std::vector<TrainingExample> out;
  for (const FeatureDumpRow& row : read_feature_dump(in))
    out.emplace_back(row.features, row.label);
  REQUIRE(out.size() == 100);
  return out;
}

std::string serialized(const SvmModel& model) {
  std::ostringstream os;
  save_model(model, os);
  return os.str();
}

}  // namespace

TEST_CASE("train: separable synthetic set reaches 100% training accuracy") {
  std::vector<TrainingExample> data = separable_set();
  TrainTrace trace;
  SvmModel model = train(data, TrainingConfig{}, &trace);
  CHECK(training_accuracy(model, data) == doctest::Approx(1.0));
  REQUIRE(trace.objective.size() == 200);
  // Objective non-increasing over the final 25% of epochs.
  for (std::size_t e = 150; e + 1 < trace.objective.size(); ++e)
    CHECK(trace.objective[e + 1] <= trace.objective[e] + 1e-12);
}

TEST_CASE("train: single-class dataset is rejected") {
  std::vector<TrainingExample> data;
  for (int i = 0; i < 5; ++i) data.emplace_back(FeatureVector{}, RelationLabel::Elaboration);
  CHECK_THROWS_AS(train(data, TrainingConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(train({}, TrainingConfig{}), std::invalid_argument);
}

TEST_CASE("train: identical calls give bit-identical serialized models") {
  std::vector<TrainingExample> data = separable_set();
  TrainingConfig config;
  config.seed = 7;
  SvmModel a = train(data, config);
  SvmModel b = train(data, config);
  CHECK(a == b);
  CHECK(serialized(a) == serialized(b));
}

TEST_CASE("train: invariant to dataset permutation under the same seed") {
  std::vector<TrainingExample> data = separable_set();
  std::vector<TrainingExample> shuffled = data;
  std::mt19937_64 rng(999);
  deterministic_shuffle(shuffled, rng);
  REQUIRE(shuffled != data);
  TrainingConfig config;
  SvmModel a = train(data, config);
  SvmModel b = train(shuffled, config);
  CHECK(serialized(a) == serialized(b));
}

TEST_CASE("predict: forced argmax and the documented tie-break") {
  SvmModel model;
  model.classes = {RelationLabel::Elaboration, RelationLabel::NoRelation,
                   RelationLabel::Citation};
  model.weights.assign(3, {});
  model.biases = {1.0, 0.0, 0.0};
  model.feature_manifest.assign(feature_names().begin(), feature_names().end());
  FeatureVector fv;
  CHECK(predict(model, fv).label == RelationLabel::Elaboration);

  model.biases = {0.0, 0.0, 0.0};  // all equal; canonical order wins
  CHECK(predict(model, fv).label == RelationLabel::Elaboration);

  model.classes = {RelationLabel::Citation, RelationLabel::ShiftInView,
                   RelationLabel::Redundancy};
  CHECK(predict(model, fv).label == RelationLabel::Citation);
}

TEST_CASE("predict: trained margin classifies a held-out vector") {
  SvmModel model = train(separable_set(), TrainingConfig{});
  std::array<double, kFeatureCount> high{};
  high.fill(0.93);
  CHECK(predict(model, FeatureVector::from_array(high)).label == RelationLabel::NoRelation);
  std::array<double, kFeatureCount> low{};
  low.fill(0.06);
  CHECK(predict(model, FeatureVector::from_array(low)).label == RelationLabel::Elaboration);
}

TEST_CASE("predict: scaling weights and biases never changes the argmax") {
  SvmModel model = train(separable_set(), TrainingConfig{});
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, kFeatureCount> x{};
    for (double& v : x) v = static_cast<double>(bounded_u64(rng, 1000)) / 999.0;
    FeatureVector fv = FeatureVector::from_array(x);
    RelationLabel base = predict(model, fv).label;
    for (double c : {0.5, 2.0, 17.0}) {
      SvmModel scaled = model;
      for (auto& row : scaled.weights) {
        for (double& w : row) w *= c;
      }
      for (double& b : scaled.biases) b *= c;
      CHECK(predict(scaled, fv).label == base);
    }
  }
}

TEST_CASE("predict: manifest mismatch is an error") {
  SvmModel model = train(separable_set(), TrainingConfig{});
  model.feature_manifest[3] = "mystery";
  CHECK_THROWS_AS(predict(model, FeatureVector{}), std::invalid_argument);
}

TEST_CASE("compute_class_weights: duplication law for inverse frequency") {
  std::vector<RelationLabel> labels;
  for (int i = 0; i < 12; ++i) labels.push_back(RelationLabel::Elaboration);
  for (int i = 0; i < 3; ++i) labels.push_back(RelationLabel::NoRelation);
  auto w = compute_class_weights(labels, ClassWeighting::InverseFrequency);
  double product_before = w[RelationLabel::NoRelation] * 3;
  for (int i = 0; i < 3; ++i) labels.push_back(RelationLabel::NoRelation);  // duplicate class
  auto w2 = compute_class_weights(labels, ClassWeighting::InverseFrequency);
  double product_after = w2[RelationLabel::NoRelation] * 6;
  CHECK(product_before == doctest::Approx(product_after));
  auto u = compute_class_weights(labels, ClassWeighting::Uniform);
  CHECK(u[RelationLabel::Elaboration] == 1.0);
  CHECK(u[RelationLabel::NoRelation] == 1.0);
}

TEST_CASE("save/load round-trips the exact model") {
  SvmModel model = train(separable_set(), TrainingConfig{});
  std::stringstream buf;
  save_model(model, buf);
  SvmModel loaded = load_model(buf);
  CHECK(loaded == model);
}

TEST_CASE("load_model: truncation and version errors") {
  SvmModel model = train(separable_set(), TrainingConfig{});
  std::string text = serialized(model);
  {
    std::istringstream in(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_model(in), ParseError);
  }
  {
    // Flip a weight digit inside the payload: checksum must catch it.
    std::string corrupted = text;
    std::size_t pos = corrupted.find("0x1");
    REQUIRE(pos != std::string::npos);
    corrupted[pos + 2] = corrupted[pos + 2] == '1' ? '2' : '1';
    std::istringstream in(corrupted);
    CHECK_THROWS_AS(load_model(in), ParseError);
  }
  {
    std::string future = text;
    std::size_t pos = future.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    future.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 9");
    std::istringstream in(future);
    try {
      load_model(in);
      FAIL("expected version error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("format_version") != std::string::npos);
    }
  }
}

TEST_CASE("cross_validate: separable data is perfect in every fold") {
  CvReport report = cross_validate(separable_set(), 2, TrainingConfig{});
  CHECK(report.folds.size() == 2);
  CHECK(report.accuracy == doctest::Approx(1.0));
  for (const FoldResult& fold : report.folds) CHECK(fold.accuracy == doctest::Approx(1.0));
}

TEST_CASE("cross_validate: k larger than the smallest class is an error") {
  std::vector<TrainingExample> data = separable_set();
  CHECK_THROWS_AS(cross_validate(data, 51, TrainingConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate(data, 1, TrainingConfig{}), std::invalid_argument);
}

TEST_CASE("cross_validate: fold assignment is deterministic for a seed") {
  std::vector<TrainingExample> data = separable_set();
  TrainingConfig config;
  config.seed = 5;
  CvReport a = cross_validate(data, 5, config);
  CvReport b = cross_validate(data, 5, config);
  REQUIRE(a.folds.size() == b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f)
    CHECK(a.folds[f].confusion == b.folds[f].confusion);
  CHECK(a.pooled == b.pooled);
}

TEST_CASE("feature dumps: manifest is embedded and validated") {
  std::vector<FeatureDumpRow> rows(2);
  rows[0].id = "a";
  rows[0].label = RelationLabel::Citation;
  rows[0].features.word_cos = 0.25;
  rows[1].id = "b";
  rows[1].label = RelationLabel::NoRelation;
  rows[1].features.ldr = 0.5;
  std::stringstream buf;
  write_feature_dump(buf, rows);
  CHECK(buf.str().find("#features = word_cos,") == 0);
  std::vector<FeatureDumpRow> back = read_feature_dump(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].features.word_cos == 0.25);
  CHECK(back[1].label == RelationLabel::NoRelation);

  std::istringstream bad("#features = word_cos,oops\na\tCitation\t0\n");
  CHECK_THROWS_AS(read_feature_dump(bad), ParseError);
}
