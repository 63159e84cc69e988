#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "courtrel/corpus.hpp"
#include "courtrel/eval.hpp"
#include "courtrel/features.hpp"

namespace courtrel {

enum class ClassWeighting { Uniform, InverseFrequency };

std::string to_string(ClassWeighting w);

struct TrainingConfig {
  double lambda = 0.01;  // L2 strength
  int epochs = 200;
  std::uint64_t seed = 42;
  ClassWeighting weighting = ClassWeighting::InverseFrequency;
  // Step schedule: start at initial_step; a full-batch subgradient step is
  // halved until the objective does not increase (up to max_halvings, else
  // the step is skipped), and grows by step_growth after each accepted step,
  // capped at initial_step.
  double initial_step = 1.0;
  double step_growth = 1.1;
  int max_halvings = 40;

  bool operator==(const TrainingConfig&) const = default;
};

inline constexpr int kModelFormatVersion = 1;

struct SvmModel {
  int format_version = kModelFormatVersion;
  std::vector<RelationLabel> classes;  // canonical tie-break order
  std::vector<std::array<double, kFeatureCount>> weights;  // one row per class
  std::vector<double> biases;
  std::vector<std::string> feature_manifest;
  TrainingConfig hyperparams;
  std::string training_fingerprint;

  bool operator==(const SvmModel&) const = default;
};

using TrainingExample = std::pair<FeatureVector, RelationLabel>;

struct TrainTrace {
  std::vector<double> objective;  // summed one-vs-rest objective per epoch
};

// Per-example weights: 1 for uniform, 1/class_count for inverse frequency.
std::map<RelationLabel, double> compute_class_weights(const std::vector<RelationLabel>& labels,
                                                      ClassWeighting weighting);

// One-vs-rest linear classifiers minimizing lambda*|w|^2 + weighted mean
// hinge loss by deterministic full-batch subgradient descent. The dataset is
// canonically sorted and then shuffled with the seed, so identical
// (dataset, config) inputs give bit-identical models regardless of input
// order. Throws std::invalid_argument on an empty or single-class dataset.
SvmModel train(const std::vector<TrainingExample>& data, const TrainingConfig& config,
               TrainTrace* trace = nullptr);

struct Prediction {
  RelationLabel label = RelationLabel::NoRelation;
  std::vector<std::pair<RelationLabel, double>> scores;  // model class order
};

// Argmax of w_c . x + b_c; exact ties go to the canonical label order.
Prediction predict(const SvmModel& model, const FeatureVector& fv);

double training_accuracy(const SvmModel& model, const std::vector<TrainingExample>& data);

double objective(const SvmModel& model, const std::vector<TrainingExample>& data);

struct FoldResult {
  ConfusionMatrix confusion;
  MetricsReport metrics;
  double accuracy = 0.0;
};

struct CvReport {
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  MetricsReport pooled_metrics;
  double accuracy = 0.0;  // pooled

  explicit CvReport(const std::vector<RelationLabel>& labels) : pooled(labels) {}
};

// Stratified k-fold with seeded shuffling; fold assignment is deterministic
// for a given seed and invariant to input order. Throws
// std::invalid_argument when k < 2 or any class has fewer than k examples.
CvReport cross_validate(const std::vector<TrainingExample>& data, int k,
                        const TrainingConfig& config);

// Versioned JSON container with a checksum over the payload; weights are
// stored as hexfloats so load(save(m)) == m exactly.
void save_model(const SvmModel& model, std::ostream& out);
void save_model_file(const SvmModel& model, const std::string& path);
SvmModel load_model(std::istream& in);
SvmModel load_model_file(const std::string& path);

// Feature dumps: a `#features = ...` manifest line, then
// id<TAB>label<TAB>16 feature columns (shortest round-trip decimals).
struct FeatureDumpRow {
  std::string id;
  RelationLabel label = RelationLabel::NoRelation;
  FeatureVector features;
};

void write_feature_dump(std::ostream& out, const std::vector<FeatureDumpRow>& rows);
std::vector<FeatureDumpRow> read_feature_dump(std::istream& in);

}  // namespace courtrel
