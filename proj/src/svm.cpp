#include "courtrel/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "courtrel/util.hpp"

namespace courtrel {

using nlohmann::json;

std::string to_string(ClassWeighting w) {
  return w == ClassWeighting::Uniform ? "uniform" : "inverse-frequency";
}

std::map<RelationLabel, double> compute_class_weights(const std::vector<RelationLabel>& labels,
                                                      ClassWeighting weighting) {
  std::map<RelationLabel, double> counts;
  for (RelationLabel l : labels) counts[l] += 1.0;
  std::map<RelationLabel, double> weights;
  for (const auto& [label, count] : counts)
    weights[label] = weighting == ClassWeighting::Uniform ? 1.0 : 1.0 / count;
  return weights;
}

namespace {

// Canonical dataset order: label rank, then feature lexicographic. Makes
// training invariant to the order examples arrive in.
void canonical_sort(std::vector<TrainingExample>& data) {
  std::sort(data.begin(), data.end(), [](const TrainingExample& a, const TrainingExample& b) {
    int ra = tiebreak_rank(a.second);
    int rb = tiebreak_rank(b.second);
    if (ra != rb) return ra < rb;
    return a.first.to_array() < b.first.to_array();
  });
}

std::string fingerprint(const std::vector<TrainingExample>& data) {
  std::string buf;
  for (const auto& [fv, label] : data) {
    for (double v : fv.to_array()) {
      buf += double_to_hex(v);
      buf.push_back(',');
    }
    buf += to_string(label);
    buf.push_back(';');
  }
  return hex64(fnv1a64(buf));
}

struct BinaryProblem {
  std::vector<double> y;       // +1 / -1
  std::vector<double> alpha;   // per-example weight
  double alpha_sum = 0.0;
};

double binary_objective(const std::array<double, kFeatureCount>& w, double b, double lambda,
                        const std::vector<TrainingExample>& data, const BinaryProblem& prob) {
  double reg = 0.0;
  for (double x : w) reg += x * x;
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data[i].first.to_array();
    double f = b;
    for (int d = 0; d < kFeatureCount; ++d) f += w[d] * x[d];
    double margin = prob.y[i] * f;
    if (margin < 1.0) loss += prob.alpha[i] * (1.0 - margin);
  }
  return lambda * reg + loss / prob.alpha_sum;
}

// One full-batch subgradient step, with halving until the objective does not
// increase; the step is skipped entirely when max_halvings is exhausted.
double descend_epoch(std::array<double, kFeatureCount>& w, double& b, double& step,
                     double lambda, const std::vector<TrainingExample>& data,
                     const BinaryProblem& prob, const TrainingConfig& cfg, double current_obj) {
  std::array<double, kFeatureCount> grad{};
  double grad_b = 0.0;
  for (int d = 0; d < kFeatureCount; ++d) grad[d] = 2.0 * lambda * w[d];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data[i].first.to_array();
    double f = b;
    for (int d = 0; d < kFeatureCount; ++d) f += w[d] * x[d];
    if (prob.y[i] * f < 1.0) {
      double c = prob.alpha[i] * prob.y[i] / prob.alpha_sum;
      for (int d = 0; d < kFeatureCount; ++d) grad[d] -= c * x[d];
      grad_b -= c;
    }
  }
  for (int h = 0; h <= cfg.max_halvings; ++h) {
    std::array<double, kFeatureCount> w_next = w;
    for (int d = 0; d < kFeatureCount; ++d) w_next[d] -= step * grad[d];
    double b_next = b - step * grad_b;
    double obj = binary_objective(w_next, b_next, lambda, data, prob);
    if (obj <= current_obj) {
      w = w_next;
      b = b_next;
      step = std::min(cfg.initial_step, step * cfg.step_growth);
      return obj;
    }
    step *= 0.5;
  }
  return current_obj;  // no acceptable step; keep the iterate
}

}  // namespace

SvmModel train(const std::vector<TrainingExample>& data, const TrainingConfig& config,
               TrainTrace* trace) {
  if (data.empty()) throw std::invalid_argument("training dataset is empty");
  if (config.lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");

  std::vector<TrainingExample> examples = data;
  canonical_sort(examples);
  const std::string data_fingerprint = fingerprint(examples);
  std::mt19937_64 rng(config.seed);
  deterministic_shuffle(examples, rng);

  std::set<RelationLabel> label_set;
  for (const auto& [fv, label] : examples) label_set.insert(label);
  if (label_set.size() < 2)
    throw std::invalid_argument("training dataset must contain at least 2 distinct labels");

  std::vector<RelationLabel> labels_vec;
  for (const auto& [fv, label] : examples) labels_vec.push_back(label);
  std::map<RelationLabel, double> class_weights =
      compute_class_weights(labels_vec, config.weighting);

  SvmModel model;
  model.hyperparams = config;
  model.feature_manifest.assign(feature_names().begin(), feature_names().end());
  model.training_fingerprint = data_fingerprint;
  for (RelationLabel l : canonical_label_order()) {
    if (label_set.count(l)) model.classes.push_back(l);
  }
  model.weights.assign(model.classes.size(), {});
  model.biases.assign(model.classes.size(), 0.0);

  if (trace != nullptr) trace->objective.assign(config.epochs, 0.0);

  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    BinaryProblem prob;
    prob.y.reserve(examples.size());
    prob.alpha.reserve(examples.size());
    for (const auto& [fv, label] : examples) {
      prob.y.push_back(label == model.classes[c] ? 1.0 : -1.0);
      double a = class_weights.at(label);
      prob.alpha.push_back(a);
      prob.alpha_sum += a;
    }
    std::array<double, kFeatureCount> w{};
    double b = 0.0;
    double step = config.initial_step;
    double obj = binary_objective(w, b, config.lambda, examples, prob);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      obj = descend_epoch(w, b, step, config.lambda, examples, prob, config, obj);
      if (trace != nullptr) trace->objective[epoch] += obj;
    }
    model.weights[c] = w;
    model.biases[c] = b;
  }
  return model;
}

Prediction predict(const SvmModel& model, const FeatureVector& fv) {
  if (model.feature_manifest.size() != kFeatureCount ||
      !std::equal(model.feature_manifest.begin(), model.feature_manifest.end(),
                  feature_names().begin()))
    throw std::invalid_argument("feature manifest mismatch");
  if (model.classes.empty()) throw std::invalid_argument("model has no classes");

  const auto x = fv.to_array();
  Prediction out;
  double best = 0.0;
  bool first = true;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double score = model.biases[c];
    for (int d = 0; d < kFeatureCount; ++d) score += model.weights[c][d] * x[d];
    out.scores.emplace_back(model.classes[c], score);
    bool better = first || score > best ||
                  (score == best && tiebreak_rank(model.classes[c]) < tiebreak_rank(out.label));
    if (better) {
      best = score;
      out.label = model.classes[c];
      first = false;
    }
  }
  return out;
}

double training_accuracy(const SvmModel& model, const std::vector<TrainingExample>& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& [fv, label] : data) correct += predict(model, fv).label == label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double objective(const SvmModel& model, const std::vector<TrainingExample>& data) {
  std::vector<RelationLabel> labels_vec;
  for (const auto& [fv, label] : data) labels_vec.push_back(label);
  std::map<RelationLabel, double> class_weights =
      compute_class_weights(labels_vec, model.hyperparams.weighting);
  double total = 0.0;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    BinaryProblem prob;
    for (const auto& [fv, label] : data) {
      prob.y.push_back(label == model.classes[c] ? 1.0 : -1.0);
      double a = class_weights.at(label);
      prob.alpha.push_back(a);
      prob.alpha_sum += a;
    }
    total += binary_objective(model.weights[c], model.biases[c], model.hyperparams.lambda, data,
                              prob);
  }
  return total;
}

CvReport cross_validate(const std::vector<TrainingExample>& data, int k,
                        const TrainingConfig& config) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  std::vector<TrainingExample> examples = data;
  canonical_sort(examples);

  std::map<RelationLabel, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].second].push_back(i);
  for (const auto& [label, idx] : by_class) {
    if (static_cast<int>(idx.size()) < k)
      throw std::invalid_argument("class '" + to_string(label) + "' has " +
                                  std::to_string(idx.size()) + " examples, fewer than k=" +
                                  std::to_string(k));
  }

  // Stratified assignment: shuffle within each class (canonical class
  // order), then deal round-robin.
  std::mt19937_64 rng(config.seed);
  std::vector<int> fold_of(examples.size(), 0);
  for (RelationLabel label : canonical_label_order()) {
    auto it = by_class.find(label);
    if (it == by_class.end()) continue;
    std::vector<std::size_t> idx = it->second;
    deterministic_shuffle(idx, rng);
    for (std::size_t j = 0; j < idx.size(); ++j) fold_of[idx[j]] = static_cast<int>(j % k);
  }

  CvReport report(canonical_label_order());
  for (int fold = 0; fold < k; ++fold) {
    std::vector<TrainingExample> train_set;
    std::vector<TrainingExample> test_set;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (fold_of[i] == fold ? test_set : train_set).push_back(examples[i]);
    }
    SvmModel model = train(train_set, config);
    FoldResult result{ConfusionMatrix(canonical_label_order()), {}, 0.0};
    std::size_t correct = 0;
    for (const auto& [fv, label] : test_set) {
      RelationLabel predicted = predict(model, fv).label;
      result.confusion.add(label, predicted);
      report.pooled.add(label, predicted);
      correct += predicted == label ? 1 : 0;
    }
    result.accuracy = test_set.empty()
                          ? 0.0
                          : static_cast<double>(correct) / static_cast<double>(test_set.size());
    result.metrics = precision_recall_f1(result.confusion);
    report.folds.push_back(std::move(result));
  }
  report.pooled_metrics = precision_recall_f1(report.pooled);
  long diag = 0;
  for (RelationLabel l : report.pooled.labels()) diag += report.pooled.at(l, l);
  report.accuracy = report.pooled.total() == 0
                        ? 0.0
                        : static_cast<double>(diag) / static_cast<double>(report.pooled.total());
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json payload_json(const SvmModel& model) {
  json payload;
  payload["classes"] = json::array();
  for (RelationLabel l : model.classes) payload["classes"].push_back(to_string(l));
  payload["feature_manifest"] = model.feature_manifest;
  payload["weights"] = json::array();
  for (const auto& row : model.weights) {
    json jrow = json::array();
    for (double v : row) jrow.push_back(double_to_hex(v));
    payload["weights"].push_back(std::move(jrow));
  }
  payload["biases"] = json::array();
  for (double b : model.biases) payload["biases"].push_back(double_to_hex(b));
  payload["hyperparams"] = {
      {"lambda", double_to_hex(model.hyperparams.lambda)},
      {"epochs", model.hyperparams.epochs},
      {"seed", model.hyperparams.seed},
      {"class_weighting", to_string(model.hyperparams.weighting)},
      {"initial_step", double_to_hex(model.hyperparams.initial_step)},
      {"step_growth", double_to_hex(model.hyperparams.step_growth)},
      {"max_halvings", model.hyperparams.max_halvings},
  };
  payload["training_fingerprint"] = model.training_fingerprint;
  return payload;
}

}  // namespace

void save_model(const SvmModel& model, std::ostream& out) {
  json doc;
  doc["format_version"] = model.format_version;
  doc["payload"] = payload_json(model);
  doc["checksum"] = hex64(fnv1a64(doc["payload"].dump()));
  out << doc.dump(2) << "\n";
}

void save_model_file(const SvmModel& model, const std::string& path) {
  std::ostringstream os;
  save_model(model, os);
  write_file(path, os.str());
}

SvmModel load_model(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupted model file: ") + e.what());
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
    throw ParseError("corrupted model file: missing format_version");
  int version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion)
    throw ParseError("unsupported model format_version " + std::to_string(version) +
                     " (expected " + std::to_string(kModelFormatVersion) + ")");
  if (!doc.contains("payload") || !doc.contains("checksum"))
    throw ParseError("corrupted model file: missing payload or checksum");
  std::string expect = doc["checksum"].get<std::string>();
  std::string actual = hex64(fnv1a64(doc["payload"].dump()));
  if (expect != actual) throw ParseError("corrupted model file: checksum mismatch");

  const json& payload = doc["payload"];
  SvmModel model;
  model.format_version = version;
  try {
    for (const auto& name : payload.at("classes")) {
      auto label = parse_relation_label(name.get<std::string>());
      if (!label.has_value())
        throw ParseError("unknown class '" + name.get<std::string>() + "' in model file");
      model.classes.push_back(*label);
    }
    model.feature_manifest = payload.at("feature_manifest").get<std::vector<std::string>>();
    for (const auto& jrow : payload.at("weights")) {
      std::array<double, kFeatureCount> row{};
      if (jrow.size() != kFeatureCount)
        throw ParseError("weight row length does not match the manifest");
      for (std::size_t d = 0; d < kFeatureCount; ++d)
        row[d] = double_from_hex(jrow[d].get<std::string>());
      model.weights.push_back(row);
    }
    for (const auto& b : payload.at("biases"))
      model.biases.push_back(double_from_hex(b.get<std::string>()));
    const json& hp = payload.at("hyperparams");
    model.hyperparams.lambda = double_from_hex(hp.at("lambda").get<std::string>());
    model.hyperparams.epochs = hp.at("epochs").get<int>();
    model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
    model.hyperparams.weighting = hp.at("class_weighting").get<std::string>() == "uniform"
                                      ? ClassWeighting::Uniform
                                      : ClassWeighting::InverseFrequency;
    model.hyperparams.initial_step = double_from_hex(hp.at("initial_step").get<std::string>());
    model.hyperparams.step_growth = double_from_hex(hp.at("step_growth").get<std::string>());
    model.hyperparams.max_halvings = hp.at("max_halvings").get<int>();
    model.training_fingerprint = payload.at("training_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupted model file: ") + e.what());
  }
  if (model.weights.size() != model.classes.size() ||
      model.biases.size() != model.classes.size())
    throw ParseError("model class/weight shape mismatch");
  return model;
}

SvmModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_model(in);
}

void write_feature_dump(std::ostream& out, const std::vector<FeatureDumpRow>& rows) {
  out << "#features = ";
  for (std::size_t d = 0; d < kFeatureCount; ++d) {
    if (d > 0) out << ',';
    out << feature_names()[d];
  }
  out << "\n";
  char buf[32];
  for (const FeatureDumpRow& row : rows) {
    out << row.id << '\t' << to_string(row.label);
    for (double v : row.features.to_array()) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << "\n";
  }
}

std::vector<FeatureDumpRow> read_feature_dump(std::istream& in) {
  std::vector<FeatureDumpRow> rows;
  std::string line;
  int lineno = 0;
  bool manifest_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty()) continue;
    if (starts_with(t, "#features")) {
      std::size_t eq = t.find('=');
      if (eq == std::string::npos) throw ParseError("bad feature manifest line", lineno);
      std::vector<std::string> names = split(t.substr(eq + 1), ',');
      if (names.size() != kFeatureCount)
        throw ParseError("feature manifest length mismatch", lineno);
      for (std::size_t d = 0; d < kFeatureCount; ++d) {
        if (trim(names[d]) != feature_names()[d])
          throw ParseError("feature manifest mismatch at column " + std::to_string(d + 1) +
                               ": '" + trim(names[d]) + "'",
                           lineno);
      }
      manifest_seen = true;
      continue;
    }
    if (t[0] == '#') continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 2 + kFeatureCount)
      throw ParseError("expected id, label and " + std::to_string(kFeatureCount) +
                           " feature columns",
                       lineno);
    FeatureDumpRow row;
    row.id = trim(fields[0]);
    auto label = parse_relation_label(trim(fields[1]));
    if (!label.has_value()) throw ParseError("unknown label '" + fields[1] + "'", lineno);
    row.label = *label;
    std::array<double, kFeatureCount> values{};
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      try {
        values[d] = std::stod(fields[2 + d]);
      } catch (const std::exception&) {
        throw ParseError("bad feature value '" + fields[2 + d] + "'", lineno);
      }
    }
    row.features = FeatureVector::from_array(values);
    rows.push_back(std::move(row));
  }
  if (!rows.empty() && !manifest_seen)
    throw ParseError("feature dump is missing its #features manifest line");
  return rows;
}

}  // namespace courtrel
