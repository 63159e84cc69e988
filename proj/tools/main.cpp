// courtrel: batch workflows for classifying discourse relations between
// consecutive sentences of court-case transcripts.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "courtrel/annotate.hpp"
#include "courtrel/citation_rules.hpp"
#include "courtrel/corpus.hpp"
#include "courtrel/eval.hpp"
#include "courtrel/features.hpp"
#include "courtrel/pipeline.hpp"
#include "courtrel/svm.hpp"
#include "courtrel/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace courtrel;

namespace {

constexpr const char* kResourceEnvVar = "COURTREL_RESOURCES";

struct CommonOptions {
  std::string resources_dir;
  std::string lexicon_path;
  std::string rules_path;
  std::uint64_t seed = 42;
  int jobs = 1;
};

std::string default_resources_dir() {
  if (const char* env = std::getenv(kResourceEnvVar)) return env;
  return "resources";
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--resources", opts.resources_dir, "resource directory")
      ->default_val(default_resources_dir());
  cmd->add_option("--lexicon", opts.lexicon_path,
                  "similarity lexicon file (default <resources>/similarity_lexicon.tsv)");
  cmd->add_option("--rules", opts.rules_path,
                  "citation rule file (default <resources>/citation_rules.tsv, else built-ins)");
  cmd->add_option("--seed", opts.seed, "seed for all shuffles and training")->default_val(42);
  cmd->add_option("--jobs", opts.jobs, "worker threads for per-pair classification")
      ->default_val(1);
}

struct LoadedResources {
  AnnotationResources annotate;
  TransitionResources transitions;
  SimilarityLexicon lexicon;
  CitationRuleSet rules;
  TranscriptOptions transcript;
  std::string lexicon_path;
  std::string rules_path;
};

LoadedResources load_bundle(const CommonOptions& opts) {
  LoadedResources out;
  out.annotate = load_annotation_resources(opts.resources_dir);
  std::string abbrev_path = (fs::path(opts.resources_dir) / "abbreviations.txt").string();
  if (fs::exists(abbrev_path)) out.transcript.abbreviations = load_abbreviation_file(abbrev_path);
  out.transitions = load_transition_resources(opts.resources_dir);
  out.lexicon_path = opts.lexicon_path.empty()
                         ? (fs::path(opts.resources_dir) / "similarity_lexicon.tsv").string()
                         : opts.lexicon_path;
  out.lexicon = SimilarityLexicon::load(out.lexicon_path);
  if (!opts.rules_path.empty()) {
    out.rules_path = opts.rules_path;
    out.rules = load_rules_file(opts.rules_path);
  } else {
    std::string bundled = (fs::path(opts.resources_dir) / "citation_rules.tsv").string();
    if (fs::exists(bundled)) {
      out.rules_path = bundled;
      out.rules = load_rules_file(bundled);
    } else {
      out.rules_path = "<builtin>";
      out.rules = CitationRuleSet::builtin();
    }
  }
  return out;
}

// Every command writes <output>.manifest.json with enough context to rerun
// it byte-identically (timestamp aside).
void write_manifest(const std::string& output_path, const std::string& command,
                    const json& options, const std::vector<std::string>& inputs,
                    const std::string& resource_version) {
  json m;
  m["command"] = command;
  m["options"] = options;
  m["resource_version"] = resource_version;
  json fingerprints = json::object();
  for (const std::string& path : inputs) {
    if (fs::exists(path)) fingerprints[path] = hex64(fnv1a64(read_file(path)));
  }
  m["input_fingerprints"] = fingerprints;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  m["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  write_file(output_path + ".manifest.json", m.dump(2) + "\n");
}

// A transcript argument may be a single file or a directory of files.
std::vector<std::string> expand_transcript_paths(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const std::string& path : paths) {
    if (fs::is_directory(path)) {
      std::vector<std::string> in_dir;
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file()) in_dir.push_back(entry.path().string());
      }
      std::sort(in_dir.begin(), in_dir.end());
      out.insert(out.end(), in_dir.begin(), in_dir.end());
    } else {
      out.push_back(path);
    }
  }
  return out;
}

RelationLabel training_label(const PairLabel& label) {
  if (const CstRelation* cst = std::get_if<CstRelation>(&label)) return map_cst_to_relation(*cst);
  return std::get<RelationLabel>(label);
}

std::vector<TrainingExample> examples_from_pairs(const std::vector<LabeledPair>& dataset,
                                                 const LoadedResources& res) {
  std::vector<TrainingExample> out;
  out.reserve(dataset.size());
  for (const LabeledPair& rec : dataset) {
    SentencePair pair =
        make_annotated_pair(rec.pair.id, rec.pair.target.raw, rec.pair.source.raw, res.annotate);
    FeatureVector fv = extract_features(pair, res.annotate, res.transitions, res.lexicon);
    out.emplace_back(fv, training_label(rec.label));
  }
  return out;
}

// --------------------------------------------------------------------------

int cmd_ingest(const std::string& pairs_path, const std::vector<std::string>& transcript_paths,
               const std::string& census_out, const CommonOptions& common) {
  TranscriptOptions transcript_options;
  std::string abbrev_path = (fs::path(common.resources_dir) / "abbreviations.txt").string();
  if (fs::exists(abbrev_path)) transcript_options.abbreviations = load_abbreviation_file(abbrev_path);
  if (!pairs_path.empty()) {
    std::ifstream in(pairs_path);
    if (!in) throw std::runtime_error("cannot open dataset: " + pairs_path);
    std::vector<LabeledPair> dataset = parse_pair_dataset(in);
    std::map<CstRelation, int> counts = census(dataset);
    std::map<RelationLabel, int> direct;
    for (const LabeledPair& rec : dataset) {
      if (const RelationLabel* rel = std::get_if<RelationLabel>(&rec.label)) ++direct[*rel];
    }
    std::ostringstream os;
    os << "relation\tcount\n";
    for (const auto& [cst, count] : counts) os << to_string(cst) << '\t' << count << "\n";
    for (const auto& [rel, count] : direct) os << to_string(rel) << '\t' << count << "\n";
    os << "total\t" << dataset.size() << "\n";
    if (census_out.empty()) {
      std::cout << os.str();
    } else {
      write_file(census_out, os.str());
      write_manifest(census_out, "ingest", {{"pairs", pairs_path}}, {pairs_path}, "");
    }
  }
  for (const std::string& path : expand_transcript_paths(transcript_paths)) {
    std::vector<std::string> sentences = load_transcript(read_file(path), transcript_options);
    std::cout << path << '\t' << sentences.size() << " sentences\n";
  }
  return 0;
}

int cmd_features(const std::string& data_path, const std::string& out_path,
                 const CommonOptions& common) {
  LoadedResources res = load_bundle(common);
  std::ifstream in(data_path);
  if (!in) throw std::runtime_error("cannot open dataset: " + data_path);
  std::vector<LabeledPair> dataset = parse_pair_dataset(in);
  std::vector<FeatureDumpRow> rows;
  for (const LabeledPair& rec : dataset) {
    SentencePair pair =
        make_annotated_pair(rec.pair.id, rec.pair.target.raw, rec.pair.source.raw, res.annotate);
    FeatureDumpRow row;
    row.id = rec.pair.id;
    row.label = training_label(rec.label);
    row.features = extract_features(pair, res.annotate, res.transitions, res.lexicon);
    rows.push_back(std::move(row));
  }
  std::ostringstream os;
  write_feature_dump(os, rows);
  write_file(out_path, os.str());
  write_manifest(out_path, "features", {{"data", data_path}}, {data_path},
                 res.annotate.version);
  std::cout << "wrote " << rows.size() << " feature rows to " << out_path << "\n";
  return 0;
}

int cmd_train(const std::vector<std::string>& data_paths,
              const std::vector<std::string>& feature_paths, const std::string& model_out,
              const std::string& cv_out, double lambda, int epochs, int folds,
              const std::string& weighting, const CommonOptions& common) {
  TrainingConfig config;
  config.lambda = lambda;
  config.epochs = epochs;
  config.seed = common.seed;
  if (weighting == "uniform")
    config.weighting = ClassWeighting::Uniform;
  else if (weighting == "inverse-frequency")
    config.weighting = ClassWeighting::InverseFrequency;
  else
    throw std::invalid_argument("unknown class weighting '" + weighting + "'");

  std::vector<TrainingExample> examples;
  std::string resource_version;
  if (!data_paths.empty()) {
    LoadedResources res = load_bundle(common);
    resource_version = res.annotate.version;
    for (const std::string& path : data_paths) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open dataset: " + path);
      std::vector<TrainingExample> part = examples_from_pairs(parse_pair_dataset(in), res);
      examples.insert(examples.end(), part.begin(), part.end());
    }
  }
  for (const std::string& path : feature_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature dump: " + path);
    for (const FeatureDumpRow& row : read_feature_dump(in))
      examples.emplace_back(row.features, row.label);
  }
  if (examples.empty()) throw std::invalid_argument("no training data given");

  TrainTrace trace;
  SvmModel model = train(examples, config, &trace);
  save_model_file(model, model_out);
  double accuracy = training_accuracy(model, examples);
  std::cout << "trained on " << examples.size() << " examples; training accuracy " << accuracy
            << "\n";
  std::cout << "model checksum "
            << hex64(fnv1a64(read_file(model_out)))
            << "\n";

  json options = {{"data", data_paths},   {"features", feature_paths},
                  {"lambda", lambda},     {"epochs", epochs},
                  {"seed", common.seed},  {"weighting", weighting},
                  {"folds", folds}};
  std::vector<std::string> inputs = data_paths;
  inputs.insert(inputs.end(), feature_paths.begin(), feature_paths.end());
  write_manifest(model_out, "train", options, inputs, resource_version);

  if (folds > 0) {
    CvReport report = cross_validate(examples, folds, config);
    std::ostringstream os;
    os << "folds\t" << folds << "\n";
    for (std::size_t f = 0; f < report.folds.size(); ++f)
      os << "fold_" << f << "_accuracy\t" << report.folds[f].accuracy << "\n";
    os << "pooled_accuracy\t" << report.accuracy << "\n\n";
    os << format_confusion(report.pooled) << "\n" << format_metrics(report.pooled_metrics);
    if (cv_out.empty()) {
      std::cout << os.str();
    } else {
      write_file(cv_out, os.str());
    }
  }
  return 0;
}

int cmd_classify(const std::vector<std::string>& transcript_args, const std::string& model_path,
                 const std::string& store_path, int window, const CommonOptions& common) {
  LoadedResources res = load_bundle(common);
  SvmModel model = load_model_file(model_path);
  if (fs::exists(store_path)) fs::remove(store_path);
  if (fs::exists(store_path + ".idx")) fs::remove(store_path + ".idx");
  RecordStore store(store_path);
  std::size_t total = 0;
  std::vector<std::string> transcript_paths = expand_transcript_paths(transcript_args);
  for (const std::string& path : transcript_paths) {
    std::string transcript_id = fs::path(path).stem().string();
    std::vector<PairRecord> records =
        run_transcript(transcript_id, read_file(path), model, res.rules, res.annotate,
                       res.transitions, res.lexicon, window, common.jobs, res.transcript);
    store.append_all(records);
    total += records.size();
    std::cout << path << '\t' << records.size() << " pairs\n";
  }
  json options = {{"transcripts", transcript_paths},
                  {"model", model_path},
                  {"window", window},
                  {"jobs", common.jobs},
                  {"rules", res.rules_path},
                  {"lexicon", res.lexicon_path},
                  {"seed", common.seed}};
  std::vector<std::string> inputs = transcript_paths;
  inputs.push_back(model_path);
  write_manifest(store_path, "classify", options, inputs, res.annotate.version);
  std::cout << "stored " << total << " records in " << store_path << "\n";
  return 0;
}

int cmd_sample(const std::string& store_path, const std::string& out_path, int n,
               int cluster_size, const CommonOptions& common) {
  RecordStore store(store_path);
  std::vector<std::vector<PairRecord>> clusters =
      sample_for_annotation(store.load(), n, common.seed, cluster_size);
  write_file(out_path, format_annotation_export(clusters));
  json options = {{"store", store_path},
                  {"n", n},
                  {"cluster_size", cluster_size},
                  {"seed", common.seed}};
  write_manifest(out_path, "sample", options, {store_path}, "");
  std::cout << "wrote " << clusters.size() << " clusters to " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& store_path, const std::string& annotations_path,
             const std::string& policy_name, const std::string& report_out,
             const std::string& matrix_out, const std::string& metrics_out,
             const CommonOptions& common) {
  auto policy = parse_gold_policy(policy_name);
  if (!policy.has_value()) throw std::invalid_argument("unknown policy '" + policy_name + "'");

  // Annotations are merged in memory; the store itself is left untouched so
  // both policies can be run over the same inputs.
  RecordStore store(store_path);
  std::vector<PairRecord> records;
  {
    std::ifstream in(annotations_path);
    if (!in) throw std::runtime_error("cannot open annotations: " + annotations_path);
    records = merge_annotations(store.load(), parse_judge_annotations(in));
  }
  std::vector<ScoredPair> scored = as_scored(records);

  ConfusionMatrix matrix = build_confusion(scored, *policy);
  MetricsReport metrics = *policy == GoldPolicy::BothAgree ? precision_recall_f1(matrix)
                                                           : at_least_one_report(scored);

  std::ostringstream os;
  os << "policy\t" << to_string(*policy) << "\n";
  os << "pairs\t" << scored.size() << "\n";
  os << "overall_corr_hh\t" << overall_corr_hh(scored) << "\n";
  os << "overall_corr_hs\t" << overall_corr_hs(scored) << "\n";
  os << "reference_corr_hh\t" << kReferenceOverallCorrHumanHuman << "\n";
  os << "reference_corr_hs\t" << kReferenceOverallCorrHumanSystem << "\n";
  for (RelationLabel label : canonical_label_order()) {
    auto hh = per_class_corr_hh(scored, label);
    auto hs = per_class_corr_hs(scored, label);
    os << "corr_hh[" << to_string(label) << "]\t"
       << (hh.has_value() ? std::to_string(*hh) : "undefined") << "\n";
    os << "corr_hs[" << to_string(label) << "]\t"
       << (hs.has_value() ? std::to_string(*hs) : "undefined") << "\n";
  }
  os << "\n" << format_confusion(matrix) << "\n" << format_metrics(metrics);

  if (report_out.empty()) {
    std::cout << os.str();
  } else {
    write_file(report_out, os.str());
    write_manifest(report_out, "eval",
                   {{"store", store_path},
                    {"annotations", annotations_path},
                    {"policy", policy_name},
                    {"seed", common.seed}},
                   {store_path, annotations_path}, "");
  }
  if (!matrix_out.empty()) write_file(matrix_out, format_confusion(matrix));
  if (!metrics_out.empty()) write_file(metrics_out, format_metrics(metrics));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discourse relation classification for court-case transcripts"};
  app.require_subcommand(1);

  CommonOptions common;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse and validate corpus files");
  std::string ingest_pairs;
  std::vector<std::string> ingest_transcripts;
  std::string census_out;
  ingest->add_option("--pairs", ingest_pairs, "labeled pair dataset (tsv)");
  ingest->add_option("--transcripts", ingest_transcripts, "transcript files or directories");
  ingest->add_option("--census-out", census_out, "write the label census here");
  add_common(ingest, common);

  // features
  auto* features_cmd = app.add_subcommand("features", "extract feature vectors for a dataset");
  std::string features_data;
  std::string features_out;
  features_cmd->add_option("--data", features_data, "labeled pair dataset")->required();
  features_cmd->add_option("--out", features_out, "feature dump output")->required();
  add_common(features_cmd, common);

  // train
  auto* train_cmd = app.add_subcommand("train", "train the classifier");
  std::vector<std::string> train_data;
  std::vector<std::string> train_features;
  std::string model_out;
  std::string cv_out;
  double lambda = 0.01;
  int epochs = 200;
  int folds = 0;
  std::string weighting = "inverse-frequency";
  train_cmd->add_option("--data", train_data, "labeled pair dataset(s)");
  train_cmd->add_option("--features", train_features, "pre-extracted feature dump(s)");
  train_cmd->add_option("--out", model_out, "model output file")->required();
  train_cmd->add_option("--cv-out", cv_out, "cross-validation report output");
  train_cmd->add_option("--lambda", lambda, "L2 regularization strength")->default_val(0.01);
  train_cmd->add_option("--epochs", epochs, "training epochs")->default_val(200);
  train_cmd->add_option("--folds", folds, "cross-validation folds (0 = off)")->default_val(0);
  train_cmd->add_option("--weighting", weighting, "uniform | inverse-frequency")
      ->default_val("inverse-frequency");
  add_common(train_cmd, common);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "classify transcript sentence pairs");
  std::vector<std::string> classify_transcripts;
  std::string model_path;
  std::string store_path;
  int window = 1;
  classify_cmd->add_option("--transcript", classify_transcripts, "transcript file(s)")
      ->required();
  classify_cmd->add_option("--model", model_path, "trained model file")->required();
  classify_cmd->add_option("--store", store_path, "record store output")->required();
  classify_cmd->add_option("--window", window, "pair sentences up to this many apart")
      ->default_val(1);
  add_common(classify_cmd, common);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "sample clusters for judge annotation");
  std::string sample_store;
  std::string sample_out;
  int sample_n = 200;
  int cluster_size = 5;
  sample_cmd->add_option("--store", sample_store, "record store")->required();
  sample_cmd->add_option("--out", sample_out, "annotation export output")->required();
  sample_cmd->add_option("--sample-n", sample_n, "pairs to sample")->default_val(200);
  sample_cmd->add_option("--cluster-size", cluster_size, "pairs per cluster")->default_val(5);
  add_common(sample_cmd, common);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against judge annotations");
  std::string eval_store;
  std::string annotations_path;
  std::string policy = "both-agree";
  std::string report_out;
  std::string matrix_out;
  std::string metrics_out;
  eval_cmd->add_option("--store", eval_store, "record store")->required();
  eval_cmd->add_option("--annotations", annotations_path, "judge annotation file")->required();
  eval_cmd->add_option("--policy", policy, "both-agree | at-least-one")
      ->default_val("both-agree");
  eval_cmd->add_option("--report-out", report_out, "full report output");
  eval_cmd->add_option("--matrix-out", matrix_out, "confusion matrix output");
  eval_cmd->add_option("--metrics-out", metrics_out, "metrics table output");
  add_common(eval_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_pairs, ingest_transcripts, census_out, common);
    if (*features_cmd) return cmd_features(features_data, features_out, common);
    if (*train_cmd)
      return cmd_train(train_data, train_features, model_out, cv_out, lambda, epochs, folds,
                       weighting, common);
    if (*classify_cmd)
      return cmd_classify(classify_transcripts, model_path, store_path, window, common);
    if (*sample_cmd) return cmd_sample(sample_store, sample_out, sample_n, cluster_size, common);
    if (*eval_cmd)
      return cmd_eval(eval_store, annotations_path, policy, report_out, matrix_out, metrics_out,
                      common);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const std::invalid_argument*>(&e) == nullptr) {
      std::cerr << "internal error: " << e.what() << "\n";
      return 1;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
