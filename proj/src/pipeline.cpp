#include "courtrel/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "courtrel/util.hpp"

namespace courtrel {

using nlohmann::json;

SentencePair make_annotated_pair(const std::string& id, const std::string& target_text,
                                 const std::string& source_text,
                                 const AnnotationResources& resources) {
  SentencePair pair;
  pair.id = id;
  pair.target = annotate_sentence(target_text, resources);
  pair.source = annotate_sentence(source_text, resources);
  return naive_coref(pair);
}

PairRecord classify_pair(const SentencePair& pair, const SvmModel& model,
                         const CitationRuleSet& rules, const AnnotationResources& resources,
                         const TransitionResources& transitions,
                         const SimilarityLexicon& lexicon) {
  PairRecord rec;
  rec.pair_id = pair.id;
  rec.target_text = pair.target.raw;
  rec.source_text = pair.source.raw;
  try {
    CitationMatch match = detect_citation(pair.source.raw, rules);
    if (match.is_citation) {
      rec.predicted = RelationLabel::Citation;
      rec.provenance = "rule:" + *match.matched_rule_id;
      return rec;
    }
    FeatureVector fv = extract_features(pair, resources, transitions, lexicon);
    Prediction pred = predict(model, fv);
    rec.predicted = pred.label;
    rec.provenance = "svm";
    rec.scores = pred.scores;
    rec.features = fv;
  } catch (const std::exception& e) {
    throw std::runtime_error("pair '" + pair.id + "': " + e.what());
  }
  return rec;
}

std::vector<PairRecord> run_transcript(const std::string& transcript_id, const std::string& text,
                                       const SvmModel& model, const CitationRuleSet& rules,
                                       const AnnotationResources& resources,
                                       const TransitionResources& transitions,
                                       const SimilarityLexicon& lexicon, int window, int jobs,
                                       const TranscriptOptions& transcript_options) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  std::vector<std::string> sentences = load_transcript(text, transcript_options);

  struct Task {
    std::string id;
    std::size_t target = 0;
    std::size_t source = 0;
  };
  std::vector<Task> tasks;
  int counter = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (int w = 1; w <= window && i + w < sentences.size(); ++w) {
      tasks.push_back({transcript_id + ":" + std::to_string(counter++), i, i + w});
    }
  }

  std::vector<PairRecord> records(tasks.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      SentencePair pair = make_annotated_pair(tasks[t].id, sentences[tasks[t].target],
                                              sentences[tasks[t].source], resources);
      PairRecord rec = classify_pair(pair, model, rules, resources, transitions, lexicon);
      rec.transcript_id = transcript_id;
      records[t] = std::move(rec);
    }
  };
  if (jobs <= 1 || tasks.size() < 2) {
    work(0, tasks.size());
  } else {
    std::size_t n_threads = std::min<std::size_t>(jobs, tasks.size());
    std::vector<std::thread> threads;
    std::size_t chunk = (tasks.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(tasks.size(), begin + chunk);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
    for (std::thread& th : threads) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------
// Record store
// ---------------------------------------------------------------------------

namespace {

json annotations_json(const std::vector<JudgeAnnotation>& annotations) {
  json arr = json::array();
  for (const JudgeAnnotation& ann : annotations) {
    arr.push_back({{"judge_id", ann.judge_id}, {"label", to_string(ann.label)}});
  }
  return arr;
}

std::string store_header() {
  json h;
  h["kind"] = "pair_records";
  h["schema_version"] = kRecordStoreVersion;
  return h.dump();
}

}  // namespace

std::string record_to_json_line(const PairRecord& rec) {
  json j;
  j["pair_id"] = rec.pair_id;
  j["transcript_id"] = rec.transcript_id;
  j["target_text"] = rec.target_text;
  j["source_text"] = rec.source_text;
  j["predicted"] = to_string(rec.predicted);
  j["provenance"] = rec.provenance;
  if (rec.scores.has_value()) {
    json scores = json::array();
    for (const auto& [label, score] : *rec.scores)
      scores.push_back({{"label", to_string(label)}, {"score", double_to_hex(score)}});
    j["scores"] = std::move(scores);
  }
  if (rec.features.has_value()) {
    json fv = json::array();
    for (double v : rec.features->to_array()) fv.push_back(double_to_hex(v));
    j["features"] = std::move(fv);
  }
  if (!rec.judge_annotations.empty()) j["judges"] = annotations_json(rec.judge_annotations);
  return j.dump();
}

PairRecord record_from_json_line(const std::string& line, int lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt record: ") + e.what(), lineno);
  }
  PairRecord rec;
  try {
    rec.pair_id = j.at("pair_id").get<std::string>();
    rec.transcript_id = j.value("transcript_id", std::string());
    rec.target_text = j.at("target_text").get<std::string>();
    rec.source_text = j.at("source_text").get<std::string>();
    auto predicted = parse_relation_label(j.at("predicted").get<std::string>());
    if (!predicted.has_value())
      throw ParseError("unknown label '" + j.at("predicted").get<std::string>() + "'", lineno);
    rec.predicted = *predicted;
    rec.provenance = j.at("provenance").get<std::string>();
    if (j.contains("scores")) {
      std::vector<std::pair<RelationLabel, double>> scores;
      for (const auto& entry : j["scores"]) {
        auto label = parse_relation_label(entry.at("label").get<std::string>());
        if (!label.has_value()) throw ParseError("unknown score label", lineno);
        scores.emplace_back(*label, double_from_hex(entry.at("score").get<std::string>()));
      }
      rec.scores = std::move(scores);
    }
    if (j.contains("features")) {
      std::array<double, kFeatureCount> values{};
      if (j["features"].size() != kFeatureCount)
        throw ParseError("feature vector length mismatch", lineno);
      for (std::size_t d = 0; d < kFeatureCount; ++d)
        values[d] = double_from_hex(j["features"][d].get<std::string>());
      rec.features = FeatureVector::from_array(values);
    }
    if (j.contains("judges")) {
      for (const auto& entry : j["judges"]) {
        JudgeAnnotation ann;
        ann.pair_id = rec.pair_id;
        ann.judge_id = entry.at("judge_id").get<std::string>();
        auto label = parse_relation_label(entry.at("label").get<std::string>());
        if (!label.has_value()) throw ParseError("unknown judge label", lineno);
        ann.label = *label;
        rec.judge_annotations.push_back(std::move(ann));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt record: ") + e.what(), lineno);
  }
  return rec;
}

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {}

std::vector<std::string> RecordStore::known_ids() const {
  std::vector<std::string> ids;
  std::ifstream idx(path_ + ".idx");
  if (idx) {
    std::string line;
    while (std::getline(idx, line)) {
      std::vector<std::string> fields = split(line, '\t');
      if (!fields.empty() && !fields[0].empty()) ids.push_back(fields[0]);
    }
    return ids;
  }
  // No side-file; fall back to scanning the store itself.
  std::ifstream in(path_);
  if (!in) return ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || trim(line).empty()) continue;
    ids.push_back(record_from_json_line(line, lineno).pair_id);
  }
  return ids;
}

void RecordStore::append(const PairRecord& record) { append_all({record}); }

void RecordStore::append_all(const std::vector<PairRecord>& records) {
  std::set<std::string> ids;
  for (const std::string& id : known_ids()) ids.insert(id);
  bool fresh = !std::filesystem::exists(path_);

  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open record store: " + path_);
  std::ofstream idx(path_ + ".idx", std::ios::app | std::ios::binary);
  if (!idx) throw std::runtime_error("cannot open record index: " + path_ + ".idx");
  if (fresh) out << store_header() << "\n";

  long next_line = static_cast<long>(ids.size()) + 2;  // header is line 1
  for (const PairRecord& rec : records) {
    if (!ids.insert(rec.pair_id).second)
      throw std::invalid_argument("duplicate pair_id on append: '" + rec.pair_id + "'");
    out << record_to_json_line(rec) << "\n";
    idx << rec.pair_id << '\t' << next_line++ << "\n";
  }
  if (!out || !idx) throw std::runtime_error("write failed: " + path_);
}

std::vector<PairRecord> RecordStore::load(const RecordFilter& filter) const {
  std::ifstream in(path_);
  if (!in) throw std::runtime_error("cannot open record store: " + path_);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("record store is empty (missing header)", 1);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception&) {
    throw ParseError("bad record store header", 1);
  }
  if (header.value("schema_version", -1) != kRecordStoreVersion)
    throw ParseError("unsupported record store schema_version", 1);

  std::vector<PairRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    PairRecord rec = record_from_json_line(line, lineno);
    if (filter.transcript_id.has_value() && rec.transcript_id != *filter.transcript_id) continue;
    if (filter.predicted.has_value() && rec.predicted != *filter.predicted) continue;
    if (filter.provenance.has_value()) {
      if (*filter.provenance == "rule") {
        if (!starts_with(rec.provenance, "rule:")) continue;
      } else if (rec.provenance != *filter.provenance) {
        continue;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PairRecord> merge_annotations(std::vector<PairRecord> records,
                                          const std::vector<JudgeAnnotation>& annotations) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index[records[i].pair_id] = i;
  for (const JudgeAnnotation& ann : annotations) {
    auto it = index.find(ann.pair_id);
    if (it == index.end())
      throw std::invalid_argument("annotation for unknown pair_id '" + ann.pair_id + "'");
    PairRecord& rec = records[it->second];
    for (const JudgeAnnotation& existing : rec.judge_annotations) {
      if (existing.judge_id == ann.judge_id)
        throw std::invalid_argument("duplicate annotation for pair '" + ann.pair_id +
                                    "' by judge '" + ann.judge_id + "'");
    }
    rec.judge_annotations.push_back(ann);
  }
  return records;
}

void RecordStore::attach_annotations(const std::vector<JudgeAnnotation>& annotations) {
  std::vector<PairRecord> records = merge_annotations(load(), annotations);

  // Atomic rewrite of store and index.
  const std::string tmp = path_ + ".tmp";
  const std::string tmp_idx = path_ + ".idx.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    std::ofstream idx(tmp_idx, std::ios::trunc | std::ios::binary);
    if (!out || !idx) throw std::runtime_error("cannot rewrite record store: " + path_);
    out << store_header() << "\n";
    long lineno = 2;
    for (const PairRecord& rec : records) {
      out << record_to_json_line(rec) << "\n";
      idx << rec.pair_id << '\t' << lineno++ << "\n";
    }
    if (!out || !idx) throw std::runtime_error("rewrite failed: " + path_);
  }
  std::filesystem::rename(tmp, path_);
  std::filesystem::rename(tmp_idx, path_ + ".idx");
}

std::vector<std::vector<PairRecord>> sample_for_annotation(std::vector<PairRecord> records,
                                                           int n, std::uint64_t seed,
                                                           int cluster_size) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  if (cluster_size <= 0) throw std::invalid_argument("cluster_size must be positive");
  if (static_cast<int>(records.size()) < n)
    throw std::invalid_argument("store holds " + std::to_string(records.size()) +
                                " records, fewer than n=" + std::to_string(n));
  if (n % cluster_size != 0)
    throw std::invalid_argument("cluster_size " + std::to_string(cluster_size) +
                                " does not divide n=" + std::to_string(n));

  std::sort(records.begin(), records.end(),
            [](const PairRecord& a, const PairRecord& b) { return a.pair_id < b.pair_id; });
  std::mt19937_64 rng(seed);
  deterministic_shuffle(records, rng);

  std::vector<std::vector<PairRecord>> clusters;
  for (int c = 0; c < n / cluster_size; ++c) {
    std::vector<PairRecord> cluster(records.begin() + c * cluster_size,
                                    records.begin() + (c + 1) * cluster_size);
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::string format_annotation_export(const std::vector<std::vector<PairRecord>>& clusters) {
  std::ostringstream os;
  os << "cluster\tpair_id\ttarget_text\tsource_text\tlabel\n";
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const PairRecord& rec : clusters[c]) {
      os << c << '\t' << rec.pair_id << '\t' << rec.target_text << '\t' << rec.source_text
         << "\t\n";
    }
  }
  return os.str();
}

std::vector<ScoredPair> as_scored(const std::vector<PairRecord>& records) {
  std::vector<ScoredPair> out;
  out.reserve(records.size());
  for (const PairRecord& rec : records) {
    ScoredPair sp;
    sp.pair_id = rec.pair_id;
    sp.predicted = rec.predicted;
    for (const JudgeAnnotation& ann : rec.judge_annotations)
      sp.judge_labels.emplace_back(ann.judge_id, ann.label);
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace courtrel
