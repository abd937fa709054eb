#include "musobench/report.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <sstream>

#include "musobench/corpus.hpp"
#include "musobench/serialize.hpp"

namespace musobench {

namespace fs = std::filesystem;

namespace {

long word_count(const std::string& text) {
  long count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool ws = std::isspace(c);
    if (!ws && !in_token) ++count;
    in_token = !ws;
  }
  return count;
}

bool solution_bearing(const std::string& kind) {
  return kind == "answer" || kind == "recheck" || kind == "explore" ||
         kind == "trace" || kind == "final";
}

/// Completion-token length of the generated reasoning; falls back to
/// whitespace word counts when any round lacks reported usage.
std::pair<long, std::string> reasoning_length(const Transcript& t) {
  long tokens = 0;
  bool all_usage = true;
  for (const auto& r : t.rounds) {
    if (!solution_bearing(r.kind)) continue;
    if (r.usage)
      tokens += r.usage->completion_tokens;
    else
      all_usage = false;
  }
  if (all_usage) return {tokens, "tokens"};
  long words = 0;
  for (const auto& r : t.rounds)
    if (solution_bearing(r.kind)) words += word_count(r.response);
  return {words, "words"};
}

struct TranscriptView {
  const SolutionSet* first = nullptr;
  const SolutionSet* final = nullptr;
  std::size_t solution_rounds = 0;
  std::optional<int> confidence;  // 0-100
};

TranscriptView inspect(const Transcript& t) {
  TranscriptView view;
  for (const auto& r : t.rounds) {
    if (r.solutions) {
      if (!view.first) view.first = &*r.solutions;
      view.final = &*r.solutions;
      ++view.solution_rounds;
    }
    if (r.confidence) view.confidence = r.confidence;
  }
  return view;
}

ItemScore score_transcript(const Transcript& t, const BenchmarkItem& item) {
  const TranscriptView view = inspect(t);
  ItemScore score;
  score.key = t.key;
  score.status = t.status;
  score.record.item_id = item.item_id;
  score.record.level = item.level;

  const SolutionSet empty = SolutionSet::empty(item.task_kind);
  const SolutionSet& final_set = view.final ? *view.final : empty;
  score.record.recall = recall(final_set, item.ground_truth);
  score.record.precision = precision(final_set, item.ground_truth);
  if (view.confidence) score.record.confidence = *view.confidence / 100.0;
  if (view.solution_rounds >= 2)
    score.record.behavior = behavior(*view.first, final_set, item.ground_truth);

  const auto [length, unit] = reasoning_length(t);
  score.length = length;
  score.length_unit = unit;
  return score;
}

double mean(const std::vector<double>& values) {
  double sum = 0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> mean_or_null(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return mean(values);
}

/// Shortest round-trip decimal form, locale-independent; used for CSVs.
std::string num(double value) { return json(value).dump(); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// score_run

ScoredRun score_run(const std::string& run_dir, const Corpus& corpus,
                    const std::string& corpus_digest) {
  const std::string meta_path = run_dir + "/run.json";
  const json meta = parse_json(read_file(meta_path), meta_path);
  if (meta.value("schema", "") != std::string(kRunMetaSchema))
    throw DataError(meta_path + ": not a run metadata file");
  if (!fs::exists(run_dir + "/run.complete"))
    throw DataError("run directory " + run_dir +
                    " is not complete; finish or resume the run first");

  const std::string recorded = meta.value("corpus_digest", "");
  if (recorded != corpus_digest)
    throw DataError("corpus digest mismatch: run recorded " + recorded +
                    " but the supplied corpus hashes to " + corpus_digest +
                    "; refusing to score against a drifted corpus");

  const json& config = meta.at("config");
  const Strategy strategy =
      strategy_from_string(config.value("strategy", "none"));
  const std::vector<long> checkpoint_budgets =
      config.contains("checkpoints")
          ? config["checkpoints"].get<std::vector<long>>()
          : std::vector<long>{};

  std::map<std::string, const BenchmarkItem*> by_id;
  for (const auto& item : corpus.items) by_id[item.item_id] = &item;
  const auto find_item = [&](const std::string& id) -> const BenchmarkItem& {
    const auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError("transcript references unknown item " + id);
    return *it->second;
  };

  const std::vector<Transcript> transcripts =
      load_transcripts(run_dir + "/transcripts.jsonl");

  ScoredRun out;
  out.summary.config = config;
  out.summary.corpus_digest = corpus_digest;
  out.summary.task = to_string(corpus.task);

  if (strategy == Strategy::ScMedian || strategy == Strategy::ScVote) {
    // Units are the per-item aggregates; path transcripts only contribute
    // reasoning length.
    std::map<std::string, std::pair<long, bool>> lengths;  // item -> (len, tokens?)
    for (const auto& t : transcripts) {
      const auto [len, unit] = reasoning_length(t);
      auto& slot = lengths.emplace(t.item_id, std::make_pair(0L, true)).first->second;
      slot.first += len;
      slot.second = slot.second && unit == "tokens";
    }
    const auto aggregates = load_aggregates(run_dir + "/aggregates.jsonl");
    out.summary.units_total = aggregates.size();
    for (const auto& agg : aggregates) {
      if (!agg.result) {
        ++out.summary.exclusions.endpoint_failed;
        continue;
      }
      const BenchmarkItem& item = find_item(agg.item_id);
      ItemScore score;
      score.key = agg.item_id;
      score.record.item_id = agg.item_id;
      score.record.level = item.level;
      const SolutionSet& final_set = agg.result->final_set;
      score.status = final_set.size() > 0 ? "complete" : "parse-empty";
      score.record.recall = recall(final_set, item.ground_truth);
      score.record.precision = precision(final_set, item.ground_truth);
      score.record.confidence = agg.result->final_confidence;
      const auto len = lengths.find(agg.item_id);
      if (len != lengths.end()) {
        score.length = len->second.first;
        score.length_unit = len->second.second ? "tokens" : "words";
      }
      out.items.push_back(std::move(score));
    }
  } else {
    out.summary.units_total = transcripts.size();
    for (const auto& t : transcripts) {
      if (t.status == "endpoint-failed") {
        ++out.summary.exclusions.endpoint_failed;
        continue;
      }
      const BenchmarkItem& item = find_item(t.item_id);
      ItemScore score = score_transcript(t, item);
      if (strategy == Strategy::Reflect) {
        const auto hash = t.key.rfind("#c");
        if (hash == std::string::npos)
          throw DataError("reflection transcript key lacks a checkpoint: " +
                          t.key);
        const auto index = std::stoul(t.key.substr(hash + 2));
        if (index >= checkpoint_budgets.size())
          throw DataError("checkpoint index out of range in key " + t.key);
        score.checkpoint = checkpoint_budgets[index];
      }
      out.items.push_back(std::move(score));
    }
  }

  // Aggregates over the scored units.
  out.summary.units_scored = out.items.size();
  std::vector<double> recalls, precisions, confidences;
  std::vector<double> csr, esc, nsd;
  std::vector<ScoreRecord> records;
  for (const auto& score : out.items) {
    records.push_back(score.record);
    recalls.push_back(score.record.recall);
    if (score.record.precision)
      precisions.push_back(*score.record.precision);
    else
      ++out.summary.exclusions.empty_answers;
    if (score.record.confidence)
      confidences.push_back(*score.record.confidence);
    else
      ++out.summary.exclusions.missing_confidence;
    if (score.record.behavior) {
      ++out.summary.behavior_records;
      if (score.record.behavior->csr) csr.push_back(*score.record.behavior->csr);
      if (score.record.behavior->esc) esc.push_back(*score.record.behavior->esc);
      if (score.record.behavior->nsd) nsd.push_back(*score.record.behavior->nsd);
    }
    if (score.length_unit == "words") out.summary.length_unit = "words";
  }

  if (!recalls.empty()) out.summary.macro_recall = mean(recalls);
  out.summary.macro_precision = mean_or_null(precisions);
  out.summary.mean_confidence = mean_or_null(confidences);
  out.summary.mean_csr = mean_or_null(csr);
  out.summary.mean_esc = mean_or_null(esc);
  out.summary.mean_nsd = mean_or_null(nsd);
  out.summary.csr_applicable = csr.size();
  out.summary.esc_applicable = esc.size();
  out.summary.nsd_applicable = nsd.size();

  out.summary.reliability_recall =
      reliability(records, kDefaultEceBins, PerfKind::Recall);
  out.summary.reliability_precision =
      reliability(records, kDefaultEceBins, PerfKind::Precision);
  if (out.summary.reliability_recall.total > 0)
    out.summary.ece_recall = ece(records, kDefaultEceBins, PerfKind::Recall);
  if (out.summary.reliability_precision.total > 0)
    out.summary.ece_precision =
        ece(records, kDefaultEceBins, PerfKind::Precision);

  // Per-level breakdown in the harder-is-higher-rank orientation.
  StrataConfig strata = corpus.config.strata;
  if (strata.bands.empty())
    strata = corpus.task == TaskKind::TimeTabling ? default_timetabling_strata()
                                                  : default_subsetsum_strata();
  const int n_bands = static_cast<int>(strata.bands.size());
  for (int level = 0; level < n_bands; ++level) {
    std::vector<double> lv_recall, lv_precision, lv_confidence;
    for (const auto& score : out.items) {
      if (score.record.level != level) continue;
      lv_recall.push_back(score.record.recall);
      if (score.record.precision) lv_precision.push_back(*score.record.precision);
      if (score.record.confidence)
        lv_confidence.push_back(*score.record.confidence);
    }
    if (lv_recall.empty()) continue;
    LevelSummary summary;
    summary.level = level;
    summary.complexity_rank = n_bands - level;
    summary.min_solutions = strata.bands[level].min_solutions;
    summary.max_solutions = strata.bands[level].max_solutions;
    summary.count = lv_recall.size();
    summary.mean_recall = mean(lv_recall);
    summary.mean_precision = mean_or_null(lv_precision);
    summary.mean_confidence = mean_or_null(lv_confidence);
    out.summary.levels.push_back(summary);
  }

  if (strategy == Strategy::Reflect) {
    for (std::size_t index = 0; index < checkpoint_budgets.size(); ++index) {
      const long budget = checkpoint_budgets[index];
      std::vector<double> cp_recall, cp_confidence;
      for (const auto& score : out.items) {
        if (!score.checkpoint || *score.checkpoint != budget) continue;
        cp_recall.push_back(score.record.recall);
        if (score.record.confidence)
          cp_confidence.push_back(*score.record.confidence);
      }
      CheckpointSummary summary;
      summary.index = index;
      summary.budget = budget;
      summary.count = cp_recall.size();
      summary.mean_recall = cp_recall.empty() ? 0.0 : mean(cp_recall);
      summary.mean_confidence = mean_or_null(cp_confidence);
      out.summary.checkpoints.push_back(summary);
    }
  }

  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json fraction_pair(double value) {
  return json{{"fraction", value}, {"pct", value * 100.0}};
}

json to_json(const EceResult& e) {
  json j = fraction_pair(e.value);
  j["used"] = e.used;
  j["excluded"] = e.excluded;
  return j;
}

EceResult ece_from_json(const json& j) {
  EceResult e;
  e.value = j.at("fraction").get<double>();
  e.used = j.at("used").get<std::size_t>();
  e.excluded = j.at("excluded").get<std::size_t>();
  return e;
}

json to_json(const ReliabilityTable& table) {
  json j;
  j["perf"] = to_string(table.perf_kind);
  j["total"] = table.total;
  j["excluded"] = table.excluded;
  auto& bins = j["bins"] = json::array();
  for (const auto& b : table.bins)
    bins.push_back({{"lo", b.lo},
                    {"hi", b.hi},
                    {"count", b.count},
                    {"mean_confidence", b.mean_confidence},
                    {"mean_performance", b.mean_performance}});
  return j;
}

ReliabilityTable reliability_from_json(const json& j) {
  ReliabilityTable table;
  table.perf_kind = j.at("perf").get<std::string>() == "precision"
                        ? PerfKind::Precision
                        : PerfKind::Recall;
  table.total = j.at("total").get<std::size_t>();
  table.excluded = j.at("excluded").get<std::size_t>();
  for (const auto& bj : j.at("bins")) {
    ReliabilityBin b;
    b.lo = bj.at("lo").get<double>();
    b.hi = bj.at("hi").get<double>();
    b.count = bj.at("count").get<std::size_t>();
    b.mean_confidence = bj.at("mean_confidence").get<double>();
    b.mean_performance = bj.at("mean_performance").get<double>();
    table.bins.push_back(b);
  }
  return table;
}

}  // namespace

json to_json(const ScoredRun& run) {
  const RunSummary& s = run.summary;
  json j;
  j["schema"] = kScoresSchema;
  j["config"] = s.config;
  j["corpus_digest"] = s.corpus_digest;
  j["task"] = s.task;
  j["length_unit"] = s.length_unit;
  j["units_total"] = s.units_total;
  j["units_scored"] = s.units_scored;
  j["macro_recall"] = fraction_pair(s.macro_recall);
  if (s.macro_precision) j["macro_precision"] = fraction_pair(*s.macro_precision);
  if (s.mean_confidence) j["mean_confidence"] = fraction_pair(*s.mean_confidence);
  if (s.ece_recall) j["ece_recall"] = to_json(*s.ece_recall);
  if (s.ece_precision) j["ece_precision"] = to_json(*s.ece_precision);
  j["reliability_recall"] = to_json(s.reliability_recall);
  j["reliability_precision"] = to_json(s.reliability_precision);

  json behavior;
  behavior["records"] = s.behavior_records;
  if (s.mean_csr) behavior["csr"] = fraction_pair(*s.mean_csr);
  if (s.mean_esc) behavior["esc"] = fraction_pair(*s.mean_esc);
  if (s.mean_nsd) behavior["nsd"] = fraction_pair(*s.mean_nsd);
  behavior["csr_applicable"] = s.csr_applicable;
  behavior["esc_applicable"] = s.esc_applicable;
  behavior["nsd_applicable"] = s.nsd_applicable;
  j["behavior"] = behavior;

  j["exclusions"] = {{"endpoint_failed", s.exclusions.endpoint_failed},
                     {"empty_answers", s.exclusions.empty_answers},
                     {"missing_confidence", s.exclusions.missing_confidence}};

  auto& levels = j["levels"] = json::array();
  for (const auto& lv : s.levels) {
    json lj;
    lj["level"] = lv.level;
    lj["complexity_rank"] = lv.complexity_rank;
    lj["min_solutions"] = lv.min_solutions;
    lj["max_solutions"] = lv.max_solutions;
    lj["count"] = lv.count;
    lj["mean_recall"] = fraction_pair(lv.mean_recall);
    if (lv.mean_precision) lj["mean_precision"] = fraction_pair(*lv.mean_precision);
    if (lv.mean_confidence)
      lj["mean_confidence"] = fraction_pair(*lv.mean_confidence);
    levels.push_back(std::move(lj));
  }

  auto& checkpoints = j["checkpoints"] = json::array();
  for (const auto& cp : s.checkpoints) {
    json cj;
    cj["index"] = cp.index;
    cj["budget"] = cp.budget;
    cj["count"] = cp.count;
    cj["mean_recall"] = fraction_pair(cp.mean_recall);
    if (cp.mean_confidence)
      cj["mean_confidence"] = fraction_pair(*cp.mean_confidence);
    checkpoints.push_back(std::move(cj));
  }

  auto& records = j["records"] = json::array();
  for (const auto& score : run.items) {
    json rj;
    rj["key"] = score.key;
    rj["item_id"] = score.record.item_id;
    rj["level"] = score.record.level;
    rj["status"] = score.status;
    rj["recall"] = score.record.recall;
    if (score.record.precision) rj["precision"] = *score.record.precision;
    if (score.record.confidence) rj["confidence"] = *score.record.confidence;
    if (score.record.behavior) {
      const auto& b = *score.record.behavior;
      if (b.csr) rj["csr"] = *b.csr;
      if (b.esc) rj["esc"] = *b.esc;
      if (b.nsd) rj["nsd"] = *b.nsd;
      rj["behavior"] = true;
    }
    if (score.checkpoint) rj["checkpoint"] = *score.checkpoint;
    if (score.length) {
      rj["length"] = *score.length;
      rj["length_unit"] = score.length_unit;
    }
    records.push_back(std::move(rj));
  }
  return j;
}

ScoredRun scored_run_from_json(const json& j) {
  if (j.value("schema", "") != std::string(kScoresSchema))
    throw DataError(std::string("scores file schema must be \"") +
                    kScoresSchema + "\"");
  ScoredRun run;
  RunSummary& s = run.summary;
  s.config = j.at("config");
  s.corpus_digest = j.at("corpus_digest").get<std::string>();
  s.task = j.at("task").get<std::string>();
  s.length_unit = j.value("length_unit", "tokens");
  s.units_total = j.at("units_total").get<std::size_t>();
  s.units_scored = j.at("units_scored").get<std::size_t>();
  s.macro_recall = j.at("macro_recall").at("fraction").get<double>();
  if (j.contains("macro_precision"))
    s.macro_precision = j["macro_precision"]["fraction"].get<double>();
  if (j.contains("mean_confidence"))
    s.mean_confidence = j["mean_confidence"]["fraction"].get<double>();
  if (j.contains("ece_recall")) s.ece_recall = ece_from_json(j["ece_recall"]);
  if (j.contains("ece_precision"))
    s.ece_precision = ece_from_json(j["ece_precision"]);
  s.reliability_recall = reliability_from_json(j.at("reliability_recall"));
  s.reliability_precision = reliability_from_json(j.at("reliability_precision"));

  const json& behavior = j.at("behavior");
  s.behavior_records = behavior.at("records").get<std::size_t>();
  if (behavior.contains("csr")) s.mean_csr = behavior["csr"]["fraction"].get<double>();
  if (behavior.contains("esc")) s.mean_esc = behavior["esc"]["fraction"].get<double>();
  if (behavior.contains("nsd")) s.mean_nsd = behavior["nsd"]["fraction"].get<double>();
  s.csr_applicable = behavior.value("csr_applicable", std::size_t{0});
  s.esc_applicable = behavior.value("esc_applicable", std::size_t{0});
  s.nsd_applicable = behavior.value("nsd_applicable", std::size_t{0});

  const json& exclusions = j.at("exclusions");
  s.exclusions.endpoint_failed = exclusions.at("endpoint_failed").get<std::size_t>();
  s.exclusions.empty_answers = exclusions.at("empty_answers").get<std::size_t>();
  s.exclusions.missing_confidence =
      exclusions.at("missing_confidence").get<std::size_t>();

  for (const auto& lj : j.at("levels")) {
    LevelSummary lv;
    lv.level = lj.at("level").get<int>();
    lv.complexity_rank = lj.at("complexity_rank").get<int>();
    lv.min_solutions = lj.at("min_solutions").get<std::int64_t>();
    lv.max_solutions = lj.at("max_solutions").get<std::int64_t>();
    lv.count = lj.at("count").get<std::size_t>();
    lv.mean_recall = lj.at("mean_recall").at("fraction").get<double>();
    if (lj.contains("mean_precision"))
      lv.mean_precision = lj["mean_precision"]["fraction"].get<double>();
    if (lj.contains("mean_confidence"))
      lv.mean_confidence = lj["mean_confidence"]["fraction"].get<double>();
    s.levels.push_back(lv);
  }
  for (const auto& cj : j.at("checkpoints")) {
    CheckpointSummary cp;
    cp.index = cj.at("index").get<std::size_t>();
    cp.budget = cj.at("budget").get<long>();
    cp.count = cj.at("count").get<std::size_t>();
    cp.mean_recall = cj.at("mean_recall").at("fraction").get<double>();
    if (cj.contains("mean_confidence"))
      cp.mean_confidence = cj["mean_confidence"]["fraction"].get<double>();
    s.checkpoints.push_back(cp);
  }

  for (const auto& rj : j.at("records")) {
    ItemScore score;
    score.key = rj.at("key").get<std::string>();
    score.record.item_id = rj.at("item_id").get<std::string>();
    score.record.level = rj.at("level").get<int>();
    score.status = rj.at("status").get<std::string>();
    score.record.recall = rj.at("recall").get<double>();
    if (rj.contains("precision"))
      score.record.precision = rj["precision"].get<double>();
    if (rj.contains("confidence"))
      score.record.confidence = rj["confidence"].get<double>();
    if (rj.value("behavior", false)) {
      BehaviorScores b;
      if (rj.contains("csr")) b.csr = rj["csr"].get<double>();
      if (rj.contains("esc")) b.esc = rj["esc"].get<double>();
      if (rj.contains("nsd")) b.nsd = rj["nsd"].get<double>();
      score.record.behavior = b;
    }
    if (rj.contains("checkpoint")) score.checkpoint = rj["checkpoint"].get<long>();
    if (rj.contains("length")) {
      score.length = rj["length"].get<long>();
      score.length_unit = rj.value("length_unit", "tokens");
    }
    run.items.push_back(std::move(score));
  }
  return run;
}

ScoredRun load_scored_run(const std::string& path) {
  return scored_run_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Figure tables

namespace {

void write_reliability_csv(const ReliabilityTable& table,
                           const std::string& path) {
  std::ostringstream out;
  out << "bin_index,bin_low,bin_high,count,mean_confidence,mean_performance\n";
  for (std::size_t i = 0; i < table.bins.size(); ++i) {
    const auto& b = table.bins[i];
    out << i << ',' << num(b.lo) << ',' << num(b.hi) << ',' << b.count << ','
        << num(b.mean_confidence) << ',' << num(b.mean_performance) << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace

void write_score_report(const ScoredRun& run, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_file_atomic(out_dir + "/scores.json", to_json(run).dump(2) + "\n");

  // Joint (recall, confidence) histogram over equal-width bins.
  {
    constexpr int kBins = 10;
    std::vector<std::vector<std::size_t>> grid(
        kBins, std::vector<std::size_t>(kBins, 0));
    for (const auto& score : run.items) {
      if (!score.record.confidence) continue;
      const int rb = confidence_bin(score.record.recall, kBins);
      const int cb = confidence_bin(*score.record.confidence, kBins);
      ++grid[rb][cb];
    }
    std::ostringstream out;
    out << "recall_bin,confidence_bin,count\n";
    for (int rb = 0; rb < kBins; ++rb)
      for (int cb = 0; cb < kBins; ++cb)
        out << rb << ',' << cb << ',' << grid[rb][cb] << '\n';
    write_file_atomic(out_dir + "/fig2_joint_histogram.csv", out.str());
  }

  write_reliability_csv(run.summary.reliability_recall,
                        out_dir + "/fig3_reliability_recall.csv");
  write_reliability_csv(run.summary.reliability_precision,
                        out_dir + "/fig3_reliability_precision.csv");

  {
    std::ostringstream out;
    out << "level,complexity_rank,min_solutions,max_solutions,count,"
           "mean_recall,mean_precision,mean_confidence\n";
    for (const auto& lv : run.summary.levels) {
      out << lv.level << ',' << lv.complexity_rank << ',' << lv.min_solutions
          << ',' << lv.max_solutions << ',' << lv.count << ','
          << num(lv.mean_recall) << ',';
      if (lv.mean_precision) out << num(*lv.mean_precision);
      out << ',';
      if (lv.mean_confidence) out << num(*lv.mean_confidence);
      out << '\n';
    }
    write_file_atomic(out_dir + "/fig5_complexity.csv", out.str());
  }

  {
    std::ostringstream out;
    out << "key,length,length_unit,confidence,recall\n";
    for (const auto& score : run.items) {
      if (!score.length) continue;
      out << csv_escape(score.key) << ',' << *score.length << ','
          << score.length_unit << ',';
      if (score.record.confidence) out << num(*score.record.confidence);
      out << ',' << num(score.record.recall) << '\n';
    }
    write_file_atomic(out_dir + "/fig5_length.csv", out.str());
  }

  if (!run.summary.checkpoints.empty()) {
    std::ostringstream out;
    out << "checkpoint_index,budget_tokens,count,mean_recall,mean_confidence\n";
    for (const auto& cp : run.summary.checkpoints) {
      out << cp.index << ',' << cp.budget << ',' << cp.count << ','
          << num(cp.mean_recall) << ',';
      if (cp.mean_confidence) out << num(*cp.mean_confidence);
      out << '\n';
    }
    write_file_atomic(out_dir + "/fig6_checkpoints.csv", out.str());
  }
}

void write_movement_report(const ScoredRun& base, const ScoredRun& treat,
                           const std::string& out_dir) {
  if (base.summary.corpus_digest != treat.summary.corpus_digest)
    throw DataError(
        "movement vectors need both runs scored against the same corpus "
        "(digests differ)");
  fs::create_directories(out_dir);

  std::map<std::string, const ItemScore*> treat_by_key;
  for (const auto& score : treat.items) treat_by_key[score.key] = &score;

  std::ostringstream out;
  out << "key,confidence_base,recall_base,confidence_treat,recall_treat,"
         "d_confidence,d_recall\n";
  for (const auto& from : base.items) {
    if (!from.record.confidence) continue;
    const auto it = treat_by_key.find(from.key);
    if (it == treat_by_key.end() || !it->second->record.confidence) continue;
    const ItemScore& to = *it->second;
    const double dc = *to.record.confidence - *from.record.confidence;
    const double dr = to.record.recall - from.record.recall;
    out << csv_escape(from.key) << ',' << num(*from.record.confidence) << ','
        << num(from.record.recall) << ',' << num(*to.record.confidence) << ','
        << num(to.record.recall) << ',' << num(dc) << ',' << num(dr) << '\n';
  }
  write_file_atomic(out_dir + "/fig4_movement.csv", out.str());
}

void write_temperature_report(const std::vector<ScoredRun>& runs,
                              const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ostringstream out;
  out << "run_index,temperature,units_scored,macro_recall,macro_precision,"
         "mean_confidence,ece_recall\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunSummary& s = runs[i].summary;
    out << i << ',' << num(s.config.value("temperature", 0.0)) << ','
        << s.units_scored << ',' << num(s.macro_recall) << ',';
    if (s.macro_precision) out << num(*s.macro_precision);
    out << ',';
    if (s.mean_confidence) out << num(*s.mean_confidence);
    out << ',';
    if (s.ece_recall) out << num(s.ece_recall->value);
    out << '\n';
  }
  write_file_atomic(out_dir + "/fig5_temperature.csv", out.str());
}

}  // namespace musobench
