#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "musobench/harness.hpp"
#include "musobench/metrics.hpp"
#include "musobench/mitigate.hpp"

namespace musobench {

inline constexpr const char* kScoresSchema = "musobench.scores/1";

/// One scored unit: an item, one self-consistency aggregate, or one
/// (item, checkpoint) pair for reflection runs.
struct ItemScore {
  std::string key;
  ScoreRecord record;
  std::string status;  // complete | parse-empty
  std::optional<long> checkpoint;      // reflection budget in tokens
  std::optional<long> length;          // generated reasoning length
  std::string length_unit = "tokens";  // tokens | words (fallback)
};

struct LevelSummary {
  int level = 0;
  int complexity_rank = 0;  // larger = smaller solution space = harder
  std::int64_t min_solutions = 0;
  std::int64_t max_solutions = 0;
  std::size_t count = 0;
  double mean_recall = 0.0;
  std::optional<double> mean_precision;
  std::optional<double> mean_confidence;
};

struct CheckpointSummary {
  std::size_t index = 0;
  long budget = 0;
  std::size_t count = 0;
  double mean_recall = 0.0;
  std::optional<double> mean_confidence;
};

struct Exclusions {
  std::size_t endpoint_failed = 0;     // units dropped entirely
  std::size_t empty_answers = 0;       // precision not applicable
  std::size_t missing_confidence = 0;  // excluded from calibration
};

struct RunSummary {
  nlohmann::json config;  // resolved run config echoed from run.json
  std::string corpus_digest;
  std::string task;
  std::string length_unit = "tokens";  // "words" when any unit fell back
  std::size_t units_total = 0;
  std::size_t units_scored = 0;

  double macro_recall = 0.0;
  std::optional<double> macro_precision;
  std::optional<double> mean_confidence;
  std::optional<EceResult> ece_recall;
  std::optional<EceResult> ece_precision;
  ReliabilityTable reliability_recall;
  ReliabilityTable reliability_precision;

  std::size_t behavior_records = 0;
  std::optional<double> mean_csr;
  std::optional<double> mean_esc;
  std::optional<double> mean_nsd;
  std::size_t csr_applicable = 0;
  std::size_t esc_applicable = 0;
  std::size_t nsd_applicable = 0;

  Exclusions exclusions;
  std::vector<LevelSummary> levels;
  std::vector<CheckpointSummary> checkpoints;  // reflection runs only
};

struct ScoredRun {
  RunSummary summary;
  std::vector<ItemScore> items;
};

/// Scores a finished run directory against its corpus. `corpus_digest` must
/// equal the digest recorded in run.json; a mismatch refuses with DataError
/// so a drifted corpus can never be scored silently. Pure function of the
/// persisted artifacts.
ScoredRun score_run(const std::string& run_dir, const Corpus& corpus,
                    const std::string& corpus_digest);

nlohmann::json to_json(const ScoredRun& run);
ScoredRun scored_run_from_json(const nlohmann::json& j);
ScoredRun load_scored_run(const std::string& path);

/// Writes scores.json plus the single-run figure tables into `out_dir`:
/// fig2_joint_histogram.csv, fig3_reliability_recall.csv,
/// fig3_reliability_precision.csv, fig5_complexity.csv, fig5_length.csv,
/// and fig6_checkpoints.csv for reflection runs.
void write_score_report(const ScoredRun& run, const std::string& out_dir);

/// fig4_movement.csv: per-key (confidence, recall) shift from `base` to
/// `treat`. Both runs must be scored against the same corpus digest.
void write_movement_report(const ScoredRun& base, const ScoredRun& treat,
                           const std::string& out_dir);

/// fig5_temperature.csv: one row per scored run, keyed by its configured
/// temperature.
void write_temperature_report(const std::vector<ScoredRun>& runs,
                              const std::string& out_dir);

}  // namespace musobench
