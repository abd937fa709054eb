#pragma once

#include <optional>
#include <string>
#include <vector>

#include "musobench/model.hpp"

namespace musobench {

enum class PerfKind { Precision, Recall };

std::string to_string(PerfKind kind);

/// |Y ∩ Ŷ| / |Y| under canonical structural equality. Not applicable
/// (nullopt) when the model produced nothing.
std::optional<double> precision(const SolutionSet& predicted,
                                const SolutionSet& truth);

/// |Y ∩ Ŷ| / |Ŷ|. The primary metric for multi-solution tasks.
/// Throws DataError on an empty truth set: that is corpus corruption.
double recall(const SolutionSet& predicted, const SolutionSet& truth);

/// Two-round behavioral rates. Each component is nullopt exactly when its
/// denominator is zero.
struct BehaviorScores {
  std::optional<double> csr;  // retention of round-1 correct solutions
  std::optional<double> esc;  // correction of round-1 errors
  std::optional<double> nsd;  // newly discovered correct solutions
};

BehaviorScores behavior(const SolutionSet& round1, const SolutionSet& round2,
                        const SolutionSet& truth);

/// Per-item metric bundle. Confidence is stored normalized to [0,1]
/// (verbal 0-100 scale divided by 100 at construction).
struct ScoreRecord {
  std::string item_id;
  std::optional<double> precision;
  double recall = 0.0;
  std::optional<double> confidence;
  std::optional<BehaviorScores> behavior;
  int level = 0;

  /// Performance under the given kind; nullopt when not applicable.
  std::optional<double> perf(PerfKind kind) const;
};

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;  // exclusive except the last bin, which includes 1.0
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double mean_performance = 0.0;
};

struct ReliabilityTable {
  PerfKind perf_kind = PerfKind::Recall;
  std::vector<ReliabilityBin> bins;  // M entries, empty ones count 0
  std::size_t total = 0;             // records binned
  std::size_t excluded = 0;          // missing confidence or n/a performance
};

struct EceResult {
  double value = 0.0;  // fraction in [0,1]
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Bin index for confidence c under M equal-width bins of [0,1],
/// left-closed right-open, last bin closed at 1.0.
int confidence_bin(double c, int num_bins);

/// Weighted mean absolute gap between per-bin mean performance and mean
/// confidence. Records lacking confidence or with inapplicable performance
/// are excluded and counted. Throws DataError when nothing is usable.
EceResult ece(const std::vector<ScoreRecord>& records, int num_bins,
              PerfKind kind);

/// The binning behind ece; intentionally a second computation path so the
/// two can be cross-checked.
ReliabilityTable reliability(const std::vector<ScoreRecord>& records,
                             int num_bins, PerfKind kind);

/// Recomputes the weighted-gap sum from a finished table. Must equal
/// ece(...) exactly on the same records.
double ece_from_table(const ReliabilityTable& table);

inline constexpr int kDefaultEceBins = 10;

}  // namespace musobench
