#include "musobench/metrics.hpp"

#include <cmath>

namespace musobench {

std::string to_string(PerfKind kind) {
  return kind == PerfKind::Precision ? "precision" : "recall";
}

std::optional<double> precision(const SolutionSet& predicted,
                                const SolutionSet& truth) {
  if (predicted.kind != truth.kind)
    throw DataError("precision: task kind mismatch");
  if (predicted.size() == 0) return std::nullopt;
  return static_cast<double>(intersection_size(predicted, truth)) /
         static_cast<double>(predicted.size());
}

double recall(const SolutionSet& predicted, const SolutionSet& truth) {
  if (predicted.kind != truth.kind)
    throw DataError("recall: task kind mismatch");
  if (truth.size() == 0)
    throw DataError("recall: empty ground-truth set (corpus integrity)");
  return static_cast<double>(intersection_size(predicted, truth)) /
         static_cast<double>(truth.size());
}

BehaviorScores behavior(const SolutionSet& round1, const SolutionSet& round2,
                        const SolutionSet& truth) {
  BehaviorScores out;
  const SolutionSet correct1 = set_intersection(round1, truth);
  const SolutionSet correct2 = set_intersection(round2, truth);
  const SolutionSet errors1 = set_difference(round1, truth);
  const SolutionSet errors2 = set_difference(round2, truth);

  if (correct1.size() > 0)
    out.csr = static_cast<double>(intersection_size(correct1, correct2)) /
              static_cast<double>(correct1.size());
  if (errors1.size() > 0)
    out.esc = 1.0 - static_cast<double>(intersection_size(errors1, errors2)) /
                        static_cast<double>(errors1.size());
  if (truth.size() > 0)
    out.nsd = static_cast<double>(set_difference(correct2, round1).size()) /
              static_cast<double>(truth.size());
  return out;
}

std::optional<double> ScoreRecord::perf(PerfKind kind) const {
  if (kind == PerfKind::Recall) return recall;
  return precision;
}

int confidence_bin(double c, int num_bins) {
  // Nominal index, then nudged so membership agrees with the exact
  // double-valued bin edges m / num_bins.
  int idx = static_cast<int>(std::floor(c * num_bins));
  if (idx > 0 && c < static_cast<double>(idx) / num_bins) --idx;
  if (idx < num_bins - 1 && c >= static_cast<double>(idx + 1) / num_bins) ++idx;
  if (idx < 0) idx = 0;
  if (idx > num_bins - 1) idx = num_bins - 1;  // c == 1.0 joins the top bin
  return idx;
}

namespace {

struct BinSums {
  std::size_t count = 0;
  double conf_sum = 0.0;
  double perf_sum = 0.0;
};

struct Binned {
  std::vector<BinSums> bins;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

Binned bin_records(const std::vector<ScoreRecord>& records, int num_bins,
                   PerfKind kind) {
  if (num_bins < 1) throw ConfigError("ece requires at least one bin");
  Binned out;
  out.bins.resize(static_cast<std::size_t>(num_bins));
  for (const auto& rec : records) {
    const auto perf = rec.perf(kind);
    if (!rec.confidence || !perf) {
      ++out.excluded;
      continue;
    }
    auto& bin =
        out.bins[static_cast<std::size_t>(confidence_bin(*rec.confidence, num_bins))];
    ++bin.count;
    bin.conf_sum += *rec.confidence;
    bin.perf_sum += *perf;
    ++out.used;
  }
  return out;
}

}  // namespace

EceResult ece(const std::vector<ScoreRecord>& records, int num_bins,
              PerfKind kind) {
  const Binned binned = bin_records(records, num_bins, kind);
  if (binned.used == 0)
    throw DataError("ece: no records with confidence and applicable " +
                    to_string(kind));
  double acc = 0.0;
  for (const auto& bin : binned.bins) {
    if (bin.count == 0) continue;
    const double mean_conf = bin.conf_sum / static_cast<double>(bin.count);
    const double mean_perf = bin.perf_sum / static_cast<double>(bin.count);
    const double weight =
        static_cast<double>(bin.count) / static_cast<double>(binned.used);
    acc += weight * std::abs(mean_perf - mean_conf);
  }
  return {acc, binned.used, binned.excluded};
}

ReliabilityTable reliability(const std::vector<ScoreRecord>& records,
                             int num_bins, PerfKind kind) {
  const Binned binned = bin_records(records, num_bins, kind);
  ReliabilityTable table;
  table.perf_kind = kind;
  table.total = binned.used;
  table.excluded = binned.excluded;
  table.bins.resize(static_cast<std::size_t>(num_bins));
  for (int m = 0; m < num_bins; ++m) {
    auto& bin = table.bins[static_cast<std::size_t>(m)];
    bin.lo = static_cast<double>(m) / num_bins;
    bin.hi = static_cast<double>(m + 1) / num_bins;
    const auto& sums = binned.bins[static_cast<std::size_t>(m)];
    bin.count = sums.count;
    if (sums.count > 0) {
      bin.mean_confidence = sums.conf_sum / static_cast<double>(sums.count);
      bin.mean_performance = sums.perf_sum / static_cast<double>(sums.count);
    }
  }
  return table;
}

double ece_from_table(const ReliabilityTable& table) {
  double acc = 0.0;
  for (const auto& bin : table.bins) {
    if (bin.count == 0) continue;
    const double weight =
        static_cast<double>(bin.count) / static_cast<double>(table.total);
    acc += weight * std::abs(bin.mean_performance - bin.mean_confidence);
  }
  return acc;
}

}  // namespace musobench
