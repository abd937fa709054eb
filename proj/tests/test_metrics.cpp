#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "musobench/metrics.hpp"
#include "musobench/rng.hpp"

using namespace musobench;

namespace {

SubsetSolution ss(std::vector<std::int64_t> members) {
  return SubsetSolution{std::move(members)};
}

SolutionSet subsets(std::vector<SubsetSolution> sols) {
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.subsets = std::move(sols);
  set.canonicalize();
  return set;
}

const SolutionSet kTruth = subsets({ss({1}), ss({2}), ss({3}), ss({4})});
const SolutionSet kY1 = subsets({ss({1}), ss({2}), ss({5})});
const SolutionSet kY2 = subsets({ss({1}), ss({3}), ss({6})});

}  // namespace

TEST_CASE("precision golden values") {
  const auto p = precision(kY1, kTruth);
  REQUIRE(p.has_value());
  CHECK(*p == 2.0 / 3.0);

  CHECK(*precision(kTruth, kTruth) == 1.0);
  CHECK_FALSE(precision(SolutionSet::empty(TaskKind::SubsetSum), kTruth)
                  .has_value());

  const SolutionSet wrong_kind = SolutionSet::empty(TaskKind::TimeTabling);
  CHECK_THROWS_AS(precision(wrong_kind, kTruth), DataError);
}

TEST_CASE("recall golden values") {
  CHECK(recall(kY1, kTruth) == 0.5);
  CHECK(recall(kTruth, kTruth) == 1.0);
  CHECK(recall(SolutionSet::empty(TaskKind::SubsetSum), kTruth) == 0.0);
  CHECK_THROWS_AS(recall(kY1, SolutionSet::empty(TaskKind::SubsetSum)),
                  DataError);
}

TEST_CASE("recall is monotone under answer growth") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SubsetSolution> smaller;
    for (int v = 1; v <= 8; ++v)
      if (rng.bernoulli(0.4)) smaller.push_back(ss({v}));
    std::vector<SubsetSolution> larger = smaller;
    for (int v = 9; v <= 12; ++v)
      if (rng.bernoulli(0.5)) larger.push_back(ss({v}));
    const SolutionSet small_set = subsets(smaller);
    const SolutionSet large_set = subsets(larger);
    CHECK(recall(small_set, kTruth) <= recall(large_set, kTruth));
  }
}

TEST_CASE("behavioral goldens") {
  const BehaviorScores s = behavior(kY1, kY2, kTruth);
  REQUIRE(s.csr.has_value());
  REQUIRE(s.esc.has_value());
  REQUIRE(s.nsd.has_value());
  CHECK(*s.csr == 0.5);
  CHECK(*s.esc == 1.0);
  CHECK(*s.nsd == 0.25);
}

TEST_CASE("behavioral edge cases") {
  const BehaviorScores stable = behavior(kTruth, kTruth, kTruth);
  CHECK(*stable.csr == 1.0);
  CHECK_FALSE(stable.esc.has_value());
  CHECK(*stable.nsd == 0.0);

  const BehaviorScores unchanged = behavior(kY1, kY1, kTruth);
  CHECK(*unchanged.csr == 1.0);
  CHECK(*unchanged.esc == 0.0);
  CHECK(*unchanged.nsd == 0.0);

  const SolutionSet all_wrong = subsets({ss({9}), ss({10})});
  const BehaviorScores hopeless = behavior(all_wrong, all_wrong, kTruth);
  CHECK_FALSE(hopeless.csr.has_value());
  CHECK(*hopeless.esc == 0.0);
  CHECK(*hopeless.nsd == 0.0);

  const SolutionSet empty = SolutionSet::empty(TaskKind::SubsetSum);
  const BehaviorScores silent = behavior(empty, empty, kTruth);
  CHECK_FALSE(silent.csr.has_value());
  CHECK_FALSE(silent.esc.has_value());
  CHECK(*silent.nsd == 0.0);
}

TEST_CASE("second-round set equal to the first always gives zero discovery") {
  Rng rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SubsetSolution> sols;
    for (int v = 1; v <= 10; ++v)
      if (rng.bernoulli(0.5)) sols.push_back(ss({v}));
    const SolutionSet y = subsets(sols);
    const BehaviorScores s = behavior(y, y, kTruth);
    REQUIRE(s.nsd.has_value());
    CHECK(*s.nsd == 0.0);
  }
}

TEST_CASE("confidence binning is left-closed right-open with a closed top") {
  CHECK(confidence_bin(0.0, 10) == 0);
  CHECK(confidence_bin(0.05, 10) == 0);
  CHECK(confidence_bin(0.1, 10) == 1);
  CHECK(confidence_bin(0.95, 10) == 9);
  CHECK(confidence_bin(1.0, 10) == 9);
  CHECK(confidence_bin(0.5, 1) == 0);
  CHECK(confidence_bin(0.999999, 10) == 9);
}

TEST_CASE("one-bin calibration golden") {
  std::vector<ScoreRecord> records(2);
  records[0].recall = 0.5;
  records[0].confidence = 0.8;
  records[1].recall = 0.5;
  records[1].confidence = 0.6;

  const EceResult result = ece(records, 1, PerfKind::Recall);
  CHECK(std::fabs(result.value - 0.2) < 1e-12);
  CHECK(result.used == 2);
  CHECK(result.excluded == 0);

  const ReliabilityTable table = reliability(records, 1, PerfKind::Recall);
  REQUIRE(table.bins.size() == 1);
  CHECK(table.bins[0].count == 2);
  CHECK(std::fabs(table.bins[0].mean_confidence - 0.7) < 1e-12);
  CHECK(table.bins[0].mean_performance == 0.5);
}

TEST_CASE("perfect calibration scores zero for any bin count") {
  std::vector<ScoreRecord> records(20);
  Rng rng(79);
  for (auto& r : records) {
    r.recall = rng.next_double();
    r.confidence = r.recall;
  }
  for (int bins : {1, 3, 10, 50})
    CHECK(ece(records, bins, PerfKind::Recall).value == 0.0);
}

TEST_CASE("overconfident records approach the full gap") {
  std::vector<ScoreRecord> records(50);
  for (auto& r : records) {
    r.recall = 0.05;
    r.confidence = 0.95;
  }
  const EceResult result = ece(records, kDefaultEceBins, PerfKind::Recall);
  CHECK(std::fabs(result.value - 0.9) < 1e-12);
}

TEST_CASE("records without confidence or applicable performance are excluded") {
  std::vector<ScoreRecord> records(4);
  records[0].recall = 1.0;
  records[0].precision = 1.0;
  records[0].confidence = 1.0;
  records[1].recall = 0.0;  // no confidence
  records[2].recall = 0.5;
  records[2].confidence = 0.5;
  records[2].precision = std::nullopt;
  records[3].recall = 0.25;
  records[3].confidence = 0.75;
  records[3].precision = 0.5;

  const EceResult by_recall = ece(records, 10, PerfKind::Recall);
  CHECK(by_recall.used == 3);
  CHECK(by_recall.excluded == 1);

  const EceResult by_precision = ece(records, 10, PerfKind::Precision);
  CHECK(by_precision.used == 2);
  CHECK(by_precision.excluded == 2);

  std::vector<ScoreRecord> unusable(3);
  CHECK_THROWS_AS(ece(unusable, 10, PerfKind::Recall), DataError);
  CHECK_THROWS_AS(ece(records, 0, PerfKind::Recall), ConfigError);
}

TEST_CASE("direct ece equals the reliability-table recomputation exactly") {
  Rng rng(80);
  std::vector<ScoreRecord> records(10000);
  for (auto& r : records) {
    r.recall = rng.next_double();
    if (rng.bernoulli(0.8)) r.precision = rng.next_double();
    if (rng.bernoulli(0.9)) r.confidence = rng.next_double();
  }
  for (PerfKind kind : {PerfKind::Recall, PerfKind::Precision}) {
    for (int bins : {1, 7, 10}) {
      const EceResult direct = ece(records, bins, kind);
      const ReliabilityTable table = reliability(records, bins, kind);
      CHECK(direct.value == ece_from_table(table));
      CHECK(direct.used == table.total);
      CHECK(direct.excluded == table.excluded);

      std::size_t binned = 0;
      for (const auto& bin : table.bins) binned += bin.count;
      CHECK(binned == table.total);
    }
  }
}

TEST_CASE("score record exposes performance by kind") {
  ScoreRecord r;
  r.recall = 0.4;
  r.precision = 0.6;
  CHECK(*r.perf(PerfKind::Recall) == 0.4);
  CHECK(*r.perf(PerfKind::Precision) == 0.6);
  r.precision = std::nullopt;
  CHECK_FALSE(r.perf(PerfKind::Precision).has_value());
  CHECK(to_string(PerfKind::Recall) == "recall");
  CHECK(to_string(PerfKind::Precision) == "precision");
}
