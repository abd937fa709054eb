#include "musobench/selftest.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "musobench/corpus.hpp"
#include "musobench/metrics.hpp"
#include "musobench/mitigate.hpp"
#include "musobench/oracle.hpp"
#include "musobench/protocol.hpp"
#include "musobench/rng.hpp"

namespace musobench {

TimeTablingInstance reference_timetabling_instance() {
  TimeTablingInstance inst;
  inst.courses = {
      {0, {3, 4}, {8}, 2},
      {1, {0, 4}, {3}, 2},
      {2, {3, 4}, {0}, 1},
  };
  inst.num_times = 5;
  inst.num_rooms = 9;
  inst.num_teachers = 3;
  return inst;
}

SubsetSumInstance reference_subsetsum_instance() {
  return SubsetSumInstance{{18, 25, 16, 45, 48, 40, 38, 14, 22, 8}, 62, 0};
}

SolutionSet reference_subsetsum_solutions() {
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.subsets = {
      SubsetSolution{{8, 14, 18, 22}},
      SubsetSolution{{8, 14, 40}},
      SubsetSolution{{8, 16, 38}},
      SubsetSolution{{14, 48}},
      SubsetSolution{{22, 40}},
  };
  return set;
}

std::vector<ScheduleSolution> reference_timetabling_known() {
  return {
      ScheduleSolution{{{0, 3, 8, 2}, {1, 0, 3, 2}, {2, 3, 0, 1}}},
      ScheduleSolution{{{0, 3, 8, 2}, {1, 0, 3, 2}, {2, 4, 0, 1}}},
      ScheduleSolution{{{0, 3, 8, 2}, {1, 4, 3, 2}, {2, 4, 0, 1}}},
  };
}

namespace {

struct Battery {
  std::ostream& out;
  int failed = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << "\n";
    if (!ok) ++failed;
  }
};

SubsetSolution ss(std::vector<std::int64_t> members) {
  return SubsetSolution{std::move(members)};
}

SolutionSet subsets_of(std::vector<SubsetSolution> sols) {
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.subsets = std::move(sols);
  set.canonicalize();
  return set;
}

void check_reference_enumeration(Battery& b) {
  const SubsetSumInstance ss_inst = reference_subsetsum_instance();
  const SolutionSet ss_got = solve_subsetsum(ss_inst).solutions;
  const SolutionSet ss_want = reference_subsetsum_solutions();
  b.check("subset-sum reference: five known subsets, canonical order",
          ss_got == ss_want,
          "solver returned " + std::to_string(ss_got.size()) + " subsets");
  b.check("subset-sum reference: exhaustive scan agrees",
          ss_got == brute_force(ss_inst));

  const TimeTablingInstance tt_inst = reference_timetabling_instance();
  const SolutionSet tt_got = solve_timetabling(tt_inst).solutions;
  SolutionSet known = SolutionSet::empty(TaskKind::TimeTabling);
  for (const auto& sol : reference_timetabling_known()) known.add(sol);
  known.canonicalize();
  b.check("timetabling reference: six schedules in total", tt_got.size() == 6,
          "solver returned " + std::to_string(tt_got.size()));
  b.check("timetabling reference: all three known schedules present",
          intersection_size(tt_got, known) == known.size());
  b.check("timetabling reference: exhaustive scan agrees",
          tt_got == brute_force(tt_inst));
}

void check_solver_agreement(Battery& b) {
  const std::uint64_t root = 0x5e1f7e57;
  int ss_bad = -1;
  for (int i = 0; i < 200; ++i) {
    const auto inst = gen_subsetsum(SubsetSumParams{}, derive_seed(root, i));
    if (solve_subsetsum(inst).solutions != brute_force(inst)) {
      ss_bad = i;
      break;
    }
  }
  b.check("subset-sum solver matches exhaustive scan on 200 seeded instances",
          ss_bad < 0, "first divergence at instance " + std::to_string(ss_bad));

  int tt_bad = -1;
  for (int i = 0; i < 100; ++i) {
    const auto inst =
        gen_timetabling(TimeTablingParams{}, derive_seed(root + 1, i));
    if (solve_timetabling(inst).solutions != brute_force(inst)) {
      tt_bad = i;
      break;
    }
  }
  b.check("timetabling solver matches exhaustive scan on 100 seeded instances",
          tt_bad < 0, "first divergence at instance " + std::to_string(tt_bad));
}

void check_set_metrics(Battery& b) {
  const SolutionSet truth = subsets_of({ss({1}), ss({2}), ss({3}), ss({4})});
  const SolutionSet y1 = subsets_of({ss({1}), ss({2}), ss({5})});

  const auto p = precision(y1, truth);
  b.check("precision golden 2/3", p && *p == 2.0 / 3.0);
  b.check("recall golden 1/2", recall(y1, truth) == 0.5);
  b.check("precision identity", *precision(truth, truth) == 1.0 &&
                                    recall(truth, truth) == 1.0);

  const SolutionSet none = SolutionSet::empty(TaskKind::SubsetSum);
  b.check("empty answer: precision not applicable, recall zero",
          !precision(none, truth).has_value() && recall(none, truth) == 0.0);
}

void check_behavior_metrics(Battery& b) {
  const SolutionSet truth = subsets_of({ss({1}), ss({2}), ss({3}), ss({4})});
  const SolutionSet y1 = subsets_of({ss({1}), ss({2}), ss({5})});
  const SolutionSet y2 = subsets_of({ss({1}), ss({3}), ss({6})});

  const BehaviorScores s = behavior(y1, y2, truth);
  b.check("behavior goldens: retention 1/2, correction 1, discovery 1/4",
          s.csr && *s.csr == 0.5 && s.esc && *s.esc == 1.0 && s.nsd &&
              *s.nsd == 0.25);

  const BehaviorScores stable = behavior(truth, truth, truth);
  b.check("behavior on a perfect stable answer",
          stable.csr && *stable.csr == 1.0 && !stable.esc.has_value() &&
              stable.nsd && *stable.nsd == 0.0);

  const BehaviorScores unchanged = behavior(y1, y1, truth);
  b.check("behavior on an unchanged answer with errors",
          unchanged.esc && *unchanged.esc == 0.0 && unchanged.nsd &&
              *unchanged.nsd == 0.0);
}

void check_calibration(Battery& b) {
  std::vector<ScoreRecord> two(2);
  two[0].recall = 0.5;
  two[0].confidence = 0.8;
  two[1].recall = 0.5;
  two[1].confidence = 0.6;
  const EceResult one_bin = ece(two, 1, PerfKind::Recall);
  b.check("one-bin calibration gap 0.2",
          std::fabs(one_bin.value - 0.2) < 1e-12 && one_bin.used == 2);

  std::vector<ScoreRecord> exact(5);
  for (int i = 0; i < 5; ++i) {
    exact[i].recall = 0.1 + 0.2 * i;
    exact[i].confidence = exact[i].recall;
  }
  b.check("perfectly calibrated records score zero",
          ece(exact, kDefaultEceBins, PerfKind::Recall).value == 0.0);

  Rng rng(42);
  std::vector<ScoreRecord> spread(500);
  for (auto& r : spread) {
    r.recall = rng.next_double();
    r.precision = rng.next_double();
    if (rng.bernoulli(0.9)) r.confidence = rng.next_double();
  }
  bool consistent = true;
  for (PerfKind kind : {PerfKind::Recall, PerfKind::Precision}) {
    const EceResult direct = ece(spread, kDefaultEceBins, kind);
    const ReliabilityTable table = reliability(spread, kDefaultEceBins, kind);
    if (direct.value != ece_from_table(table) || direct.used != table.total)
      consistent = false;
  }
  b.check("calibration gap equals its reliability-table recomputation",
          consistent);
}

void check_aggregation(Battery& b) {
  const SolutionSet just_a = subsets_of({ss({1})});
  const SolutionSet a_and_b = subsets_of({ss({1}), ss({2})});

  const AggregatedResult vote = aggregate_paths(
      Strategy::ScVote, {{just_a, 60}, {a_and_b, 80}});
  const bool conf_ok =
      vote.final_confidence &&
      std::fabs(*vote.final_confidence * 100.0 - 110.0 / 1.5) < 1e-9;
  b.check("vote golden: union with confidence 73.3",
          vote.final_set == a_and_b && conf_ok &&
              vote.supports == std::vector<double>{1.0, 0.5});

  const AggregatedResult med = aggregate_paths(
      Strategy::ScMedian, {{just_a, 30}, {a_and_b, 50}, {just_a, 90}});
  b.check("median golden: middle-confidence path verbatim",
          med.chosen_path && *med.chosen_path == 1 &&
              med.final_set == a_and_b && med.final_confidence &&
              *med.final_confidence == 0.5);

  const AggregatedResult lone_v =
      aggregate_paths(Strategy::ScVote, {{a_and_b, 70}});
  const AggregatedResult lone_m =
      aggregate_paths(Strategy::ScMedian, {{a_and_b, 70}});
  b.check("single-path aggregation is the identity",
          lone_v.final_set == a_and_b && lone_m.final_set == a_and_b &&
              *lone_v.final_confidence == 0.7 &&
              *lone_m.final_confidence == 0.7);
}

void check_protocol_roundtrip(Battery& b) {
  const std::uint64_t root = 0xf00dface;
  int bad = -1;
  for (int i = 0; i < 60 && bad < 0; ++i) {
    SolutionSet truth;
    TaskKind kind;
    if (i % 2 == 0) {
      kind = TaskKind::SubsetSum;
      truth = solve_subsetsum(gen_subsetsum(SubsetSumParams{},
                                            derive_seed(root, i)))
                  .solutions;
    } else {
      kind = TaskKind::TimeTabling;
      truth = solve_timetabling(gen_timetabling(TimeTablingParams{},
                                                derive_seed(root, i)))
                  .solutions;
    }
    if (truth.size() == 0) continue;
    const ParseOutcome back = parse_solutions(format_answer(truth), kind);
    if (back.solutions != truth) bad = i;
  }
  b.check("formatted answers parse back to the same solution set", bad < 0,
          "first mismatch at instance " + std::to_string(bad));

  const auto conf = parse_confidence("[[CONFIDENCE: \\boxed{85}]]");
  const auto high = parse_confidence("[[CONFIDENCE: \\boxed{150}]]");
  b.check("confidence marker parses and rejects out-of-range values",
          conf && *conf == 85 && !high.has_value());
}

}  // namespace

int run_selftest(std::ostream& out) {
  Battery b{out};
  check_reference_enumeration(b);
  check_solver_agreement(b);
  check_set_metrics(b);
  check_behavior_metrics(b);
  check_calibration(b);
  check_aggregation(b);
  check_protocol_roundtrip(b);
  out << (b.failed == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return b.failed;
}

}  // namespace musobench
