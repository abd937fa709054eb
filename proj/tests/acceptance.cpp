// Acceptance battery: one criterion per function, one PASS/FAIL line each.
// Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "musobench/client.hpp"
#include "musobench/metrics.hpp"
#include "musobench/mitigate.hpp"
#include "musobench/oracle.hpp"
#include "musobench/report.hpp"
#include "musobench/rng.hpp"
#include "musobench/selftest.hpp"
#include "musobench/serialize.hpp"

using namespace musobench;
namespace fs = std::filesystem;

namespace {

struct Battery {
  int failed = 0;

  bool report(const std::string& name, bool pass, double seconds,
              const std::string& detail = "") {
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << "  " << name << "  (" << std::fixed;
    line.precision(2);
    line << seconds << " s)";
    if (!pass && !detail.empty()) line << "  " << detail;
    std::cout << line.str() << "\n" << std::flush;
    if (!pass) ++failed;
    return pass;
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

fs::path work_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("musobench_acc_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 1. The documented reference instances enumerate to exactly their published
//    solution sets, inside one second.
void criterion_reference_fidelity(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  const SubsetSumInstance ss_inst = reference_subsetsum_instance();
  const SolutionSet ss_got = solve_subsetsum(ss_inst).solutions;
  if (ss_got != reference_subsetsum_solutions()) {
    pass = false;
    detail = "subset-sum reference yielded " + std::to_string(ss_got.size()) +
             " subsets";
  }

  const TimeTablingInstance tt_inst = reference_timetabling_instance();
  const SolutionSet tt_got = solve_timetabling(tt_inst).solutions;
  SolutionSet known = SolutionSet::empty(TaskKind::TimeTabling);
  for (const auto& sol : reference_timetabling_known()) known.add(sol);
  known.canonicalize();
  if (tt_got.size() != 6 || intersection_size(tt_got, known) != known.size()) {
    pass = false;
    detail = "timetabling reference yielded " + std::to_string(tt_got.size()) +
             " schedules";
  }
  if (tt_got != brute_force(tt_inst)) {
    pass = false;
    detail = "timetabling reference disagrees with the exhaustive scan";
  }

  const double elapsed = timer.seconds();
  if (elapsed >= 1.0) {
    pass = false;
    detail = "exceeded the one-second budget";
  }
  b.report("1. reference instances enumerate to their documented sets", pass,
           elapsed, detail);
}

// 2. Backtracking output is set-equal to the independent exhaustive scan on
//    1000 subset-sum and 500 timetabling instances, inside five minutes.
void criterion_solver_equivalence(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  const std::uint64_t root = 0xacce5500;
  for (int i = 0; i < 1000 && pass; ++i) {
    const auto inst = gen_subsetsum(SubsetSumParams{}, derive_seed(root, i));
    if (static_cast<int>(inst.elements.size()) > 12) {
      pass = false;
      detail = "subset-sum instance " + std::to_string(i) + " exceeds n=12";
      break;
    }
    if (solve_subsetsum(inst).solutions != brute_force(inst)) {
      pass = false;
      detail = "subset-sum divergence at instance " + std::to_string(i);
    }
  }
  for (int i = 0; i < 500 && pass; ++i) {
    const auto inst =
        gen_timetabling(TimeTablingParams{}, derive_seed(root + 1, i));
    if (schedule_candidate_count(inst) > 1'000'000) {
      pass = false;
      detail = "timetabling instance " + std::to_string(i) +
               " exceeds the candidate bound";
      break;
    }
    if (solve_timetabling(inst).solutions != brute_force(inst)) {
      pass = false;
      detail = "timetabling divergence at instance " + std::to_string(i);
    }
  }

  const double elapsed = timer.seconds();
  if (elapsed >= 300.0) {
    pass = false;
    detail = "exceeded the five-minute budget";
  }
  b.report("2. solvers are set-equal to the exhaustive scan on 1500 instances",
           pass, elapsed, detail);
}

// 3. Metric goldens hold exactly; the one-bin calibration fixture is 0.2
//    within 1e-12; the direct gap equals the table recomputation on 10,000
//    random records, exactly.
void criterion_metric_goldens(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  const auto ss = [](std::vector<std::int64_t> m) {
    return SubsetSolution{std::move(m)};
  };
  const auto make = [](std::vector<SubsetSolution> sols) {
    SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
    set.subsets = std::move(sols);
    set.canonicalize();
    return set;
  };
  const SolutionSet truth = make({ss({1}), ss({2}), ss({3}), ss({4})});
  const SolutionSet y1 = make({ss({1}), ss({2}), ss({5})});
  const SolutionSet y2 = make({ss({1}), ss({3}), ss({6})});

  if (*precision(y1, truth) != 2.0 / 3.0 || recall(y1, truth) != 0.5) {
    pass = false;
    detail = "precision/recall goldens";
  }
  const BehaviorScores s = behavior(y1, y2, truth);
  if (!(s.csr && *s.csr == 0.5 && s.esc && *s.esc == 1.0 && s.nsd &&
        *s.nsd == 0.25)) {
    pass = false;
    detail = "behavior goldens";
  }

  std::vector<ScoreRecord> two(2);
  two[0].recall = 0.5;
  two[0].confidence = 0.8;
  two[1].recall = 0.5;
  two[1].confidence = 0.6;
  if (std::fabs(ece(two, 1, PerfKind::Recall).value - 0.2) >= 1e-12) {
    pass = false;
    detail = "one-bin calibration fixture";
  }

  Rng rng(0xca11b7a7e);
  std::vector<ScoreRecord> records(10'000);
  for (auto& r : records) {
    r.recall = rng.next_double();
    if (rng.bernoulli(0.85)) r.precision = rng.next_double();
    if (rng.bernoulli(0.9)) r.confidence = rng.next_double();
  }
  for (PerfKind kind : {PerfKind::Recall, PerfKind::Precision}) {
    const EceResult direct = ece(records, kDefaultEceBins, kind);
    const ReliabilityTable table = reliability(records, kDefaultEceBins, kind);
    if (direct.value != ece_from_table(table) || direct.used != table.total ||
        direct.excluded != table.excluded) {
      pass = false;
      detail = "direct gap diverged from the table recomputation";
    }
  }

  b.report("3. metric goldens and the two calibration code paths agree", pass,
           timer.seconds(), detail);
}

// 4. A desk-quota build fills every default band for both tasks with
//    band-consistent items and reproduces byte-identically, in ten minutes.
void criterion_corpus_build(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  const auto check_build = [&](TaskKind task, std::size_t bands,
                               std::uint64_t seed) {
    BuildConfig config;
    config.task = task;
    config.quota = 10;
    config.parallelism = 4;
    const Corpus corpus = build_benchmark(config, seed);
    if (corpus.items.size() != bands * 10) {
      pass = false;
      detail = to_string(task) + " build holds " +
               std::to_string(corpus.items.size()) + " items";
      return;
    }
    std::vector<int> per_level(bands, 0);
    for (const auto& item : corpus.items) {
      const auto count =
          static_cast<std::int64_t>(item.ground_truth.size());
      const LevelBand& band = corpus.config.strata.bands[item.level];
      if (count < band.min_solutions || count > band.max_solutions ||
          count == 0) {
        pass = false;
        detail = "item " + item.item_id + " is not band-consistent";
        return;
      }
      ++per_level[item.level];
    }
    for (std::size_t lv = 0; lv < bands; ++lv)
      if (per_level[lv] != 10) {
        pass = false;
        detail = to_string(task) + " level " + std::to_string(lv) +
                 " holds " + std::to_string(per_level[lv]) + " items";
        return;
      }
    const Corpus again = build_benchmark(config, seed);
    if (to_json(again) != to_json(corpus)) {
      pass = false;
      detail = to_string(task) + " rebuild with the same seed differs";
    }
  };

  check_build(TaskKind::TimeTabling, 10, 0xbead01);
  if (pass) check_build(TaskKind::SubsetSum, 7, 0xbead02);

  const double elapsed = timer.seconds();
  if (elapsed >= 600.0) {
    pass = false;
    detail = "exceeded the ten-minute budget";
  }
  b.report("4. desk-quota builds fill every band reproducibly", pass, elapsed,
           detail);
}

// 5. 1000 synthetic answers rendered in the documented output format parse
//    back to the injected sets; confidence markers round-trip in range and
//    reject out of range.
void criterion_answer_roundtrip(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  Rng rng(0x0f0f5eed);
  for (int trial = 0; trial < 1000 && pass; ++trial) {
    SolutionSet set;
    TaskKind kind;
    if (trial % 2 == 0) {
      kind = TaskKind::SubsetSum;
      set = SolutionSet::empty(kind);
      const int n = 1 + static_cast<int>(rng.bounded(7));
      for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> members;
        const std::size_t len = 1 + rng.bounded(5);
        while (members.size() < len) {
          const std::int64_t v = 1 + static_cast<std::int64_t>(rng.bounded(99));
          if (std::find(members.begin(), members.end(), v) == members.end())
            members.push_back(v);
        }
        std::sort(members.begin(), members.end());
        set.subsets.push_back({std::move(members)});
      }
    } else {
      kind = TaskKind::TimeTabling;
      set = SolutionSet::empty(kind);
      const int courses = 2 + static_cast<int>(rng.bounded(4));
      const int n = 1 + static_cast<int>(rng.bounded(7));
      for (int i = 0; i < n; ++i) {
        ScheduleSolution sol;
        for (int c = 0; c < courses; ++c)
          sol.entries.push_back({c, static_cast<int>(rng.bounded(10)),
                                 static_cast<int>(rng.bounded(10)),
                                 static_cast<int>(rng.bounded(5))});
        set.schedules.push_back(std::move(sol));
      }
    }
    set.canonicalize();
    const ParseOutcome back = parse_solutions(format_answer(set), kind);
    if (back.solutions != set) {
      pass = false;
      detail = "round-trip mismatch at trial " + std::to_string(trial);
    }
  }

  for (int v = 0; v <= 100 && pass; ++v) {
    const auto got =
        parse_confidence("[[CONFIDENCE: \\boxed{" + std::to_string(v) + "}]]");
    if (!got || *got != v) {
      pass = false;
      detail = "in-range confidence " + std::to_string(v) + " did not parse";
    }
  }
  for (int v : {101, 150, 999}) {
    if (parse_confidence("[[CONFIDENCE: \\boxed{" + std::to_string(v) + "}]]")
            .has_value()) {
      pass = false;
      detail = "out-of-range confidence " + std::to_string(v) + " accepted";
    }
  }

  b.report("5. formatted answers and confidence markers round-trip", pass,
           timer.seconds(), detail);
}

// 6. On a 100-item corpus, a low-recall high-confidence mock scores a
//    calibration gap of 0.85 +/- 0.01 on recall, and pairing it against a
//    high-recall calibrated mock moves at least 95% of items up and left.
void criterion_mock_pipeline(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  BuildConfig build;
  build.task = TaskKind::SubsetSum;
  build.strata = StrataConfig{{{0, 10, 11}}};
  build.quota = 100;
  const Corpus corpus = build_benchmark(build, 0xf1e1d);

  MockScript overconfident;
  overconfident.recall_fraction = 0.1;
  overconfident.confidence = 95;
  MockScript calibrated;
  calibrated.recall_fraction = 0.9;
  calibrated.confidence = 90;

  const auto run = [&](const MockScript& script, const fs::path& dir) {
    ScriptedClient client(script, corpus);
    run_benchmark(client, corpus, RunConfig{}, dir.string(), "acc6");
    return score_run(dir.string(), corpus, "acc6");
  };
  const ScoredRun base = run(overconfident, work_dir("c6_base"));
  const ScoredRun treat = run(calibrated, work_dir("c6_treat"));

  if (!base.summary.ece_recall ||
      std::fabs(base.summary.ece_recall->value - 0.85) > 0.01) {
    pass = false;
    detail = "calibration gap " +
             std::to_string(base.summary.ece_recall
                                ? base.summary.ece_recall->value
                                : -1.0);
  }

  const fs::path pair_dir = work_dir("c6_pair");
  write_movement_report(base, treat, pair_dir.string());
  std::istringstream csv(read_file((pair_dir / "fig4_movement.csv").string()));
  std::string line;
  std::getline(csv, line);  // header
  std::size_t rows = 0, up_left = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream split(line);
    while (std::getline(split, field, ',')) fields.push_back(field);
    if (fields.size() == 7 && std::stod(fields[5]) < 0.0 &&
        std::stod(fields[6]) > 0.0)
      ++up_left;
  }
  if (rows != 100) {
    pass = false;
    detail = "movement table holds " + std::to_string(rows) + " rows";
  } else if (static_cast<double>(up_left) < 95.0) {
    pass = false;
    detail = "only " + std::to_string(up_left) + "/100 vectors point up-left";
  }

  b.report("6. mock pipeline reproduces the overconfidence gap and its shift",
           pass, timer.seconds(), detail);
}

// 7. Voting recall dominates every single path for n in {1, 4, 32};
//    median-confidence returns an input path verbatim; n=1 is the identity.
void criterion_aggregation_algebra(Battery& b) {
  Timer timer;
  std::string detail;
  bool pass = true;

  BuildConfig build;
  build.task = TaskKind::SubsetSum;
  build.strata = StrataConfig{{{0, 5, 9}}};
  build.quota = 4;
  const Corpus corpus = build_benchmark(build, 0xa99a);

  for (int n : {1, 4, 32}) {
    MockScript script;
    script.recall_fraction = 0.25;
    script.confidence = 80;
    script.rotate_paths = true;
    ScriptedClient client(script, corpus);

    RunConfig config;
    config.strategy = Strategy::ScVote;
    config.n_paths = n;

    for (const auto& item : corpus.items) {
      const ItemAggregate agg =
          self_consistency(client, item, config, builtin_prompts(), nullptr,
                           nullptr);
      if (!agg.result || agg.n_effective != n) {
        pass = false;
        detail = "aggregate missing for " + item.item_id;
        continue;
      }
      double best = 0.0;
      for (const auto& path : agg.result->paths)
        best = std::max(best, recall(path.set, item.ground_truth));
      const double combined =
          recall(agg.result->final_set, item.ground_truth);
      if (combined < best) {
        pass = false;
        detail = "voting recall fell below a path at n=" + std::to_string(n);
      }
      if (n == 1 &&
          (agg.result->final_set != agg.result->paths[0].set ||
           !agg.result->final_confidence ||
           *agg.result->final_confidence != 0.8)) {
        pass = false;
        detail = "n=1 voting is not the identity";
      }
    }
  }

  {
    MockScript script;
    script.recall_fraction = 0.5;
    script.confidence = 80;
    script.rotate_paths = true;
    ScriptedClient client(script, corpus);
    RunConfig config;
    config.strategy = Strategy::ScMedian;
    config.n_paths = 5;
    for (const auto& item : corpus.items) {
      const ItemAggregate agg =
          self_consistency(client, item, config, builtin_prompts(), nullptr,
                           nullptr);
      if (!agg.result || !agg.result->chosen_path) {
        pass = false;
        detail = "median aggregate missing for " + item.item_id;
        continue;
      }
      const auto& r = *agg.result;
      if (*r.chosen_path >= r.paths.size() ||
          r.final_set != r.paths[*r.chosen_path].set) {
        pass = false;
        detail = "median result is not an input path";
      }
    }

    config.n_paths = 1;
    ScriptedClient lone(script, corpus);
    const ItemAggregate one = self_consistency(
        lone, corpus.items[0], config, builtin_prompts(), nullptr, nullptr);
    if (!one.result || one.result->final_set != one.result->paths[0].set ||
        *one.result->final_confidence != 0.8) {
      pass = false;
      detail = "n=1 median is not the identity";
    }
  }

  b.report("7. aggregation algebra: voting dominance, verbatim median, identity",
           pass, timer.seconds(), detail);
}

}  // namespace

int main() {
  Battery b;
  criterion_reference_fidelity(b);
  criterion_solver_equivalence(b);
  criterion_metric_goldens(b);
  criterion_corpus_build(b);
  criterion_answer_roundtrip(b);
  criterion_mock_pipeline(b);
  criterion_aggregation_algebra(b);

  if (b.failed == 0) {
    std::cout << "acceptance: all 7 criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << b.failed << " criterion(s) FAILED\n";
  return 1;
}
