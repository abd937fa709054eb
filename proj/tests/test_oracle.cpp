#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "musobench/corpus.hpp"
#include "musobench/oracle.hpp"
#include "musobench/rng.hpp"
#include "musobench/selftest.hpp"

using namespace musobench;

TEST_CASE("reference subset-sum instance yields the five known subsets") {
  const SolveResult res = solve_subsetsum(reference_subsetsum_instance());
  CHECK(res.solutions == reference_subsetsum_solutions());
  CHECK_FALSE(res.truncated);
}

TEST_CASE("forced subset-sum cases") {
  const SolveResult pair = solve_subsetsum({{1, 2}, 3, 0});
  REQUIRE(pair.solutions.size() == 1);
  CHECK(pair.solutions.subsets[0].members == std::vector<std::int64_t>{1, 2});

  const SolveResult single = solve_subsetsum({{7}, 7, 0});
  REQUIRE(single.solutions.size() == 1);
  CHECK(single.solutions.subsets[0].members == std::vector<std::int64_t>{7});
  CHECK(brute_force(SubsetSumInstance{{7}, 7, 0}) == single.solutions);

  CHECK(solve_subsetsum({{2, 4}, 1, 0}).solutions.size() == 0);
}

TEST_CASE("reference timetabling instance has six schedules") {
  const TimeTablingInstance inst = reference_timetabling_instance();
  const SolveResult res = solve_timetabling(inst);
  CHECK(res.solutions.size() == 6);

  SolutionSet known = SolutionSet::empty(TaskKind::TimeTabling);
  for (const auto& sol : reference_timetabling_known()) known.add(sol);
  known.canonicalize();
  CHECK(intersection_size(res.solutions, known) == 3);
  CHECK(res.solutions == brute_force(inst));
}

TEST_CASE("fully constrained single course has exactly one schedule") {
  TimeTablingInstance inst;
  inst.courses = {{0, {0}, {0}, 0}};
  inst.num_times = 1;
  inst.num_rooms = 1;
  inst.num_teachers = 1;
  const SolveResult res = solve_timetabling(inst);
  REQUIRE(res.solutions.size() == 1);
  CHECK(res.solutions.schedules[0].entries ==
        std::vector<ScheduleEntry>{{0, 0, 0, 0}});
}

TEST_CASE("solver output is canonical and sound") {
  for (int i = 0; i < 40; ++i) {
    const auto tt = gen_timetabling(TimeTablingParams{}, derive_seed(11, i));
    const SolutionSet sols = solve_timetabling(tt).solutions;
    SolutionSet copy = sols;
    copy.canonicalize();
    CHECK(copy == sols);
    for (const auto& s : sols.schedules) CHECK(check_schedule(tt, s));

    const auto ss = gen_subsetsum(SubsetSumParams{}, derive_seed(12, i));
    const SolutionSet subs = solve_subsetsum(ss).solutions;
    SolutionSet copy2 = subs;
    copy2.canonicalize();
    CHECK(copy2 == subs);
    for (const auto& s : subs.subsets) CHECK(check_subset(ss, s));
  }
}

TEST_CASE("backtracking matches the exhaustive scan on seeded instances") {
  for (int i = 0; i < 150; ++i) {
    const auto inst = gen_subsetsum(SubsetSumParams{}, derive_seed(21, i));
    CHECK(solve_subsetsum(inst).solutions == brute_force(inst));
  }
  for (int i = 0; i < 60; ++i) {
    const auto inst = gen_timetabling(TimeTablingParams{}, derive_seed(22, i));
    CHECK(solve_timetabling(inst).solutions == brute_force(inst));
  }
}

TEST_CASE("removing an allowed time never adds schedules") {
  int probed = 0;
  for (int i = 0; probed < 50 && i < 200; ++i) {
    TimeTablingInstance inst =
        gen_timetabling(TimeTablingParams{}, derive_seed(31, i));
    const std::size_t before = solve_timetabling(inst).solutions.size();
    bool shrunk = false;
    for (auto& course : inst.courses) {
      if (course.allowed_times.size() >= 2) {
        course.allowed_times.pop_back();
        shrunk = true;
        break;
      }
    }
    if (!shrunk) continue;
    ++probed;
    CHECK(solve_timetabling(inst).solutions.size() <= before);
  }
  CHECK(probed == 50);
}

TEST_CASE("node budget rejects instead of truncating") {
  SolveOptions opts;
  opts.node_budget = 3;
  CHECK_THROWS_AS(solve_subsetsum(reference_subsetsum_instance(), opts),
                  BudgetExceeded);
  CHECK_THROWS_AS(solve_timetabling(reference_timetabling_instance(), opts),
                  BudgetExceeded);
}

TEST_CASE("max_solutions early-out flags truncation") {
  SolveOptions opts;
  opts.max_solutions = 2;
  const SolveResult res = solve_subsetsum(reference_subsetsum_instance(), opts);
  CHECK(res.truncated);
  CHECK(res.solutions.size() > 2);

  SolveOptions roomy;
  roomy.max_solutions = 50;
  CHECK_FALSE(solve_subsetsum(reference_subsetsum_instance(), roomy).truncated);
}

TEST_CASE("brute force refuses oversized instances") {
  SubsetSumInstance big;
  big.elements.resize(21);
  std::iota(big.elements.begin(), big.elements.end(), 1);
  big.target = 3;
  CHECK_THROWS_AS(brute_force(big), DataError);

  BruteForceBounds tight;
  tight.max_schedule_candidates = 1;
  CHECK_THROWS_AS(brute_force(reference_timetabling_instance(), tight),
                  DataError);
  CHECK(schedule_candidate_count(reference_timetabling_instance()) == 8);
}

TEST_CASE("solve dispatches on the item task") {
  BenchmarkItem item;
  item.item_id = "ss";
  item.task_kind = TaskKind::SubsetSum;
  item.instance = reference_subsetsum_instance();
  CHECK(solve(item).solutions == reference_subsetsum_solutions());
  CHECK(brute_force(item) == reference_subsetsum_solutions());
}
