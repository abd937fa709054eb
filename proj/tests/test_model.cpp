#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "musobench/model.hpp"
#include "musobench/selftest.hpp"

using namespace musobench;

namespace {

SolutionSet subsets(std::vector<SubsetSolution> sols) {
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.subsets = std::move(sols);
  set.canonicalize();
  return set;
}

}  // namespace

TEST_CASE("task kind names round-trip") {
  CHECK(to_string(TaskKind::TimeTabling) == "timetabling");
  CHECK(to_string(TaskKind::SubsetSum) == "subsetsum");
  CHECK(task_kind_from_string("timetabling") == TaskKind::TimeTabling);
  CHECK(task_kind_from_string("subsetsum") == TaskKind::SubsetSum);
  CHECK_THROWS_AS(task_kind_from_string("sudoku"), ConfigError);
}

TEST_CASE("canonicalize sorts and removes duplicates") {
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.add(SubsetSolution{{14, 48}});
  set.add(SubsetSolution{{8, 14, 40}});
  set.add(SubsetSolution{{14, 48}});
  set.canonicalize();
  REQUIRE(set.size() == 2);
  CHECK(set.subsets[0].members == std::vector<std::int64_t>{8, 14, 40});
  CHECK(set.subsets[1].members == std::vector<std::int64_t>{14, 48});

  SolutionSet sch = SolutionSet::empty(TaskKind::TimeTabling);
  const ScheduleSolution a{{{0, 1, 2, 0}}};
  const ScheduleSolution b{{{0, 0, 2, 0}}};
  sch.add(a);
  sch.add(b);
  sch.add(a);
  sch.canonicalize();
  REQUIRE(sch.size() == 2);
  CHECK(sch.schedules[0] == b);
  CHECK(sch.schedules[1] == a);
}

TEST_CASE("set algebra over canonical sets") {
  const SolutionSet x =
      subsets({SubsetSolution{{1}}, SubsetSolution{{2}}, SubsetSolution{{3}}});
  const SolutionSet y = subsets({SubsetSolution{{2}}, SubsetSolution{{4}}});

  const SolutionSet both = set_intersection(x, y);
  REQUIRE(both.size() == 1);
  CHECK(both.subsets[0].members == std::vector<std::int64_t>{2});
  CHECK(intersection_size(x, y) == 1);

  const SolutionSet only_x = set_difference(x, y);
  REQUIRE(only_x.size() == 2);
  CHECK(only_x.subsets[0].members == std::vector<std::int64_t>{1});

  const SolutionSet all = set_union(x, y);
  CHECK(all.size() == 4);

  const SolutionSet empty = SolutionSet::empty(TaskKind::SubsetSum);
  CHECK(set_intersection(x, empty).size() == 0);
  CHECK(set_union(x, empty) == x);

  SolutionSet other_kind = SolutionSet::empty(TaskKind::TimeTabling);
  CHECK_THROWS_AS(set_intersection(x, other_kind), DataError);
  CHECK_THROWS_AS(set_union(x, other_kind), DataError);
}

TEST_CASE("timetabling instance validation") {
  TimeTablingInstance good = reference_timetabling_instance();
  CHECK_NOTHROW(validate(good));

  TimeTablingInstance bad = good;
  bad.courses.clear();
  CHECK_THROWS_AS(validate(bad), DataError);

  bad = good;
  bad.courses[0].allowed_times = {3, 7};  // outside num_times = 5
  CHECK_THROWS_AS(validate(bad), DataError);

  bad = good;
  bad.courses[1].allowed_rooms.clear();
  CHECK_THROWS_AS(validate(bad), DataError);

  bad = good;
  bad.courses[2].teacher = 3;
  CHECK_THROWS_AS(validate(bad), DataError);

  bad = good;
  bad.courses[0].allowed_times = {4, 3};
  CHECK_THROWS_AS(validate(bad), DataError);
}

TEST_CASE("subsetsum instance validation") {
  CHECK_NOTHROW(validate(reference_subsetsum_instance()));
  SubsetSumInstance dup{{5, 9, 5}, 14, 0};
  CHECK_THROWS_AS(validate(dup), DataError);
  SubsetSumInstance empty{{}, 0, 0};
  CHECK_THROWS_AS(validate(empty), DataError);
}

TEST_CASE("strata validation") {
  StrataConfig ok{{{0, 1, 50}, {1, 51, 100}}};
  CHECK_NOTHROW(validate(ok));

  CHECK_THROWS_AS(validate(StrataConfig{}), ConfigError);

  StrataConfig overlap{{{0, 1, 50}, {1, 50, 100}}};
  CHECK_THROWS_AS(validate(overlap), ConfigError);

  StrataConfig reversed{{{0, 51, 100}, {1, 1, 50}}};
  CHECK_THROWS_AS(validate(reversed), ConfigError);

  StrataConfig zero_min{{{0, 0, 50}}};
  CHECK_THROWS_AS(validate(zero_min), ConfigError);
}

TEST_CASE("item accessors enforce the stored task") {
  BenchmarkItem item;
  item.item_id = "x";
  item.task_kind = TaskKind::SubsetSum;
  item.instance = reference_subsetsum_instance();
  CHECK(item.subsetsum().target == 62);
  CHECK_THROWS_AS(item.timetabling(), DataError);
}
