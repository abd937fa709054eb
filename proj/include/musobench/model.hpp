#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "musobench/common.hpp"

namespace musobench {

// ---------------------------------------------------------------------------
// Problem instances

struct CourseSpec {
  int course_id = 0;
  std::vector<int> allowed_times;  // ascending, non-empty, within [0, num_times)
  std::vector<int> allowed_rooms;  // ascending, non-empty, within [0, num_rooms)
  int teacher = 0;

  bool operator==(const CourseSpec&) const = default;
};

struct TimeTablingInstance {
  std::vector<CourseSpec> courses;
  int num_times = 0;
  int num_rooms = 0;
  int num_teachers = 0;
  std::uint64_t seed = 0;

  bool operator==(const TimeTablingInstance&) const = default;
};

struct SubsetSumInstance {
  std::vector<std::int64_t> elements;  // pairwise distinct, display order
  std::int64_t target = 0;
  std::uint64_t seed = 0;

  bool operator==(const SubsetSumInstance&) const = default;
};

/// Throws DataError if an instance violates its structural invariants.
void validate(const TimeTablingInstance& inst);
void validate(const SubsetSumInstance& inst);

// ---------------------------------------------------------------------------
// Solutions

/// One course's placement. Teacher travels with the row so that answers
/// naming the wrong teacher stay representable (and simply score as wrong).
struct ScheduleEntry {
  int course_id = 0;
  int time = 0;
  int room = 0;
  int teacher = 0;

  auto operator<=>(const ScheduleEntry&) const = default;
};

struct ScheduleSolution {
  std::vector<ScheduleEntry> entries;  // sorted by course_id, no repeats

  auto operator<=>(const ScheduleSolution&) const = default;
};

struct SubsetSolution {
  std::vector<std::int64_t> members;  // ascending, distinct

  auto operator<=>(const SubsetSolution&) const = default;
};

/// Canonical, duplicate-free solution collection. Only the vector matching
/// `kind` is populated. Members are kept sorted so set algebra and
/// structural equality are straight merges.
struct SolutionSet {
  TaskKind kind = TaskKind::SubsetSum;
  std::vector<ScheduleSolution> schedules;
  std::vector<SubsetSolution> subsets;

  static SolutionSet empty(TaskKind kind);

  std::size_t size() const;
  bool operator==(const SolutionSet&) const = default;

  /// Sorts and deduplicates in place.
  void canonicalize();

  void add(ScheduleSolution sol);
  void add(SubsetSolution sol);
};

/// Set algebra under canonical structural equality. Both operands must
/// share a task kind (throws DataError otherwise).
SolutionSet set_intersection(const SolutionSet& a, const SolutionSet& b);
SolutionSet set_difference(const SolutionSet& a, const SolutionSet& b);
SolutionSet set_union(const SolutionSet& a, const SolutionSet& b);
std::size_t intersection_size(const SolutionSet& a, const SolutionSet& b);

// ---------------------------------------------------------------------------
// Stratification

struct LevelBand {
  int level_index = 0;
  std::int64_t min_solutions = 1;
  std::int64_t max_solutions = 1;  // inclusive

  bool operator==(const LevelBand&) const = default;
};

struct StrataConfig {
  std::vector<LevelBand> bands;  // disjoint, ordered by min_solutions

  bool operator==(const StrataConfig&) const = default;
};

/// Throws ConfigError if bands are empty, unordered, or overlapping.
void validate(const StrataConfig& strata);

// ---------------------------------------------------------------------------
// Benchmark items

struct BenchmarkItem {
  std::string item_id;
  TaskKind task_kind = TaskKind::SubsetSum;
  std::variant<TimeTablingInstance, SubsetSumInstance> instance;
  std::string question_text;
  SolutionSet ground_truth;
  int level = 0;

  const TimeTablingInstance& timetabling() const;
  const SubsetSumInstance& subsetsum() const;
};

}  // namespace musobench
