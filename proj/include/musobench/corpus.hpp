#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "musobench/model.hpp"
#include "musobench/oracle.hpp"

namespace musobench {

// Defaults keep instances small enough that every default strata band is
// reachable at desk scale. All knobs are config-file overridable.
struct TimeTablingParams {
  int min_courses = 3, max_courses = 6;
  int min_teachers = 2, max_teachers = 4;
  int min_rooms = 3, max_rooms = 9;
  int min_times = 4, max_times = 6;
  int min_allowed = 1, max_allowed = 3;  // allowed-set sizes per course
  double single_room_prob = 0.3;  // chance a course is pinned to one room

  bool operator==(const TimeTablingParams&) const = default;
};

struct SubsetSumParams {
  int min_n = 8, max_n = 12;
  std::int64_t min_value = 1, max_value = 50;

  bool operator==(const SubsetSumParams&) const = default;
};

void validate(const TimeTablingParams& params);
void validate(const SubsetSumParams& params);

StrataConfig default_timetabling_strata();  // ten bands, 1..1600
StrataConfig default_subsetsum_strata();    // seven bands, 1..40

/// Deterministic function of (params, seed). Draw order: global counts
/// (courses, teachers, rooms, times), then per course its teacher, allowed
/// times, single-room coin, allowed rooms.
TimeTablingInstance gen_timetabling(const TimeTablingParams& params,
                                    std::uint64_t seed);

/// Deterministic function of (params, seed). The target is the sum of a
/// seed-chosen non-empty subset, so every instance is solvable by
/// construction.
SubsetSumInstance gen_subsetsum(const SubsetSumParams& params,
                                std::uint64_t seed);

std::string render_question(const TimeTablingInstance& inst);
std::string render_question(const SubsetSumInstance& inst);
std::string render_question(const BenchmarkItem& item);

/// Band containing the count, or nullopt when the count falls outside all
/// bands and the instance should be discarded.
std::optional<LevelBand> assign_level(std::int64_t solution_count,
                                      const StrataConfig& strata);

struct BuildConfig {
  TaskKind task = TaskKind::SubsetSum;
  TimeTablingParams timetabling;
  SubsetSumParams subsetsum;
  StrataConfig strata;  // empty bands -> task default
  int quota = 10;       // items per level
  std::uint64_t max_attempts = 2'000'000;
  std::uint64_t node_budget = 10'000'000;
  int parallelism = 1;

  bool operator==(const BuildConfig&) const = default;
};

void validate(const BuildConfig& config);

struct Corpus {
  TaskKind task = TaskKind::SubsetSum;
  std::uint64_t seed = 0;
  BuildConfig config;  // echo of the build inputs
  std::vector<BenchmarkItem> items;
};

/// Generate -> solve -> stratify until every band holds exactly `quota`
/// items. Attempt k draws its instance from derive_seed(seed, k), so the
/// result is reproducible for a given config regardless of parallelism.
/// Throws DataError naming the unfilled levels if max_attempts runs out.
Corpus build_benchmark(const BuildConfig& config, std::uint64_t seed);

}  // namespace musobench
