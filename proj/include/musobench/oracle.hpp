#pragma once

#include <cstdint>
#include <optional>

#include "musobench/model.hpp"

namespace musobench {

struct SolveOptions {
  /// Nodes visited before the search gives up with BudgetExceeded. A
  /// truncated enumeration would silently corrupt recall downstream, so the
  /// search rejects the instance outright instead of returning a prefix.
  std::uint64_t node_budget = 10'000'000;

  /// Early-out used by the corpus build loop: once more than this many
  /// solutions exist the instance cannot land in any band, so enumeration
  /// stops and the instance is reported oversized. No cap by default.
  std::optional<std::uint64_t> max_solutions;
};

struct SolveResult {
  SolutionSet solutions;
  bool truncated = false;  // only when max_solutions tripped
  std::uint64_t nodes_visited = 0;
};

/// Backtracking over courses in index order, times ascending then rooms
/// ascending, which makes the output order canonical without a post-sort.
/// Enforces per-course allowed sets, one course per (time, room), and one
/// course per (time, teacher).
SolveResult solve_timetabling(const TimeTablingInstance& inst,
                              const SolveOptions& opts = {});

/// Depth-first subset enumeration over elements sorted ascending; emits
/// each solution with ascending members, whole set in lexicographic order.
SolveResult solve_subsetsum(const SubsetSumInstance& inst,
                            const SolveOptions& opts = {});

SolveResult solve(const BenchmarkItem& item, const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Independent verification oracle. Definitionally complete enumeration by
// exhaustive scan, deliberately sharing no search code with the solvers
// above. Refuses instances beyond its scan bounds.

struct BruteForceBounds {
  int max_subset_elements = 20;                   // power-set scan limit
  std::uint64_t max_schedule_candidates = 1'000'000;  // full product limit
};

SolutionSet brute_force(const TimeTablingInstance& inst,
                        const BruteForceBounds& bounds = {});
SolutionSet brute_force(const SubsetSumInstance& inst,
                        const BruteForceBounds& bounds = {});
SolutionSet brute_force(const BenchmarkItem& item,
                        const BruteForceBounds& bounds = {});

/// Number of candidate assignments a full Cartesian scan would visit.
std::uint64_t schedule_candidate_count(const TimeTablingInstance& inst);

// ---------------------------------------------------------------------------
// Constraint checkers, shared by the brute-force filter and soundness tests.

bool check_schedule(const TimeTablingInstance& inst, const ScheduleSolution& sol);
bool check_subset(const SubsetSumInstance& inst, const SubsetSolution& sol);

}  // namespace musobench
