#include "musobench/oracle.hpp"

#include <algorithm>
#include <unordered_set>

namespace musobench {

namespace {

struct TimetableSearch {
  const TimeTablingInstance& inst;
  const SolveOptions& opts;
  SolveResult result;
  std::vector<ScheduleEntry> partial;
  std::vector<bool> room_busy;     // time * num_rooms + room
  std::vector<bool> teacher_busy;  // time * num_teachers + teacher

  explicit TimetableSearch(const TimeTablingInstance& i, const SolveOptions& o)
      : inst(i), opts(o) {
    room_busy.assign(static_cast<std::size_t>(i.num_times) * i.num_rooms, false);
    teacher_busy.assign(static_cast<std::size_t>(i.num_times) * i.num_teachers,
                        false);
    partial.reserve(i.courses.size());
  }

  // Returns false when enumeration must stop (solution cap reached).
  bool extend(std::size_t course_idx) {
    if (++result.nodes_visited > opts.node_budget)
      throw BudgetExceeded("timetabling search exceeded node budget");
    if (course_idx == inst.courses.size()) {
      result.solutions.schedules.push_back(ScheduleSolution{partial});
      if (opts.max_solutions &&
          result.solutions.schedules.size() > *opts.max_solutions) {
        result.truncated = true;
        return false;
      }
      return true;
    }
    const auto& course = inst.courses[course_idx];
    for (int t : course.allowed_times) {
      const auto teacher_slot =
          static_cast<std::size_t>(t) * inst.num_teachers + course.teacher;
      if (teacher_busy[teacher_slot]) continue;
      for (int r : course.allowed_rooms) {
        const auto room_slot = static_cast<std::size_t>(t) * inst.num_rooms + r;
        if (room_busy[room_slot]) continue;
        room_busy[room_slot] = true;
        teacher_busy[teacher_slot] = true;
        partial.push_back({course.course_id, t, r, course.teacher});
        const bool keep_going = extend(course_idx + 1);
        partial.pop_back();
        teacher_busy[teacher_slot] = false;
        room_busy[room_slot] = false;
        if (!keep_going) return false;
      }
    }
    return true;
  }
};

}  // namespace

SolveResult solve_timetabling(const TimeTablingInstance& inst,
                              const SolveOptions& opts) {
  validate(inst);
  TimetableSearch search(inst, opts);
  search.result.solutions.kind = TaskKind::TimeTabling;
  search.extend(0);
  return std::move(search.result);
}

namespace {

struct SubsetSearch {
  const std::vector<std::int64_t>& sorted;
  const SolveOptions& opts;
  bool all_positive;
  std::int64_t target;
  SolveResult result;
  std::vector<std::int64_t> partial;
  std::vector<std::int64_t> suffix_sum;  // suffix_sum[i] = sum of sorted[i..]

  SubsetSearch(const std::vector<std::int64_t>& s, std::int64_t t,
               const SolveOptions& o)
      : sorted(s), opts(o), target(t) {
    all_positive = std::all_of(s.begin(), s.end(),
                               [](std::int64_t v) { return v > 0; });
    suffix_sum.assign(s.size() + 1, 0);
    for (std::size_t i = s.size(); i > 0; --i)
      suffix_sum[i - 1] = suffix_sum[i] + s[i - 1];
  }

  bool extend(std::size_t next, std::int64_t sum) {
    if (++result.nodes_visited > opts.node_budget)
      throw BudgetExceeded("subsetsum search exceeded node budget");
    if (!partial.empty() && sum == target) {
      result.solutions.subsets.push_back(SubsetSolution{partial});
      if (opts.max_solutions &&
          result.solutions.subsets.size() > *opts.max_solutions) {
        result.truncated = true;
        return false;
      }
      // With positives only, any extension overshoots; otherwise a
      // superset could still hit the target again.
      if (all_positive) return true;
    }
    if (next == sorted.size()) return true;
    if (all_positive) {
      if (sum > target) return true;                     // overshoot
      if (sum + suffix_sum[next] < target) return true;  // unreachable
    }
    for (std::size_t i = next; i < sorted.size(); ++i) {
      partial.push_back(sorted[i]);
      const bool keep_going = extend(i + 1, sum + sorted[i]);
      partial.pop_back();
      if (!keep_going) return false;
      if (all_positive && sum + sorted[i] > target) break;  // later ones larger
    }
    return true;
  }
};

}  // namespace

SolveResult solve_subsetsum(const SubsetSumInstance& inst,
                            const SolveOptions& opts) {
  validate(inst);
  std::vector<std::int64_t> sorted = inst.elements;
  std::sort(sorted.begin(), sorted.end());
  SubsetSearch search(sorted, inst.target, opts);
  search.result.solutions.kind = TaskKind::SubsetSum;
  search.extend(0, 0);
  return std::move(search.result);
}

SolveResult solve(const BenchmarkItem& item, const SolveOptions& opts) {
  if (item.task_kind == TaskKind::TimeTabling)
    return solve_timetabling(item.timetabling(), opts);
  return solve_subsetsum(item.subsetsum(), opts);
}

bool check_schedule(const TimeTablingInstance& inst,
                    const ScheduleSolution& sol) {
  if (sol.entries.size() != inst.courses.size()) return false;
  for (std::size_t i = 0; i < sol.entries.size(); ++i) {
    const auto& e = sol.entries[i];
    if (e.course_id != static_cast<int>(i)) return false;  // cover each once
    const auto& course = inst.courses[i];
    if (e.teacher != course.teacher) return false;
    if (!std::binary_search(course.allowed_times.begin(),
                            course.allowed_times.end(), e.time))
      return false;
    if (!std::binary_search(course.allowed_rooms.begin(),
                            course.allowed_rooms.end(), e.room))
      return false;
  }
  for (std::size_t i = 0; i < sol.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < sol.entries.size(); ++j) {
      const auto& a = sol.entries[i];
      const auto& b = sol.entries[j];
      if (a.time == b.time && a.room == b.room) return false;
      if (a.time == b.time && a.teacher == b.teacher) return false;
    }
  }
  return true;
}

bool check_subset(const SubsetSumInstance& inst, const SubsetSolution& sol) {
  if (sol.members.empty()) return false;
  if (!std::is_sorted(sol.members.begin(), sol.members.end())) return false;
  if (std::adjacent_find(sol.members.begin(), sol.members.end()) !=
      sol.members.end())
    return false;
  std::unordered_set<std::int64_t> pool(inst.elements.begin(),
                                        inst.elements.end());
  std::int64_t sum = 0;
  for (auto v : sol.members) {
    if (!pool.count(v)) return false;
    sum += v;
  }
  return sum == inst.target;
}

std::uint64_t schedule_candidate_count(const TimeTablingInstance& inst) {
  std::uint64_t product = 1;
  for (const auto& c : inst.courses) {
    const auto options = static_cast<std::uint64_t>(c.allowed_times.size()) *
                         c.allowed_rooms.size();
    if (options != 0 && product > UINT64_MAX / options) return UINT64_MAX;
    product *= options;
  }
  return product;
}

SolutionSet brute_force(const TimeTablingInstance& inst,
                        const BruteForceBounds& bounds) {
  validate(inst);
  const std::uint64_t candidates = schedule_candidate_count(inst);
  if (candidates > bounds.max_schedule_candidates)
    throw DataError("instance above brute-force scan bound: " +
                    std::to_string(candidates) + " candidates");

  // Odometer over each course's full (time, room) option list, every
  // complete assignment run through the constraint checker.
  const std::size_t n = inst.courses.size();
  std::vector<std::vector<std::pair<int, int>>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t : inst.courses[i].allowed_times)
      for (int r : inst.courses[i].allowed_rooms)
        options[i].emplace_back(t, r);
  }
  SolutionSet out = SolutionSet::empty(TaskKind::TimeTabling);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    ScheduleSolution sol;
    sol.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [t, r] = options[i][idx[i]];
      sol.entries.push_back(
          {inst.courses[i].course_id, t, r, inst.courses[i].teacher});
    }
    if (check_schedule(inst, sol)) out.schedules.push_back(std::move(sol));

    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < options[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) {
        out.canonicalize();
        return out;
      }
    }
  }
}

SolutionSet brute_force(const SubsetSumInstance& inst,
                        const BruteForceBounds& bounds) {
  validate(inst);
  const int n = static_cast<int>(inst.elements.size());
  if (n > bounds.max_subset_elements)
    throw DataError("instance above brute-force scan bound: n=" +
                    std::to_string(n));
  SolutionSet out = SolutionSet::empty(TaskKind::SubsetSum);
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
    std::int64_t sum = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1ull << i)) sum += inst.elements[static_cast<std::size_t>(i)];
    if (sum != inst.target) continue;
    SubsetSolution sol;
    for (int i = 0; i < n; ++i)
      if (mask & (1ull << i))
        sol.members.push_back(inst.elements[static_cast<std::size_t>(i)]);
    std::sort(sol.members.begin(), sol.members.end());
    out.subsets.push_back(std::move(sol));
  }
  out.canonicalize();
  return out;
}

SolutionSet brute_force(const BenchmarkItem& item,
                        const BruteForceBounds& bounds) {
  if (item.task_kind == TaskKind::TimeTabling)
    return brute_force(item.timetabling(), bounds);
  return brute_force(item.subsetsum(), bounds);
}

}  // namespace musobench
