#include "musobench/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace musobench {

std::string to_string(TaskKind kind) {
  return kind == TaskKind::TimeTabling ? "timetabling" : "subsetsum";
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "timetabling") return TaskKind::TimeTabling;
  if (name == "subsetsum") return TaskKind::SubsetSum;
  throw ConfigError("unknown task kind: '" + name +
                    "' (expected timetabling or subsetsum)");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

void validate(const TimeTablingInstance& inst) {
  if (inst.courses.empty()) throw DataError("timetabling instance has no courses");
  if (inst.num_times <= 0 || inst.num_rooms <= 0 || inst.num_teachers <= 0)
    throw DataError("timetabling instance has an empty global pool");
  for (std::size_t i = 0; i < inst.courses.size(); ++i) {
    const auto& c = inst.courses[i];
    if (c.course_id != static_cast<int>(i))
      throw DataError("course ids must be 0..n-1 in order");
    if (c.allowed_times.empty() || c.allowed_rooms.empty())
      throw DataError("course has an empty allowed set");
    if (!std::is_sorted(c.allowed_times.begin(), c.allowed_times.end()) ||
        !std::is_sorted(c.allowed_rooms.begin(), c.allowed_rooms.end()))
      throw DataError("allowed sets must be ascending");
    for (int t : c.allowed_times)
      if (t < 0 || t >= inst.num_times)
        throw DataError("allowed time outside global pool");
    for (int r : c.allowed_rooms)
      if (r < 0 || r >= inst.num_rooms)
        throw DataError("allowed room outside global pool");
    if (c.teacher < 0 || c.teacher >= inst.num_teachers)
      throw DataError("teacher outside global pool");
  }
}

void validate(const SubsetSumInstance& inst) {
  if (inst.elements.empty()) throw DataError("subsetsum instance has no elements");
  std::unordered_set<std::int64_t> seen;
  for (auto v : inst.elements)
    if (!seen.insert(v).second)
      throw DataError("subsetsum elements must be pairwise distinct");
}

SolutionSet SolutionSet::empty(TaskKind kind) {
  SolutionSet s;
  s.kind = kind;
  return s;
}

std::size_t SolutionSet::size() const {
  return kind == TaskKind::TimeTabling ? schedules.size() : subsets.size();
}

void SolutionSet::canonicalize() {
  auto squeeze = [](auto& vec) {
    std::sort(vec.begin(), vec.end());
    vec.erase(std::unique(vec.begin(), vec.end()), vec.end());
  };
  squeeze(schedules);
  squeeze(subsets);
}

void SolutionSet::add(ScheduleSolution sol) { schedules.push_back(std::move(sol)); }
void SolutionSet::add(SubsetSolution sol) { subsets.push_back(std::move(sol)); }

namespace {

void require_same_kind(const SolutionSet& a, const SolutionSet& b) {
  if (a.kind != b.kind)
    throw DataError("solution sets have mismatched task kinds");
}

template <typename T>
std::vector<T> merged(const std::vector<T>& a, const std::vector<T>& b,
                      int mode) {
  std::vector<T> out;
  switch (mode) {
    case 0:
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(out));
      break;
    case 1:
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
      break;
    default:
      std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                     std::back_inserter(out));
      break;
  }
  return out;
}

SolutionSet combine(const SolutionSet& a, const SolutionSet& b, int mode) {
  require_same_kind(a, b);
  SolutionSet out = SolutionSet::empty(a.kind);
  out.schedules = merged(a.schedules, b.schedules, mode);
  out.subsets = merged(a.subsets, b.subsets, mode);
  return out;
}

}  // namespace

SolutionSet set_intersection(const SolutionSet& a, const SolutionSet& b) {
  return combine(a, b, 0);
}

SolutionSet set_difference(const SolutionSet& a, const SolutionSet& b) {
  return combine(a, b, 1);
}

SolutionSet set_union(const SolutionSet& a, const SolutionSet& b) {
  return combine(a, b, 2);
}

std::size_t intersection_size(const SolutionSet& a, const SolutionSet& b) {
  return set_intersection(a, b).size();
}

void validate(const StrataConfig& strata) {
  if (strata.bands.empty()) throw ConfigError("strata config has no bands");
  for (std::size_t i = 0; i < strata.bands.size(); ++i) {
    const auto& band = strata.bands[i];
    if (band.level_index != static_cast<int>(i))
      throw ConfigError("strata level indices must be 0..k-1 in order");
    if (band.min_solutions < 1 || band.max_solutions < band.min_solutions)
      throw ConfigError("strata band bounds must satisfy 1 <= min <= max");
    if (i > 0 && band.min_solutions <= strata.bands[i - 1].max_solutions)
      throw ConfigError("strata bands must be disjoint and ascending");
  }
}

const TimeTablingInstance& BenchmarkItem::timetabling() const {
  if (task_kind != TaskKind::TimeTabling)
    throw DataError("item " + item_id + " is not a timetabling item");
  return std::get<TimeTablingInstance>(instance);
}

const SubsetSumInstance& BenchmarkItem::subsetsum() const {
  if (task_kind != TaskKind::SubsetSum)
    throw DataError("item " + item_id + " is not a subsetsum item");
  return std::get<SubsetSumInstance>(instance);
}

}  // namespace musobench
