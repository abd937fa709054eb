#include "musobench/corpus.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "musobench/rng.hpp"

namespace musobench {

namespace {

void require_range(int lo, int hi, const char* what) {
  if (lo < 1 || hi < lo)
    throw ConfigError(std::string(what) + " range invalid: [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

void validate(const TimeTablingParams& p) {
  require_range(p.min_courses, p.max_courses, "courses");
  require_range(p.min_teachers, p.max_teachers, "teachers");
  require_range(p.min_rooms, p.max_rooms, "rooms");
  require_range(p.min_times, p.max_times, "time slots");
  require_range(p.min_allowed, p.max_allowed, "allowed-set size");
  if (p.single_room_prob < 0.0 || p.single_room_prob > 1.0)
    throw ConfigError("single_room_prob must lie in [0, 1]");
}

void validate(const SubsetSumParams& p) {
  require_range(p.min_n, p.max_n, "element count");
  if (p.max_value < p.min_value)
    throw ConfigError("value range invalid");
  const auto span = static_cast<std::uint64_t>(p.max_value - p.min_value) + 1;
  if (span < static_cast<std::uint64_t>(p.max_n))
    throw ConfigError("value range too small for " + std::to_string(p.max_n) +
                      " distinct integers");
}

StrataConfig default_timetabling_strata() {
  StrataConfig s;
  const std::int64_t edges[][2] = {{1, 2},     {3, 5},     {6, 10},
                                   {11, 20},   {21, 50},   {51, 100},
                                   {101, 200}, {201, 400}, {401, 800},
                                   {801, 1600}};
  int idx = 0;
  for (const auto& e : edges) s.bands.push_back({idx++, e[0], e[1]});
  return s;
}

StrataConfig default_subsetsum_strata() {
  StrataConfig s;
  const std::int64_t edges[][2] = {{1, 1},  {2, 2},   {3, 4},  {5, 7},
                                   {8, 12}, {13, 20}, {21, 40}};
  int idx = 0;
  for (const auto& e : edges) s.bands.push_back({idx++, e[0], e[1]});
  return s;
}

TimeTablingInstance gen_timetabling(const TimeTablingParams& params,
                                    std::uint64_t seed) {
  validate(params);
  Rng rng(seed);
  TimeTablingInstance inst;
  inst.seed = seed;
  const int num_courses =
      static_cast<int>(rng.uniform_int(params.min_courses, params.max_courses));
  inst.num_teachers =
      static_cast<int>(rng.uniform_int(params.min_teachers, params.max_teachers));
  inst.num_rooms =
      static_cast<int>(rng.uniform_int(params.min_rooms, params.max_rooms));
  inst.num_times =
      static_cast<int>(rng.uniform_int(params.min_times, params.max_times));

  for (int c = 0; c < num_courses; ++c) {
    CourseSpec spec;
    spec.course_id = c;
    spec.teacher = static_cast<int>(rng.bounded(
        static_cast<std::uint64_t>(inst.num_teachers)));
    const int t_hi = std::min(params.max_allowed, inst.num_times);
    const int t_lo = std::min(params.min_allowed, t_hi);
    const int t_size = static_cast<int>(rng.uniform_int(t_lo, t_hi));
    spec.allowed_times = rng.sample_sorted(inst.num_times, t_size);
    if (rng.bernoulli(params.single_room_prob)) {
      spec.allowed_rooms = {static_cast<int>(
          rng.bounded(static_cast<std::uint64_t>(inst.num_rooms)))};
    } else {
      const int r_hi = std::min(params.max_allowed, inst.num_rooms);
      const int r_lo = std::min(params.min_allowed, r_hi);
      const int r_size = static_cast<int>(rng.uniform_int(r_lo, r_hi));
      spec.allowed_rooms = rng.sample_sorted(inst.num_rooms, r_size);
    }
    inst.courses.push_back(std::move(spec));
  }
  return inst;
}

SubsetSumInstance gen_subsetsum(const SubsetSumParams& params,
                                std::uint64_t seed) {
  validate(params);
  Rng rng(seed);
  SubsetSumInstance inst;
  inst.seed = seed;
  const int n = static_cast<int>(rng.uniform_int(params.min_n, params.max_n));

  std::unordered_set<std::int64_t> seen;
  while (static_cast<int>(inst.elements.size()) < n) {
    const std::int64_t v = rng.uniform_int(params.min_value, params.max_value);
    if (seen.insert(v).second) inst.elements.push_back(v);
  }

  // Target = sum of a random non-empty subset, so the instance is solvable.
  std::int64_t sum = 0;
  bool any = false;
  for (auto v : inst.elements) {
    if (rng.bounded(2) == 1) {
      sum += v;
      any = true;
    }
  }
  if (!any) {
    const auto pick = rng.bounded(static_cast<std::uint64_t>(n));
    sum = inst.elements[pick];
  }
  inst.target = sum;
  return inst;
}

namespace {

std::string join_ints(const std::vector<int>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    out << values[i];
  }
  return out.str();
}

}  // namespace

std::string render_question(const TimeTablingInstance& inst) {
  std::ostringstream out;
  out << "Constraints:\n";
  for (const auto& c : inst.courses) {
    out << "- Course" << c.course_id << " : Time [" << join_ints(c.allowed_times)
        << "], Room [" << join_ints(c.allowed_rooms) << "], Teacher ["
        << c.teacher << "]\n";
  }
  out << "- Multiple courses cannot be scheduled in the same time slot and "
         "room.\n";
  out << "- A teacher can only teach one course at a time.";
  return out.str();
}

std::string render_question(const SubsetSumInstance& inst) {
  std::ostringstream out;
  out << "Given the set of unique integers: {";
  for (std::size_t i = 0; i < inst.elements.size(); ++i) {
    if (i) out << ", ";
    out << inst.elements[i];
  }
  out << "}\nFind all subsets that sum exactly to the target: " << inst.target;
  return out.str();
}

std::string render_question(const BenchmarkItem& item) {
  if (item.task_kind == TaskKind::TimeTabling)
    return render_question(item.timetabling());
  return render_question(item.subsetsum());
}

std::optional<LevelBand> assign_level(std::int64_t solution_count,
                                      const StrataConfig& strata) {
  validate(strata);
  for (const auto& band : strata.bands)
    if (band.min_solutions <= solution_count &&
        solution_count <= band.max_solutions)
      return band;
  return std::nullopt;
}

void validate(const BuildConfig& config) {
  if (config.quota < 1) throw ConfigError("quota must be >= 1");
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (config.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  validate(config.timetabling);
  validate(config.subsetsum);
  if (!config.strata.bands.empty()) validate(config.strata);
}

namespace {

struct Attempt {
  std::uint64_t index = 0;
  std::variant<TimeTablingInstance, SubsetSumInstance> instance;
  SolutionSet solutions;
  bool usable = false;  // solved within budget and below the strata ceiling
};

Attempt run_attempt(const BuildConfig& config, const StrataConfig& strata,
                    std::uint64_t root_seed, std::uint64_t index) {
  Attempt attempt;
  attempt.index = index;
  const std::uint64_t item_seed = derive_seed(root_seed, index);
  SolveOptions opts;
  opts.node_budget = config.node_budget;
  opts.max_solutions =
      static_cast<std::uint64_t>(strata.bands.back().max_solutions);
  try {
    if (config.task == TaskKind::TimeTabling) {
      auto inst = gen_timetabling(config.timetabling, item_seed);
      auto result = solve_timetabling(inst, opts);
      attempt.usable = !result.truncated;
      attempt.solutions = std::move(result.solutions);
      attempt.instance = std::move(inst);
    } else {
      auto inst = gen_subsetsum(config.subsetsum, item_seed);
      auto result = solve_subsetsum(inst, opts);
      attempt.usable = !result.truncated;
      attempt.solutions = std::move(result.solutions);
      attempt.instance = std::move(inst);
    }
  } catch (const BudgetExceeded&) {
    attempt.usable = false;
  }
  return attempt;
}

}  // namespace

Corpus build_benchmark(const BuildConfig& config, std::uint64_t seed) {
  validate(config);
  StrataConfig strata = config.strata;
  if (strata.bands.empty())
    strata = config.task == TaskKind::TimeTabling ? default_timetabling_strata()
                                                  : default_subsetsum_strata();
  validate(strata);

  Corpus corpus;
  corpus.task = config.task;
  corpus.seed = seed;
  corpus.config = config;
  corpus.config.strata = strata;

  std::vector<int> filled(strata.bands.size(), 0);
  std::size_t remaining = strata.bands.size() * static_cast<std::size_t>(config.quota);
  const char* prefix = config.task == TaskKind::TimeTabling ? "tt" : "ss";

  // Attempts are evaluated in blocks of parallel workers but committed in
  // attempt-index order, so the emitted corpus is independent of scheduling.
  const std::size_t block =
      static_cast<std::size_t>(std::max(1, config.parallelism)) * 4;
  std::uint64_t next_index = 0;
  while (remaining > 0) {
    if (next_index >= config.max_attempts) break;
    const std::uint64_t begin = next_index;
    const std::uint64_t end =
        std::min<std::uint64_t>(begin + block, config.max_attempts);
    next_index = end;

    std::vector<Attempt> attempts(end - begin);
    if (config.parallelism == 1) {
      for (std::uint64_t k = begin; k < end; ++k)
        attempts[k - begin] = run_attempt(config, strata, seed, k);
    } else {
      std::vector<std::future<Attempt>> futures;
      futures.reserve(attempts.size());
      for (std::uint64_t k = begin; k < end; ++k)
        futures.push_back(std::async(std::launch::async, run_attempt,
                                     std::cref(config), std::cref(strata),
                                     seed, k));
      for (std::size_t i = 0; i < futures.size(); ++i)
        attempts[i] = futures[i].get();
    }

    for (auto& attempt : attempts) {
      if (remaining == 0) break;
      if (!attempt.usable) continue;
      const auto count = static_cast<std::int64_t>(attempt.solutions.size());
      const auto band = assign_level(count, strata);
      if (!band || filled[static_cast<std::size_t>(band->level_index)] >=
                       config.quota)
        continue;
      BenchmarkItem item;
      std::ostringstream id;
      id << prefix << "-a" << std::setw(6) << std::setfill('0') << attempt.index;
      item.item_id = id.str();
      item.task_kind = config.task;
      item.instance = std::move(attempt.instance);
      item.ground_truth = std::move(attempt.solutions);
      item.level = band->level_index;
      item.question_text = render_question(item);
      corpus.items.push_back(std::move(item));
      ++filled[static_cast<std::size_t>(band->level_index)];
      --remaining;
    }
  }

  if (remaining > 0) {
    std::ostringstream msg;
    msg << "attempt budget exhausted after " << config.max_attempts
        << " attempts; unfilled levels:";
    for (std::size_t i = 0; i < filled.size(); ++i)
      if (filled[i] < config.quota)
        msg << " " << i << " (" << filled[i] << "/" << config.quota << ")";
    throw DataError(msg.str());
  }
  return corpus;
}

}  // namespace musobench
