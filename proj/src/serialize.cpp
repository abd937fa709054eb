#include "musobench/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace musobench {

namespace {

const json& field(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end())
    throw DataError(what + ": missing field '" + key + "'");
  return *it;
}

void expect_schema(const json& j, const char* schema, const std::string& what) {
  const auto got = field(j, "schema", what).get<std::string>();
  if (got != schema)
    throw DataError(what + ": schema mismatch, expected '" + schema +
                    "', found '" + got + "'");
}

}  // namespace

json to_json(const TimeTablingInstance& inst) {
  json courses = json::array();
  for (const auto& c : inst.courses) {
    courses.push_back({{"id", c.course_id},
                       {"times", c.allowed_times},
                       {"rooms", c.allowed_rooms},
                       {"teacher", c.teacher}});
  }
  return {{"courses", courses},
          {"num_times", inst.num_times},
          {"num_rooms", inst.num_rooms},
          {"num_teachers", inst.num_teachers},
          {"seed", inst.seed}};
}

json to_json(const SubsetSumInstance& inst) {
  return {{"elements", inst.elements},
          {"target", inst.target},
          {"seed", inst.seed}};
}

TimeTablingInstance timetabling_from_json(const json& j) {
  TimeTablingInstance inst;
  for (const auto& cj : field(j, "courses", "instance")) {
    CourseSpec c;
    c.course_id = field(cj, "id", "course").get<int>();
    c.allowed_times = field(cj, "times", "course").get<std::vector<int>>();
    c.allowed_rooms = field(cj, "rooms", "course").get<std::vector<int>>();
    c.teacher = field(cj, "teacher", "course").get<int>();
    inst.courses.push_back(std::move(c));
  }
  inst.num_times = field(j, "num_times", "instance").get<int>();
  inst.num_rooms = field(j, "num_rooms", "instance").get<int>();
  inst.num_teachers = field(j, "num_teachers", "instance").get<int>();
  inst.seed = field(j, "seed", "instance").get<std::uint64_t>();
  validate(inst);
  return inst;
}

SubsetSumInstance subsetsum_from_json(const json& j) {
  SubsetSumInstance inst;
  inst.elements =
      field(j, "elements", "instance").get<std::vector<std::int64_t>>();
  inst.target = field(j, "target", "instance").get<std::int64_t>();
  inst.seed = field(j, "seed", "instance").get<std::uint64_t>();
  validate(inst);
  return inst;
}

json to_json(const SolutionSet& set) {
  json arr = json::array();
  if (set.kind == TaskKind::TimeTabling) {
    for (const auto& sol : set.schedules) {
      json rows = json::array();
      for (const auto& e : sol.entries)
        rows.push_back({e.course_id, e.time, e.room, e.teacher});
      arr.push_back(std::move(rows));
    }
  } else {
    for (const auto& sol : set.subsets) arr.push_back(sol.members);
  }
  return arr;
}

SolutionSet solution_set_from_json(TaskKind kind, const json& j) {
  SolutionSet set = SolutionSet::empty(kind);
  if (!j.is_array()) throw DataError("solution set must be an array");
  for (const auto& sj : j) {
    if (kind == TaskKind::TimeTabling) {
      ScheduleSolution sol;
      for (const auto& row : sj) {
        if (!row.is_array() || row.size() != 4)
          throw DataError("schedule row must be [course, time, room, teacher]");
        sol.entries.push_back({row[0].get<int>(), row[1].get<int>(),
                               row[2].get<int>(), row[3].get<int>()});
      }
      set.schedules.push_back(std::move(sol));
    } else {
      set.subsets.push_back(
          SubsetSolution{sj.get<std::vector<std::int64_t>>()});
    }
  }
  return set;
}

json to_json(const StrataConfig& strata) {
  json arr = json::array();
  for (const auto& band : strata.bands)
    arr.push_back({band.min_solutions, band.max_solutions});
  return arr;
}

StrataConfig strata_from_json(const json& j) {
  StrataConfig strata;
  int idx = 0;
  for (const auto& bj : j) {
    if (!bj.is_array() || bj.size() != 2)
      throw DataError("strata band must be [min, max]");
    strata.bands.push_back(
        {idx++, bj[0].get<std::int64_t>(), bj[1].get<std::int64_t>()});
  }
  validate(strata);
  return strata;
}

json to_json(const TimeTablingParams& p) {
  return {{"min_courses", p.min_courses},   {"max_courses", p.max_courses},
          {"min_teachers", p.min_teachers}, {"max_teachers", p.max_teachers},
          {"min_rooms", p.min_rooms},       {"max_rooms", p.max_rooms},
          {"min_times", p.min_times},       {"max_times", p.max_times},
          {"min_allowed", p.min_allowed},   {"max_allowed", p.max_allowed},
          {"single_room_prob", p.single_room_prob}};
}

json to_json(const SubsetSumParams& p) {
  return {{"min_n", p.min_n},
          {"max_n", p.max_n},
          {"min_value", p.min_value},
          {"max_value", p.max_value}};
}

namespace {

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

TimeTablingParams timetabling_params_from_json(const json& j) {
  TimeTablingParams p;
  maybe_get(j, "min_courses", p.min_courses);
  maybe_get(j, "max_courses", p.max_courses);
  maybe_get(j, "min_teachers", p.min_teachers);
  maybe_get(j, "max_teachers", p.max_teachers);
  maybe_get(j, "min_rooms", p.min_rooms);
  maybe_get(j, "max_rooms", p.max_rooms);
  maybe_get(j, "min_times", p.min_times);
  maybe_get(j, "max_times", p.max_times);
  maybe_get(j, "min_allowed", p.min_allowed);
  maybe_get(j, "max_allowed", p.max_allowed);
  maybe_get(j, "single_room_prob", p.single_room_prob);
  validate(p);
  return p;
}

SubsetSumParams subsetsum_params_from_json(const json& j) {
  SubsetSumParams p;
  maybe_get(j, "min_n", p.min_n);
  maybe_get(j, "max_n", p.max_n);
  maybe_get(j, "min_value", p.min_value);
  maybe_get(j, "max_value", p.max_value);
  validate(p);
  return p;
}

json to_json(const BuildConfig& config) {
  return {{"schema", kGenConfigSchema},
          {"task", to_string(config.task)},
          {"quota", config.quota},
          {"max_attempts", config.max_attempts},
          {"node_budget", config.node_budget},
          {"parallelism", config.parallelism},
          {"strata", to_json(config.strata)},
          {"timetabling", to_json(config.timetabling)},
          {"subsetsum", to_json(config.subsetsum)}};
}

BuildConfig build_config_from_json(const json& j) {
  BuildConfig config;
  if (j.contains("schema")) expect_schema(j, kGenConfigSchema, "gen config");
  if (j.contains("task"))
    config.task = task_kind_from_string(j.at("task").get<std::string>());
  maybe_get(j, "quota", config.quota);
  maybe_get(j, "max_attempts", config.max_attempts);
  maybe_get(j, "node_budget", config.node_budget);
  maybe_get(j, "parallelism", config.parallelism);
  if (j.contains("strata")) config.strata = strata_from_json(j.at("strata"));
  if (j.contains("timetabling"))
    config.timetabling = timetabling_params_from_json(j.at("timetabling"));
  if (j.contains("subsetsum"))
    config.subsetsum = subsetsum_params_from_json(j.at("subsetsum"));
  validate(config);
  return config;
}

json to_json(const BenchmarkItem& item) {
  json j = {{"item_id", item.item_id},
            {"task", to_string(item.task_kind)},
            {"level", item.level},
            {"question", item.question_text},
            {"ground_truth", to_json(item.ground_truth)}};
  if (item.task_kind == TaskKind::TimeTabling)
    j["instance"] = to_json(item.timetabling());
  else
    j["instance"] = to_json(item.subsetsum());
  return j;
}

BenchmarkItem item_from_json(const json& j) {
  BenchmarkItem item;
  item.item_id = field(j, "item_id", "item").get<std::string>();
  item.task_kind =
      task_kind_from_string(field(j, "task", "item").get<std::string>());
  item.level = field(j, "level", "item").get<int>();
  item.question_text = field(j, "question", "item").get<std::string>();
  if (item.task_kind == TaskKind::TimeTabling)
    item.instance = timetabling_from_json(field(j, "instance", "item"));
  else
    item.instance = subsetsum_from_json(field(j, "instance", "item"));
  item.ground_truth =
      solution_set_from_json(item.task_kind, field(j, "ground_truth", "item"));
  if (item.ground_truth.size() == 0)
    throw DataError("item " + item.item_id + " has empty ground truth");
  return item;
}

json to_json(const Corpus& corpus) {
  json items = json::array();
  for (const auto& item : corpus.items) items.push_back(to_json(item));
  return {{"schema", kCorpusSchema},
          {"task", to_string(corpus.task)},
          {"seed", corpus.seed},
          {"config", to_json(corpus.config)},
          {"items", items}};
}

Corpus corpus_from_json(const json& j) {
  expect_schema(j, kCorpusSchema, "corpus");
  Corpus corpus;
  corpus.task = task_kind_from_string(field(j, "task", "corpus").get<std::string>());
  corpus.seed = field(j, "seed", "corpus").get<std::uint64_t>();
  corpus.config = build_config_from_json(field(j, "config", "corpus"));
  for (const auto& ij : field(j, "items", "corpus"))
    corpus.items.push_back(item_from_json(ij));
  return corpus;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DataError("cannot move " + tmp + " into place");
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  write_file_atomic(path, to_json(corpus).dump(2) + "\n");
}

Corpus load_corpus(const std::string& path) {
  return corpus_from_json(parse_json(read_file(path), path));
}

std::string corpus_file_digest(const std::string& path) {
  return fnv1a_hex(read_file(path));
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON in " + what);
  return j;
}

}  // namespace musobench
