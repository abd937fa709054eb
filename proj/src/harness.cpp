#include "musobench/harness.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <sstream>
#include <thread>

#include "musobench/mitigate.hpp"
#include "musobench/serialize.hpp"

namespace musobench {

namespace fs = std::filesystem;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::None: return "none";
    case Strategy::Explore: return "explore";
    case Strategy::ScMedian: return "sc-median";
    case Strategy::ScVote: return "sc-vote";
    case Strategy::Reflect: return "reflect";
  }
  return "none";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "none") return Strategy::None;
  if (name == "explore") return Strategy::Explore;
  if (name == "sc-median") return Strategy::ScMedian;
  if (name == "sc-vote") return Strategy::ScVote;
  if (name == "reflect") return Strategy::Reflect;
  throw ConfigError("unknown strategy: '" + name +
                    "' (expected none, explore, sc-median, sc-vote, reflect)");
}

void validate(const RunConfig& config) {
  if (config.temperature < 0) throw ConfigError("temperature must be >= 0");
  if (config.max_completion_tokens < 1)
    throw ConfigError("max_completion_tokens must be >= 1");
  if (config.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (config.timeout_seconds < 1) throw ConfigError("timeout_seconds must be >= 1");
  if (config.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  for (const double t : config.temperatures)
    if (t < 0) throw ConfigError("sweep temperatures must be >= 0");
  if (config.strategy == Strategy::Reflect) {
    if (config.checkpoints.empty())
      throw ConfigError("strategy reflect needs at least one checkpoint budget");
    for (const long b : config.checkpoints)
      if (b < 0) throw ConfigError("checkpoint budgets must be >= 0");
    if (!config.supports_continuation)
      throw UnsupportedEndpoint(
          "strategy reflect needs an endpoint that supports assistant-message "
          "continuation (set supports_continuation once confirmed)");
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = kRunConfigSchema;
  j["endpoint"] = c.endpoint;
  j["api_key_env"] = c.api_key_env;
  j["model"] = c.model;
  j["timeout_seconds"] = c.timeout_seconds;
  j["max_retries"] = c.max_retries;
  j["retry_backoff_ms"] = c.retry_backoff_ms;
  j["paradigm"] = to_string(c.paradigm);
  j["temperature"] = c.temperature;
  j["max_completion_tokens"] = c.max_completion_tokens;
  j["rounds"] = {{"recheck", c.rounds.recheck}, {"explore", c.rounds.explore}};
  j["parallelism"] = c.parallelism;
  j["run_seed"] = c.run_seed;
  j["prompt_dir"] = c.prompt_dir;
  j["supports_continuation"] = c.supports_continuation;
  j["strategy"] = to_string(c.strategy);
  j["n_paths"] = c.n_paths;
  j["checkpoints"] = c.checkpoints;
  j["temperatures"] = c.temperatures;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  if (j.value("schema", "") != std::string(kRunConfigSchema))
    throw ConfigError(std::string("run config schema must be \"") +
                      kRunConfigSchema + "\"");
  RunConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.model = j.value("model", c.model);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.retry_backoff_ms = j.value("retry_backoff_ms", c.retry_backoff_ms);
  if (j.contains("paradigm"))
    c.paradigm = paradigm_from_string(j["paradigm"].get<std::string>());
  c.temperature = j.value("temperature", c.temperature);
  c.max_completion_tokens = j.value("max_completion_tokens", c.max_completion_tokens);
  if (j.contains("rounds")) {
    c.rounds.recheck = j["rounds"].value("recheck", false);
    c.rounds.explore = j["rounds"].value("explore", false);
  }
  c.parallelism = j.value("parallelism", c.parallelism);
  c.run_seed = j.value("run_seed", c.run_seed);
  c.prompt_dir = j.value("prompt_dir", c.prompt_dir);
  c.supports_continuation = j.value("supports_continuation", c.supports_continuation);
  if (j.contains("strategy"))
    c.strategy = strategy_from_string(j["strategy"].get<std::string>());
  c.n_paths = j.value("n_paths", c.n_paths);
  if (j.contains("checkpoints"))
    c.checkpoints = j["checkpoints"].get<std::vector<long>>();
  if (j.contains("temperatures"))
    c.temperatures = j["temperatures"].get<std::vector<double>>();
  validate(c);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ConfigError("run config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Transcript serialization

namespace {

json messages_to_json(const std::vector<ChatMessage>& messages) {
  json arr = json::array();
  for (const auto& m : messages)
    arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

std::vector<ChatMessage> messages_from_json(const json& arr) {
  std::vector<ChatMessage> out;
  for (const auto& m : arr)
    out.push_back({m.value("role", "user"), m.value("content", "")});
  return out;
}

}  // namespace

json to_json(const Transcript& t) {
  json j;
  j["key"] = t.key;
  j["item_id"] = t.item_id;
  j["task"] = to_string(t.task);
  j["status"] = t.status;
  if (!t.error.empty()) j["error"] = t.error;
  auto& rounds = j["rounds"] = json::array();
  for (const auto& r : t.rounds) {
    json rj;
    rj["kind"] = r.kind;
    rj["request"] = messages_to_json(r.request);
    rj["response"] = r.response;
    if (r.solutions) rj["solutions"] = to_json(*r.solutions);
    if (r.confidence) rj["confidence"] = *r.confidence;
    if (r.change)
      rj["change"] = *r.change == ChangeFlag::Change ? "change" : "unchange";
    if (!r.diagnostics.empty()) rj["diagnostics"] = r.diagnostics;
    if (r.usage)
      rj["usage"] = {{"prompt_tokens", r.usage->prompt_tokens},
                     {"completion_tokens", r.usage->completion_tokens}};
    if (r.latency_ms) rj["latency_ms"] = *r.latency_ms;
    rounds.push_back(std::move(rj));
  }
  return j;
}

Transcript transcript_from_json(const json& j) {
  Transcript t;
  t.key = j.at("key").get<std::string>();
  t.item_id = j.at("item_id").get<std::string>();
  t.task = task_kind_from_string(j.at("task").get<std::string>());
  t.status = j.at("status").get<std::string>();
  t.error = j.value("error", "");
  for (const auto& rj : j.at("rounds")) {
    RoundRecord r;
    r.kind = rj.at("kind").get<std::string>();
    r.request = messages_from_json(rj.at("request"));
    r.response = rj.at("response").get<std::string>();
    if (rj.contains("solutions"))
      r.solutions = solution_set_from_json(t.task, rj["solutions"]);
    if (rj.contains("confidence")) r.confidence = rj["confidence"].get<int>();
    if (rj.contains("change"))
      r.change = rj["change"] == "change" ? ChangeFlag::Change : ChangeFlag::Unchange;
    if (rj.contains("diagnostics"))
      r.diagnostics = rj["diagnostics"].get<std::vector<std::string>>();
    if (rj.contains("usage"))
      r.usage = TokenUsage{rj["usage"].value("prompt_tokens", 0L),
                           rj["usage"].value("completion_tokens", 0L)};
    if (rj.contains("latency_ms")) r.latency_ms = rj["latency_ms"].get<double>();
    t.rounds.push_back(std::move(r));
  }
  return t;
}

std::vector<Transcript> load_transcripts(const std::string& path) {
  const std::string bytes = read_file(path);
  std::vector<Transcript> out;
  std::istringstream lines(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(transcript_from_json(
        parse_json(line, path + ":" + std::to_string(line_no))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Journal

Journal::Journal(const std::string& path) {
  std::string bytes;
  if (fs::exists(path)) bytes = read_file(path);

  std::size_t good_end = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto eol = bytes.find('\n', pos);
    if (eol == std::string::npos) break;  // torn tail from a crash: drop it
    const std::string line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) {
      good_end = pos;
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      break;  // damaged line: ignore it and everything after
    }
    const auto key = j.at("key").get<std::string>();
    if (j.contains("failed")) {
      failures_[key] = j["failed"].get<std::string>();
    } else {
      JournaledRound entry;
      entry.response = j.at("response").get<std::string>();
      if (j.contains("usage"))
        entry.usage = TokenUsage{j["usage"].value("prompt_tokens", 0L),
                                 j["usage"].value("completion_tokens", 0L)};
      if (j.contains("latency_ms"))
        entry.latency_ms = j["latency_ms"].get<double>();
      rounds_[{key, j.at("round").get<int>()}] = std::move(entry);
    }
    good_end = pos;
  }

  if (good_end < bytes.size()) {
    // Rewrite without the damaged tail so future appends stay parseable.
    std::ofstream trunc(path, std::ios::binary | std::ios::trunc);
    trunc.write(bytes.data(), static_cast<std::streamsize>(good_end));
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw DataError("cannot open journal for append: " + path);
}

std::optional<JournaledRound> Journal::lookup(const std::string& key,
                                              int round) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = rounds_.find({key, round});
  if (it == rounds_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Journal::failure(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = failures_.find(key);
  if (it == failures_.end()) return std::nullopt;
  return it->second;
}

void Journal::record(const std::string& key, int round, const std::string& kind,
                     const JournaledRound& entry) {
  json j;
  j["key"] = key;
  j["round"] = round;
  j["kind"] = kind;
  j["response"] = entry.response;
  if (entry.usage)
    j["usage"] = {{"prompt_tokens", entry.usage->prompt_tokens},
                  {"completion_tokens", entry.usage->completion_tokens}};
  if (entry.latency_ms) j["latency_ms"] = *entry.latency_ms;
  std::lock_guard<std::mutex> lock(mu_);
  rounds_[{key, round}] = entry;
  out_ << j.dump() << '\n' << std::flush;
}

void Journal::record_failure(const std::string& key, const std::string& message) {
  std::lock_guard<std::mutex> lock(mu_);
  if (failures_.count(key)) return;
  failures_[key] = message;
  json j;
  j["key"] = key;
  j["failed"] = message;
  out_ << j.dump() << '\n' << std::flush;
}

// ---------------------------------------------------------------------------
// RoundRunner

RoundRunner::RoundRunner(ChatClient& client, const RunConfig& config,
                         const PromptLibrary& prompts, Journal* journal,
                         std::string key)
    : client_(client), config_(config), prompts_(prompts), journal_(journal) {
  transcript_.key = std::move(key);
}

RoundRunner::RoundRunner(ChatClient& client, const RunConfig& config,
                         const PromptLibrary& prompts, Journal* journal,
                         Transcript transcript)
    : client_(client),
      config_(config),
      prompts_(prompts),
      journal_(journal),
      transcript_(std::move(transcript)),
      next_round_(static_cast<int>(transcript_.rounds.size())) {}

std::string RoundRunner::ask(const std::string& kind,
                             std::vector<ChatMessage> messages, long budget) {
  const int index = next_round_++;
  RoundRecord record;
  record.kind = kind;
  record.request = std::move(messages);

  JournaledRound entry;
  const auto replay =
      journal_ ? journal_->lookup(transcript_.key, index) : std::nullopt;
  if (replay) {
    entry = *replay;
  } else {
    if (journal_) {
      if (const auto failed = journal_->failure(transcript_.key))
        throw EndpointError(*failed);
    }
    RequestOptions options;
    options.temperature = config_.temperature;
    options.max_completion_tokens =
        budget >= 0 ? budget : config_.max_completion_tokens;
    const ChatResult out = client_.complete(record.request, options);
    entry = {out.content, out.usage, out.latency_ms};
    if (journal_) journal_->record(transcript_.key, index, kind, entry);
  }

  record.response = entry.response;
  record.usage = entry.usage;
  record.latency_ms = entry.latency_ms;
  transcript_.rounds.push_back(std::move(record));
  return transcript_.rounds.back().response;
}

// ---------------------------------------------------------------------------
// Round flows

std::optional<int> elicit_confidence(RoundRunner& runner,
                                     std::vector<ChatMessage>& history) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    history.push_back({"user", build_confidence_prompt(runner.prompts())});
    const std::string reply = runner.ask("confidence", history);
    auto& record = runner.last();
    const auto confidence = parse_confidence(reply, &record.diagnostics);
    record.confidence = confidence;
    history.push_back({"assistant", reply});
    if (confidence) return confidence;
  }
  return std::nullopt;
}

void finalize_status(Transcript& transcript) {
  const SolutionSet* final_set = nullptr;
  for (const auto& r : transcript.rounds)
    if (r.solutions) final_set = &*r.solutions;
  transcript.status =
      final_set && final_set->size() > 0 ? "complete" : "parse-empty";
}

void mark_endpoint_failed(Transcript& transcript, const std::string& what,
                          Journal* journal) {
  transcript.status = "endpoint-failed";
  transcript.error = what;
  if (journal) journal->record_failure(transcript.key, what);
}

Transcript run_instance(ChatClient& client, const BenchmarkItem& item,
                        const RunConfig& config, const PromptLibrary& prompts,
                        Journal* journal, const std::string& key) {
  RoundRunner runner(client, config, prompts, journal, key);
  runner.transcript().item_id = item.item_id;
  runner.transcript().task = item.task_kind;

  try {
    std::vector<ChatMessage> history;
    history.push_back(
        {"user", build_answer_prompt(item, config.paradigm, prompts)});
    const std::string reply = runner.ask("answer", history);
    ParseOutcome first = parse_solutions(reply, item.task_kind);
    runner.last().solutions = first.solutions;
    runner.last().diagnostics = std::move(first.diagnostics);
    history.push_back({"assistant", reply});
    SolutionSet current = *runner.last().solutions;

    elicit_confidence(runner, history);

    if (config.rounds.recheck) {
      history.push_back({"user", build_recheck_prompt(prompts)});
      const std::string recheck_reply = runner.ask("recheck", history);
      ParseOutcome outcome =
          parse_recheck(recheck_reply, current, item.task_kind);
      runner.last().solutions = outcome.solutions;
      runner.last().change = outcome.change;
      runner.last().diagnostics = std::move(outcome.diagnostics);
      history.push_back({"assistant", recheck_reply});
      current = *runner.last().solutions;
    }

    if (config.rounds.explore || config.strategy == Strategy::Explore)
      extend_with_explore(runner, item, history, current);

    finalize_status(runner.transcript());
  } catch (const EndpointError& e) {
    mark_endpoint_failed(runner.transcript(), e.what(), journal);
  }
  return std::move(runner.transcript());
}

// ---------------------------------------------------------------------------
// run_benchmark

namespace {

std::string temperature_dir_name(double t) { return "t" + json(t).dump(); }

RunTotals tally(const std::vector<Transcript>& transcripts) {
  RunTotals totals;
  for (const auto& t : transcripts) {
    if (t.status == "complete")
      ++totals.complete;
    else if (t.status == "parse-empty")
      ++totals.parse_empty;
    else
      ++totals.endpoint_failed;
  }
  return totals;
}

json run_meta(const RunConfig& config, const Corpus& corpus,
              const std::string& corpus_digest) {
  json meta;
  meta["schema"] = kRunMetaSchema;
  meta["config"] = to_json(config);
  meta["corpus_digest"] = corpus_digest;
  meta["corpus_items"] = corpus.items.size();
  meta["corpus_task"] = to_string(corpus.task);
  return meta;
}

}  // namespace

RunTotals run_benchmark(ChatClient& client, const Corpus& corpus,
                        const RunConfig& config, const std::string& out_dir,
                        const std::string& corpus_digest) {
  validate(config);
  if (corpus.items.empty()) throw DataError("corpus has no items");

  fs::create_directories(out_dir);
  const std::string meta_path = out_dir + "/run.json";
  const std::string complete_path = out_dir + "/run.complete";

  if (!config.temperatures.empty()) {
    const json parent_meta = run_meta(config, corpus, corpus_digest);
    if (fs::exists(meta_path)) {
      const json existing = parse_json(read_file(meta_path), meta_path);
      if (existing != parent_meta)
        throw ConfigError("run directory " + out_dir +
                          " was started with a different config or corpus; "
                          "refusing to mix runs");
    } else {
      write_file_atomic(meta_path, parent_meta.dump(2) + "\n");
    }
    RunTotals totals;
    for (const double t : config.temperatures) {
      RunConfig leaf = config;
      leaf.temperature = t;
      leaf.temperatures.clear();
      const std::string leaf_dir = out_dir + "/" + temperature_dir_name(t);
      const RunTotals sub =
          run_benchmark(client, corpus, leaf, leaf_dir, corpus_digest);
      totals.complete += sub.complete;
      totals.parse_empty += sub.parse_empty;
      totals.endpoint_failed += sub.endpoint_failed;
      totals.sub_runs.push_back(leaf_dir);
    }
    if (!fs::exists(complete_path))
      write_file_atomic(complete_path, "complete\n");
    return totals;
  }

  const json meta = run_meta(config, corpus, corpus_digest);
  if (fs::exists(meta_path)) {
    const json existing = parse_json(read_file(meta_path), meta_path);
    if (existing != meta)
      throw ConfigError("run directory " + out_dir +
                        " was started with a different config or corpus; "
                        "refusing to mix runs");
  } else {
    write_file_atomic(meta_path, meta.dump(2) + "\n");
  }
  if (fs::exists(complete_path))
    return tally(load_transcripts(out_dir + "/transcripts.jsonl"));

  Journal journal(out_dir + "/journal.log");
  const PromptLibrary prompts = config.prompt_dir.empty()
                                    ? builtin_prompts()
                                    : load_prompts(config.prompt_dir);

  const std::size_t n_items = corpus.items.size();
  std::vector<std::vector<Transcript>> results(n_items);
  std::vector<std::optional<ItemAggregate>> aggregates(n_items);

  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_items) return;
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (first_error) return;
      }
      const BenchmarkItem& item = corpus.items[i];
      try {
        switch (config.strategy) {
          case Strategy::None:
          case Strategy::Explore:
            results[i].push_back(run_instance(client, item, config, prompts,
                                              &journal, item.item_id));
            break;
          case Strategy::ScMedian:
          case Strategy::ScVote:
            aggregates[i] = self_consistency(client, item, config, prompts,
                                             &journal, &results[i]);
            break;
          case Strategy::Reflect: {
            for (auto& [budget, transcript] :
                 reflection_budget(client, item, config, prompts, &journal))
              results[i].push_back(std::move(transcript));
            break;
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), n_items);
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::ostringstream transcripts_out;
  std::vector<Transcript> all;
  for (auto& group : results)
    for (auto& t : group) {
      transcripts_out << to_json(t).dump() << '\n';
      all.push_back(std::move(t));
    }
  write_file_atomic(out_dir + "/transcripts.jsonl", transcripts_out.str());

  if (config.strategy == Strategy::ScMedian ||
      config.strategy == Strategy::ScVote) {
    std::ostringstream agg_out;
    for (const auto& agg : aggregates)
      if (agg) agg_out << to_json(*agg).dump() << '\n';
    write_file_atomic(out_dir + "/aggregates.jsonl", agg_out.str());
  }

  write_file_atomic(complete_path, "complete\n");
  return tally(all);
}

}  // namespace musobench
