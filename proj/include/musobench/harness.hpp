#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "musobench/client.hpp"
#include "musobench/corpus.hpp"
#include "musobench/protocol.hpp"

namespace musobench {

inline constexpr const char* kRunConfigSchema = "musobench.runconfig/1";
inline constexpr const char* kRunMetaSchema = "musobench.run/1";

enum class Strategy { None, Explore, ScMedian, ScVote, Reflect };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct RoundPlan {
  bool recheck = false;  // one supplement-or-correct round after confidence
  bool explore = false;  // exploration cue round, confidence re-elicited

  bool operator==(const RoundPlan&) const = default;
};

struct RunConfig {
  std::string endpoint;  // base URL; empty means an injected in-process client
  std::string api_key_env;
  std::string model = "mock";
  int timeout_seconds = 300;
  int max_retries = 3;
  int retry_backoff_ms = 500;

  Paradigm paradigm = Paradigm::ShortCoT;
  double temperature = 0.2;
  long max_completion_tokens = 20480;
  RoundPlan rounds;
  int parallelism = 1;
  std::uint64_t run_seed = 0;
  std::string prompt_dir;  // empty = built-in templates
  bool supports_continuation = false;

  Strategy strategy = Strategy::None;
  int n_paths = 1;                   // parallel reasoning paths (sc-*)
  std::vector<long> checkpoints;     // generation budgets in tokens (reflect)
  std::vector<double> temperatures;  // non-empty = sweep, one sub-run each

  bool operator==(const RunConfig&) const = default;
};

void validate(const RunConfig& config);
nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// ---------------------------------------------------------------------------
// Transcripts

struct RoundRecord {
  std::string kind;  // answer | confidence | recheck | explore | trace | final
  std::vector<ChatMessage> request;
  std::string response;
  std::optional<SolutionSet> solutions;  // solution-bearing rounds only
  std::optional<int> confidence;         // 0-100 scale
  std::optional<ChangeFlag> change;
  std::vector<std::string> diagnostics;
  std::optional<TokenUsage> usage;
  std::optional<double> latency_ms;
};

struct Transcript {
  std::string key;  // item_id, item_id#p<path>, or item_id#c<checkpoint>
  std::string item_id;
  TaskKind task = TaskKind::SubsetSum;
  std::string status = "complete";  // complete | parse-empty | endpoint-failed
  std::string error;                // filled when endpoint-failed
  std::vector<RoundRecord> rounds;
};

nlohmann::json to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Journal: one JSONL line per completed endpoint exchange, appended before
// the response is used. Replaying a journal reproduces a run without
// re-querying; a key marked failed stays failed across resumes.

struct JournaledRound {
  std::string response;
  std::optional<TokenUsage> usage;
  std::optional<double> latency_ms;
};

class Journal {
 public:
  explicit Journal(const std::string& path);  // loads existing entries, then appends

  std::optional<JournaledRound> lookup(const std::string& key, int round) const;
  std::optional<std::string> failure(const std::string& key) const;

  void record(const std::string& key, int round, const std::string& kind,
              const JournaledRound& entry);
  void record_failure(const std::string& key, const std::string& message);

 private:
  mutable std::mutex mu_;
  std::ofstream out_;
  std::map<std::pair<std::string, int>, JournaledRound> rounds_;
  std::map<std::string, std::string> failures_;
};

// ---------------------------------------------------------------------------
// Execution

/// Queries for one transcript, replaying journaled rounds instead of
/// re-asking. Throws EndpointError when the transport gives up; the caller
/// converts that into an endpoint-failed transcript.
class RoundRunner {
 public:
  RoundRunner(ChatClient& client, const RunConfig& config,
              const PromptLibrary& prompts, Journal* journal, std::string key);

  /// Resumes appending after the rounds already in `transcript`.
  RoundRunner(ChatClient& client, const RunConfig& config,
              const PromptLibrary& prompts, Journal* journal,
              Transcript transcript);

  /// Appends one round: sends `messages`, records the exchange, returns the
  /// raw response text. `budget` overrides max_completion_tokens when >= 0.
  std::string ask(const std::string& kind, std::vector<ChatMessage> messages,
                  long budget = -1);

  Transcript& transcript() { return transcript_; }
  RoundRecord& last() { return transcript_.rounds.back(); }
  const RunConfig& config() const { return config_; }
  const PromptLibrary& prompts() const { return prompts_; }

 private:
  ChatClient& client_;
  const RunConfig& config_;
  const PromptLibrary& prompts_;
  Journal* journal_;
  Transcript transcript_;
  int next_round_ = 0;
};

/// Confidence request plus one automatic re-ask when the reply carries no
/// usable score. Appends the exchanged rounds to the runner and `history`.
std::optional<int> elicit_confidence(RoundRunner& runner,
                                     std::vector<ChatMessage>& history);

/// Sets status to complete or parse-empty from the last solution-bearing
/// round.
void finalize_status(Transcript& transcript);

/// Marks the transcript endpoint-failed and pins the failure in the journal
/// so resumes do not retry it.
void mark_endpoint_failed(Transcript& transcript, const std::string& what,
                          Journal* journal);

/// answer -> confidence (one automatic re-ask) -> optional recheck ->
/// optional explore (with confidence re-elicited). Endpoint failures yield
/// an endpoint-failed transcript, never an exception.
Transcript run_instance(ChatClient& client, const BenchmarkItem& item,
                        const RunConfig& config, const PromptLibrary& prompts,
                        Journal* journal, const std::string& key);

std::vector<Transcript> load_transcripts(const std::string& path);

struct RunTotals {
  std::size_t complete = 0;
  std::size_t parse_empty = 0;
  std::size_t endpoint_failed = 0;
  std::vector<std::string> sub_runs;  // temperature sweep leaf directories
};

/// Executes the full corpus under config.parallelism into `out_dir`:
/// run.json, journal.log, transcripts.jsonl (ordered by item), plus
/// aggregates.jsonl for self-consistency strategies and a run.complete
/// marker. Safe to re-invoke: a completed directory is left untouched and
/// an interrupted one resumes from its journal.
RunTotals run_benchmark(ChatClient& client, const Corpus& corpus,
                        const RunConfig& config, const std::string& out_dir,
                        const std::string& corpus_digest);

}  // namespace musobench
