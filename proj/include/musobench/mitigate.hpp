#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "musobench/harness.hpp"

namespace musobench {

struct PathResult {
  SolutionSet set;
  std::optional<int> confidence;  // 0-100 scale
};

/// Outcome of combining n reasoning paths. `final_confidence` is a fraction
/// in [0, 1]; per-path confidences stay on the elicited 0-100 scale.
struct AggregatedResult {
  Strategy strategy = Strategy::ScVote;
  SolutionSet final_set;
  std::optional<double> final_confidence;
  std::vector<PathResult> paths;  // the surviving (effective) paths
  std::vector<double> supports;   // voting: aligned with final_set order
  std::optional<std::size_t> chosen_path;  // median-conf: index into paths
  std::vector<std::string> diagnostics;
};

/// Pure aggregation over already-collected paths, replayable from
/// transcripts. ScMedian picks the path holding the lower-median confidence
/// (paths without a confidence are not eligible); ScVote unions all answers,
/// weights each by support = occurrence / n_effective, and averages the
/// supporting paths' confidences by those weights. Throws DataError on an
/// empty path list.
AggregatedResult aggregate_paths(Strategy strategy,
                                 const std::vector<PathResult>& paths);

/// One aggregates.jsonl line: the per-item result, or the reason there is
/// none (all paths endpoint-failed).
struct ItemAggregate {
  std::string item_id;
  TaskKind task = TaskKind::SubsetSum;
  int n_requested = 0;
  int n_effective = 0;
  std::optional<AggregatedResult> result;
  std::vector<std::string> diagnostics;
};

nlohmann::json to_json(const ItemAggregate& agg);
ItemAggregate aggregate_from_json(const nlohmann::json& j);
std::vector<ItemAggregate> load_aggregates(const std::string& path);

/// Appends the exploration cue round to an in-flight conversation, then
/// re-elicits confidence. `current` is updated to the post-cue solution set.
void extend_with_explore(RoundRunner& runner, const BenchmarkItem& item,
                         std::vector<ChatMessage>& history,
                         SolutionSet& current);

/// Standalone form: extends a finished transcript (answer + confidence
/// rounds already present) with the exploration cue, re-querying through
/// `client` under the same journal key.
Transcript sequential_explore(ChatClient& client, const BenchmarkItem& item,
                              const RunConfig& config,
                              const PromptLibrary& prompts, Journal* journal,
                              Transcript transcript);

/// Runs config.n_paths fresh answer+confidence conversations and aggregates
/// them under config.strategy (ScMedian or ScVote). Endpoint-failed paths
/// are dropped; when every path fails the aggregate carries no result. The
/// per-path transcripts (keys "<item>#p<i>") are appended to
/// `transcripts_out` when given.
ItemAggregate self_consistency(ChatClient& client, const BenchmarkItem& item,
                               const RunConfig& config,
                               const PromptLibrary& prompts, Journal* journal,
                               std::vector<Transcript>* transcripts_out);

/// For each budget b in config.checkpoints: request a reasoning trace capped
/// at b tokens, close it with the think terminator, ask for the final answer
/// as a continuation of that prefix, then elicit confidence. Requires
/// config.supports_continuation (validated). Keys are "<item>#c<index>".
std::vector<std::pair<long, Transcript>> reflection_budget(
    ChatClient& client, const BenchmarkItem& item, const RunConfig& config,
    const PromptLibrary& prompts, Journal* journal);

}  // namespace musobench
