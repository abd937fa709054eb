#include "musobench/mitigate.hpp"

#include <algorithm>
#include <sstream>

#include "musobench/serialize.hpp"

namespace musobench {

namespace {

bool contains(const SolutionSet& set, const ScheduleSolution& sol) {
  return std::binary_search(set.schedules.begin(), set.schedules.end(), sol);
}

bool contains(const SolutionSet& set, const SubsetSolution& sol) {
  return std::binary_search(set.subsets.begin(), set.subsets.end(), sol);
}

/// Support and weighted-confidence tally for one union member across paths.
template <typename Solution>
void vote_one(const Solution& answer, const std::vector<PathResult>& paths,
              AggregatedResult& out, double& numerator, double& denominator) {
  int count = 0;
  double conf_sum = 0;
  int conf_n = 0;
  for (const auto& path : paths) {
    if (!contains(path.set, answer)) continue;
    ++count;
    if (path.confidence) {
      conf_sum += *path.confidence;
      ++conf_n;
    }
  }
  const double support =
      static_cast<double>(count) / static_cast<double>(paths.size());
  out.supports.push_back(support);
  if (conf_n > 0) {
    numerator += support * (conf_sum / conf_n);
    denominator += support;
  }
}

}  // namespace

AggregatedResult aggregate_paths(Strategy strategy,
                                 const std::vector<PathResult>& paths) {
  if (paths.empty())
    throw DataError("aggregation needs at least one effective path");
  if (strategy != Strategy::ScMedian && strategy != Strategy::ScVote)
    throw ConfigError("aggregate_paths handles sc-median and sc-vote only");

  AggregatedResult out;
  out.strategy = strategy;
  out.paths = paths;
  const TaskKind kind = paths.front().set.kind;
  for (const auto& path : paths)
    if (path.set.kind != kind)
      throw DataError("aggregation paths mix task kinds");

  if (strategy == Strategy::ScMedian) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < paths.size(); ++i)
      if (paths[i].confidence) eligible.push_back(i);
    if (eligible.empty()) {
      out.chosen_path = 0;
      out.final_set = paths.front().set;
      out.diagnostics.push_back(
          "no path reported confidence; kept the first path");
      return out;
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [&](std::size_t a, std::size_t b) {
                       return *paths[a].confidence < *paths[b].confidence;
                     });
    const std::size_t chosen = eligible[(eligible.size() - 1) / 2];
    out.chosen_path = chosen;
    out.final_set = paths[chosen].set;
    out.final_confidence = *paths[chosen].confidence / 100.0;
    if (eligible.size() < paths.size())
      out.diagnostics.push_back(
          "paths without a confidence were not eligible for median selection");
    return out;
  }

  SolutionSet all = SolutionSet::empty(kind);
  for (const auto& path : paths) all = set_union(all, path.set);
  out.final_set = all;

  double numerator = 0;
  double denominator = 0;
  if (kind == TaskKind::TimeTabling) {
    for (const auto& answer : all.schedules)
      vote_one(answer, paths, out, numerator, denominator);
  } else {
    for (const auto& answer : all.subsets)
      vote_one(answer, paths, out, numerator, denominator);
  }

  if (denominator > 0) {
    out.final_confidence = (numerator / denominator) / 100.0;
  } else {
    double sum = 0;
    int with_confidence = 0;
    for (const auto& path : paths)
      if (path.confidence) {
        sum += *path.confidence;
        ++with_confidence;
      }
    if (with_confidence > 0) {
      out.final_confidence = (sum / with_confidence) / 100.0;
      out.diagnostics.push_back(
          "no union member had confidence support; used the plain path mean");
    } else {
      out.diagnostics.push_back("no path reported confidence");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const ItemAggregate& agg) {
  json j;
  j["item_id"] = agg.item_id;
  j["task"] = to_string(agg.task);
  j["n_requested"] = agg.n_requested;
  j["n_effective"] = agg.n_effective;
  if (!agg.diagnostics.empty()) j["diagnostics"] = agg.diagnostics;
  if (agg.result) {
    const AggregatedResult& r = *agg.result;
    j["strategy"] = to_string(r.strategy);
    j["final_set"] = to_json(r.final_set);
    if (r.final_confidence) j["final_confidence"] = *r.final_confidence;
    if (!r.supports.empty()) j["supports"] = r.supports;
    if (r.chosen_path) j["chosen_path"] = *r.chosen_path;
    auto& paths = j["paths"] = json::array();
    for (const auto& p : r.paths) {
      json pj;
      pj["set"] = to_json(p.set);
      if (p.confidence) pj["confidence"] = *p.confidence;
      paths.push_back(std::move(pj));
    }
    if (!r.diagnostics.empty()) j["result_diagnostics"] = r.diagnostics;
  }
  return j;
}

ItemAggregate aggregate_from_json(const json& j) {
  ItemAggregate agg;
  agg.item_id = j.at("item_id").get<std::string>();
  agg.task = task_kind_from_string(j.at("task").get<std::string>());
  agg.n_requested = j.at("n_requested").get<int>();
  agg.n_effective = j.at("n_effective").get<int>();
  if (j.contains("diagnostics"))
    agg.diagnostics = j["diagnostics"].get<std::vector<std::string>>();
  if (j.contains("strategy")) {
    AggregatedResult r;
    r.strategy = strategy_from_string(j["strategy"].get<std::string>());
    r.final_set = solution_set_from_json(agg.task, j.at("final_set"));
    if (j.contains("final_confidence"))
      r.final_confidence = j["final_confidence"].get<double>();
    if (j.contains("supports"))
      r.supports = j["supports"].get<std::vector<double>>();
    if (j.contains("chosen_path"))
      r.chosen_path = j["chosen_path"].get<std::size_t>();
    for (const auto& pj : j.at("paths")) {
      PathResult p;
      p.set = solution_set_from_json(agg.task, pj.at("set"));
      if (pj.contains("confidence")) p.confidence = pj["confidence"].get<int>();
      r.paths.push_back(std::move(p));
    }
    if (j.contains("result_diagnostics"))
      r.diagnostics = j["result_diagnostics"].get<std::vector<std::string>>();
    agg.result = std::move(r);
  }
  return agg;
}

std::vector<ItemAggregate> load_aggregates(const std::string& path) {
  const std::string bytes = read_file(path);
  std::vector<ItemAggregate> out;
  std::istringstream lines(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(aggregate_from_json(
        parse_json(line, path + ":" + std::to_string(line_no))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strategies

void extend_with_explore(RoundRunner& runner, const BenchmarkItem& item,
                         std::vector<ChatMessage>& history,
                         SolutionSet& current) {
  history.push_back({"user", build_explore_prompt(runner.prompts())});
  const std::string reply = runner.ask("explore", history);
  ParseOutcome outcome = parse_recheck(reply, current, item.task_kind);
  runner.last().solutions = outcome.solutions;
  runner.last().change = outcome.change;
  runner.last().diagnostics = std::move(outcome.diagnostics);
  history.push_back({"assistant", reply});
  current = *runner.last().solutions;
  elicit_confidence(runner, history);
}

Transcript sequential_explore(ChatClient& client, const BenchmarkItem& item,
                              const RunConfig& config,
                              const PromptLibrary& prompts, Journal* journal,
                              Transcript transcript) {
  if (transcript.status == "endpoint-failed") return transcript;
  if (transcript.rounds.empty())
    throw DataError("cannot extend a transcript with no rounds");

  std::vector<ChatMessage> history = transcript.rounds.back().request;
  history.push_back({"assistant", transcript.rounds.back().response});
  SolutionSet current = SolutionSet::empty(item.task_kind);
  for (const auto& r : transcript.rounds)
    if (r.solutions) current = *r.solutions;

  RoundRunner runner(client, config, prompts, journal, std::move(transcript));
  try {
    extend_with_explore(runner, item, history, current);
    finalize_status(runner.transcript());
  } catch (const EndpointError& e) {
    mark_endpoint_failed(runner.transcript(), e.what(), journal);
  }
  return std::move(runner.transcript());
}

ItemAggregate self_consistency(ChatClient& client, const BenchmarkItem& item,
                               const RunConfig& config,
                               const PromptLibrary& prompts, Journal* journal,
                               std::vector<Transcript>* transcripts_out) {
  if (config.strategy != Strategy::ScMedian &&
      config.strategy != Strategy::ScVote)
    throw ConfigError("self_consistency needs strategy sc-median or sc-vote");

  ItemAggregate agg;
  agg.item_id = item.item_id;
  agg.task = item.task_kind;
  agg.n_requested = config.n_paths;

  std::vector<PathResult> effective;
  for (int p = 0; p < config.n_paths; ++p) {
    RoundRunner runner(client, config, prompts, journal,
                       item.item_id + "#p" + std::to_string(p));
    runner.transcript().item_id = item.item_id;
    runner.transcript().task = item.task_kind;
    try {
      std::vector<ChatMessage> history;
      history.push_back(
          {"user", build_answer_prompt(item, config.paradigm, prompts)});
      const std::string reply = runner.ask("answer", history);
      ParseOutcome outcome = parse_solutions(reply, item.task_kind);
      runner.last().solutions = outcome.solutions;
      runner.last().diagnostics = std::move(outcome.diagnostics);
      history.push_back({"assistant", reply});

      const auto confidence = elicit_confidence(runner, history);
      finalize_status(runner.transcript());
      effective.push_back({std::move(outcome.solutions), confidence});
    } catch (const EndpointError& e) {
      mark_endpoint_failed(runner.transcript(), e.what(), journal);
      agg.diagnostics.push_back("path " + std::to_string(p) +
                                " endpoint-failed; dropped");
    }
    if (transcripts_out)
      transcripts_out->push_back(std::move(runner.transcript()));
  }

  agg.n_effective = static_cast<int>(effective.size());
  if (effective.empty())
    agg.diagnostics.push_back("all paths endpoint-failed; no aggregate");
  else
    agg.result = aggregate_paths(config.strategy, effective);
  return agg;
}

std::vector<std::pair<long, Transcript>> reflection_budget(
    ChatClient& client, const BenchmarkItem& item, const RunConfig& config,
    const PromptLibrary& prompts, Journal* journal) {
  if (!config.supports_continuation)
    throw UnsupportedEndpoint(
        "reflection budgets need an endpoint that supports assistant-message "
        "continuation");
  if (config.checkpoints.empty())
    throw ConfigError("reflection budgets need at least one checkpoint");

  std::vector<std::pair<long, Transcript>> out;
  for (std::size_t ci = 0; ci < config.checkpoints.size(); ++ci) {
    const long budget = config.checkpoints[ci];
    RoundRunner runner(client, config, prompts, journal,
                       item.item_id + "#c" + std::to_string(ci));
    runner.transcript().item_id = item.item_id;
    runner.transcript().task = item.task_kind;
    try {
      std::vector<ChatMessage> history;
      history.push_back(
          {"user", build_answer_prompt(item, config.paradigm, prompts)});
      const std::string trace = runner.ask("trace", history, budget);

      std::string prefix;
      const auto close = trace.find("</think>");
      if (close != std::string::npos)
        prefix = trace.substr(0, close + 8);
      else if (trace.empty())
        prefix = "</think>";
      else
        prefix = trace + "\n</think>";

      history.push_back({"assistant", prefix});
      const std::string reply = runner.ask("final", history);
      ParseOutcome outcome = parse_solutions(reply, item.task_kind);
      runner.last().solutions = outcome.solutions;
      runner.last().diagnostics = std::move(outcome.diagnostics);
      history.back().content = prefix + "\n" + reply;

      elicit_confidence(runner, history);
      finalize_status(runner.transcript());
    } catch (const EndpointError& e) {
      mark_endpoint_failed(runner.transcript(), e.what(), journal);
    }
    out.emplace_back(budget, std::move(runner.transcript()));
  }
  return out;
}

}  // namespace musobench
