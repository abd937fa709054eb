#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "musobench/client.hpp"
#include "musobench/harness.hpp"
#include "musobench/serialize.hpp"

using namespace musobench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("musobench_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Corpus small_corpus(int quota = 2) {
  BuildConfig config;
  config.task = TaskKind::SubsetSum;
  config.strata = StrataConfig{{{0, 4, 8}}};
  config.quota = quota;
  return build_benchmark(config, 7);
}

RunConfig mock_config() {
  RunConfig config;
  config.model = "mock";
  config.temperature = 0.2;
  return config;
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (Strategy s : {Strategy::None, Strategy::Explore, Strategy::ScMedian,
                     Strategy::ScVote, Strategy::Reflect})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK(to_string(Strategy::ScMedian) == "sc-median");
  CHECK_THROWS_AS(strategy_from_string("prayer"), ConfigError);
}

TEST_CASE("run config validation") {
  RunConfig config = mock_config();
  CHECK_NOTHROW(validate(config));

  config.temperature = -0.1;
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = mock_config();
  config.parallelism = 0;
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = mock_config();
  config.strategy = Strategy::Reflect;
  config.checkpoints = {0, 4};
  CHECK_THROWS_AS(validate(config), UnsupportedEndpoint);
  config.supports_continuation = true;
  CHECK_NOTHROW(validate(config));
  config.checkpoints.clear();
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = mock_config();
  config.n_paths = 0;
  CHECK_THROWS_AS(validate(config), ConfigError);
}

TEST_CASE("run config JSON round-trip") {
  RunConfig config = mock_config();
  config.endpoint = "http://127.0.0.1:9";
  config.api_key_env = "SOME_KEY";
  config.paradigm = Paradigm::LongCoT;
  config.rounds.recheck = true;
  config.strategy = Strategy::ScVote;
  config.n_paths = 4;
  config.temperatures = {0.0, 0.7};
  config.run_seed = 11;
  CHECK(run_config_from_json(to_json(config)) == config);

  json j = to_json(config);
  j["schema"] = "musobench.runconfig/9";
  CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
}

TEST_CASE("transcript JSON round-trip") {
  Transcript t;
  t.key = "item-3";
  t.item_id = "item-3";
  t.task = TaskKind::SubsetSum;
  t.status = "complete";
  RoundRecord r;
  r.kind = "answer";
  r.request = {{"user", "question"}};
  r.response = "Solution 1: {1, 2}";
  SolutionSet set = SolutionSet::empty(TaskKind::SubsetSum);
  set.add(SubsetSolution{{1, 2}});
  r.solutions = set;
  r.usage = TokenUsage{10, 5};
  t.rounds.push_back(r);
  RoundRecord c;
  c.kind = "confidence";
  c.response = "[[CONFIDENCE: \\boxed{70}]]";
  c.confidence = 70;
  t.rounds.push_back(c);

  const Transcript back = transcript_from_json(to_json(t));
  CHECK(to_json(back) == to_json(t));
  CHECK(back.rounds.size() == 2);
  CHECK(back.rounds[0].solutions == set);
  CHECK(back.rounds[0].usage->completion_tokens == 5);
  CHECK(*back.rounds[1].confidence == 70);
}

TEST_CASE("journal lookup, failure pinning, and torn tails") {
  const fs::path dir = temp_dir("journal");
  const std::string path = (dir / "journal.log").string();
  {
    Journal journal(path);
    journal.record("a", 0, "answer", {"reply zero", TokenUsage{3, 4}, 1.5});
    journal.record("a", 1, "confidence", {"reply one", std::nullopt, {}});
    journal.record_failure("b", "gave up");
  }
  std::ofstream(path, std::ios::app) << "{\"key\": \"c\", \"round";  // torn
  {
    Journal journal(path);
    const auto hit = journal.lookup("a", 0);
    REQUIRE(hit.has_value());
    CHECK(hit->response == "reply zero");
    CHECK(hit->usage->prompt_tokens == 3);
    CHECK(*hit->latency_ms == 1.5);
    CHECK(journal.lookup("a", 2) == std::nullopt);
    REQUIRE(journal.failure("b").has_value());
    CHECK(*journal.failure("b") == "gave up");
    CHECK_FALSE(journal.failure("a").has_value());
    journal.record("c", 0, "answer", {"fresh", std::nullopt, {}});
  }
  Journal reopened(path);
  CHECK(reopened.lookup("c", 0)->response == "fresh");
}

TEST_CASE("run_instance produces the planned rounds") {
  const Corpus corpus = small_corpus();
  const BenchmarkItem& item = corpus.items[0];
  ScriptedClient client(MockScript{}, corpus);

  RunConfig config = mock_config();
  const Transcript plain = run_instance(client, item, config,
                                        builtin_prompts(), nullptr, "k0");
  CHECK(plain.status == "complete");
  REQUIRE(plain.rounds.size() == 2);
  CHECK(plain.rounds[0].kind == "answer");
  CHECK(plain.rounds[1].kind == "confidence");
  CHECK(plain.rounds[0].solutions == item.ground_truth);
  CHECK(*plain.rounds[1].confidence == 95);

  config.rounds.recheck = true;
  const Transcript rechecked = run_instance(client, item, config,
                                            builtin_prompts(), nullptr, "k1");
  REQUIRE(rechecked.rounds.size() == 3);
  CHECK(rechecked.rounds[2].kind == "recheck");
  CHECK(rechecked.rounds[2].change == ChangeFlag::Unchange);
  CHECK(rechecked.rounds[2].solutions == item.ground_truth);
}

TEST_CASE("missing confidence is re-asked once then recorded missing") {
  const Corpus corpus = small_corpus();
  const BenchmarkItem& item = corpus.items[0];

  MockScript script;
  script.omit_confidence_times = 1;
  ScriptedClient once(script, corpus);
  const Transcript recovered = run_instance(once, item, mock_config(),
                                            builtin_prompts(), nullptr, "k");
  REQUIRE(recovered.rounds.size() == 3);
  CHECK(recovered.rounds[1].kind == "confidence");
  CHECK_FALSE(recovered.rounds[1].confidence.has_value());
  CHECK(*recovered.rounds[2].confidence == 95);

  script.omit_confidence_times = 2;
  ScriptedClient never(script, corpus);
  const Transcript missing = run_instance(never, item, mock_config(),
                                          builtin_prompts(), nullptr, "k");
  REQUIRE(missing.rounds.size() == 3);
  CHECK_FALSE(missing.rounds[2].confidence.has_value());
  CHECK(missing.status == "complete");
}

TEST_CASE("unparseable answers finish as parse-empty") {
  const Corpus corpus = small_corpus();
  const BenchmarkItem& item = corpus.items[0];

  MockScript script;
  script.behavior = "verbatim";
  VerbatimReplies replies;
  replies.by_round["answer"] = {"I refuse to enumerate."};
  replies.by_round["confidence"] = {"[[CONFIDENCE: \\boxed{99}]]"};
  script.verbatim["*"] = replies;
  ScriptedClient client(script, corpus);

  const Transcript t = run_instance(client, item, mock_config(),
                                    builtin_prompts(), nullptr, "k");
  CHECK(t.status == "parse-empty");
  CHECK(t.rounds[0].solutions->size() == 0);
}

TEST_CASE("run_benchmark writes a complete, byte-stable run directory") {
  const Corpus corpus = small_corpus(3);
  const fs::path dir = temp_dir("run_stable");

  RunConfig config = mock_config();
  config.parallelism = 3;
  config.rounds.recheck = true;

  MockScript script;
  script.recall_fraction = 0.5;
  ScriptedClient client(script, corpus);
  const RunTotals totals =
      run_benchmark(client, corpus, config, (dir / "a").string(), "digest-1");
  CHECK(totals.complete == corpus.items.size());
  CHECK(totals.endpoint_failed == 0);

  CHECK(fs::exists(dir / "a" / "run.json"));
  CHECK(fs::exists(dir / "a" / "transcripts.jsonl"));
  CHECK(fs::exists(dir / "a" / "journal.log"));
  CHECK(fs::exists(dir / "a" / "run.complete"));

  ScriptedClient fresh(script, corpus);
  run_benchmark(fresh, corpus, config, (dir / "b").string(), "digest-1");
  CHECK(slurp(dir / "a" / "transcripts.jsonl") ==
        slurp(dir / "b" / "transcripts.jsonl"));
  CHECK(slurp(dir / "a" / "run.json") == slurp(dir / "b" / "run.json"));

  const auto transcripts =
      load_transcripts((dir / "a" / "transcripts.jsonl").string());
  REQUIRE(transcripts.size() == corpus.items.size());
  for (std::size_t i = 0; i < transcripts.size(); ++i)
    CHECK(transcripts[i].item_id == corpus.items[i].item_id);

  const json meta = parse_json(slurp(dir / "a" / "run.json"), "run meta");
  CHECK(meta["schema"] == "musobench.run/1");
  CHECK(meta["corpus_digest"] == "digest-1");
  CHECK_FALSE(meta.contains("timestamp"));
}

TEST_CASE("a completed run directory is not re-queried") {
  const Corpus corpus = small_corpus();
  const fs::path dir = temp_dir("run_done");
  const RunConfig config = mock_config();

  MockScript script;
  script.rotate_paths = true;  // replies would differ if asked again
  ScriptedClient client(script, corpus);
  run_benchmark(client, corpus, config, dir.string(), "d");
  const std::string first = slurp(dir / "transcripts.jsonl");

  run_benchmark(client, corpus, config, dir.string(), "d");
  CHECK(slurp(dir / "transcripts.jsonl") == first);
}

TEST_CASE("an interrupted run resumes from its journal without re-asking") {
  const Corpus corpus = small_corpus(3);
  const fs::path dir = temp_dir("run_resume");
  const RunConfig config = mock_config();

  MockScript script;
  script.rotate_paths = true;
  ScriptedClient client(script, corpus);
  run_benchmark(client, corpus, config, dir.string(), "d");
  const std::string finished = slurp(dir / "transcripts.jsonl");

  // Simulate a crash after the journal was written but before the
  // transcript file landed.
  fs::remove(dir / "transcripts.jsonl");
  fs::remove(dir / "run.complete");

  ScriptedClient other(script, corpus);  // different call counters
  run_benchmark(other, corpus, config, dir.string(), "d");
  CHECK(slurp(dir / "transcripts.jsonl") == finished);
}

TEST_CASE("a run directory refuses a different config or corpus") {
  const Corpus corpus = small_corpus();
  const fs::path dir = temp_dir("run_drift");
  ScriptedClient client(MockScript{}, corpus);
  run_benchmark(client, corpus, mock_config(), dir.string(), "d");

  RunConfig other = mock_config();
  other.temperature = 0.9;
  CHECK_THROWS_AS(run_benchmark(client, corpus, other, dir.string(), "d"),
                  ConfigError);
  CHECK_THROWS_AS(
      run_benchmark(client, corpus, mock_config(), dir.string(), "other"),
      ConfigError);
}

TEST_CASE("endpoint failures land in totals, not exceptions") {
  const Corpus corpus = small_corpus();
  const fs::path dir = temp_dir("run_fail");

  auto inner = std::make_shared<ScriptedClient>(MockScript{}, corpus);
  MockServerFaults faults;
  faults.fail_first = 100000;
  MockServer server(inner, faults);

  RunConfig config = mock_config();
  config.endpoint = server.base_url();
  config.max_retries = 0;
  config.retry_backoff_ms = 1;

  HttpClientConfig http;
  http.base_url = server.base_url();
  http.max_retries = 0;
  http.retry_backoff_ms = 1;
  HttpChatClient client(http);

  const RunTotals totals =
      run_benchmark(client, corpus, config, dir.string(), "d");
  CHECK(totals.endpoint_failed == corpus.items.size());
  CHECK(totals.complete == 0);

  const auto transcripts =
      load_transcripts((dir / "transcripts.jsonl").string());
  for (const auto& t : transcripts) {
    CHECK(t.status == "endpoint-failed");
    CHECK_FALSE(t.error.empty());
  }
}

TEST_CASE("temperature sweeps fan out into one sub-run per setting") {
  const Corpus corpus = small_corpus();
  const fs::path dir = temp_dir("run_sweep");

  RunConfig config = mock_config();
  config.temperatures = {0.0, 0.5};

  ScriptedClient client(MockScript{}, corpus);
  const RunTotals totals =
      run_benchmark(client, corpus, config, dir.string(), "d");
  CHECK(totals.sub_runs.size() == 2);
  CHECK(totals.complete == 2 * corpus.items.size());

  CHECK(fs::exists(dir / "t0.0" / "run.complete"));
  CHECK(fs::exists(dir / "t0.5" / "run.complete"));
  CHECK(fs::exists(dir / "run.json"));
  CHECK(fs::exists(dir / "run.complete"));

  const json leaf =
      parse_json(slurp(dir / "t0.5" / "run.json"), "leaf meta");
  CHECK(leaf["config"]["temperature"] == 0.5);
  CHECK(leaf["config"]["temperatures"] == json::array());
}
