#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "musobench/client.hpp"
#include "musobench/corpus.hpp"
#include "musobench/harness.hpp"
#include "musobench/oracle.hpp"
#include "musobench/report.hpp"
#include "musobench/selftest.hpp"
#include "musobench/serialize.hpp"

namespace mb = musobench;
namespace fs = std::filesystem;

namespace {

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    try {
      out.push_back(std::stol(tok));
    } catch (const std::exception&) {
      throw mb::ConfigError("bad integer list entry '" + tok + "'");
    }
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

int run_gen(const std::string& task, const std::string& config_path,
            std::uint64_t seed, int parallelism, const std::string& out) {
  mb::BuildConfig config;
  if (!config_path.empty()) {
    try {
      config = mb::build_config_from_json(
          mb::parse_json(mb::read_file(config_path), "gen config"));
    } catch (const mb::DataError& e) {
      throw mb::ConfigError(e.what());
    }
  }
  config.task = mb::task_kind_from_string(task);
  if (parallelism > 0) config.parallelism = parallelism;
  const mb::Corpus corpus = mb::build_benchmark(config, seed);
  mb::save_corpus(corpus, out);
  std::cout << "wrote " << corpus.items.size() << " items ("
            << corpus.config.strata.bands.size() << " levels x "
            << config.quota << ") to " << out << "\n";
  return 0;
}

int run_solve(const std::string& in, bool check_brute_force) {
  const mb::Corpus corpus = mb::load_corpus(in);
  for (const auto& item : corpus.items) {
    if (mb::solve(item).solutions != item.ground_truth)
      throw mb::DataError("stored ground truth for " + item.item_id +
                          " does not match the solver");
    if (check_brute_force && mb::brute_force(item) != item.ground_truth)
      throw mb::DataError("stored ground truth for " + item.item_id +
                          " does not match the exhaustive scan");
  }
  std::cout << "verified " << corpus.items.size() << " items against the solver"
            << (check_brute_force ? " and the exhaustive scan" : "") << "\n";
  return 0;
}

int run_run(const std::string& corpus_path, const std::string& config_path,
            const std::string& out_dir, const std::string& mock_path,
            const std::string& strategy, int n_paths,
            const std::string& checkpoints, bool seed_set, std::uint64_t seed,
            int parallelism) {
  mb::RunConfig config = mb::load_run_config(config_path);
  if (!strategy.empty()) config.strategy = mb::strategy_from_string(strategy);
  if (n_paths > 0) config.n_paths = n_paths;
  if (!checkpoints.empty()) config.checkpoints = parse_long_list(checkpoints);
  if (seed_set) config.run_seed = seed;
  if (parallelism > 0) config.parallelism = parallelism;
  mb::validate(config);

  const mb::Corpus corpus = mb::load_corpus(corpus_path);
  const std::string digest = mb::corpus_file_digest(corpus_path);

  std::unique_ptr<mb::ChatClient> client;
  if (!mock_path.empty()) {
    client = std::make_unique<mb::ScriptedClient>(
        mb::load_mock_script(mock_path), corpus);
  } else if (config.endpoint.empty()) {
    throw mb::ConfigError(
        "no endpoint configured: set \"endpoint\" in the run config or pass "
        "--mock <script>");
  } else {
    mb::HttpClientConfig http;
    http.base_url = config.endpoint;
    http.model = config.model;
    http.api_key_env = config.api_key_env;
    http.timeout_seconds = config.timeout_seconds;
    http.max_retries = config.max_retries;
    http.retry_backoff_ms = config.retry_backoff_ms;
    client = std::make_unique<mb::HttpChatClient>(http);
  }

  const mb::RunTotals totals =
      mb::run_benchmark(*client, corpus, config, out_dir, digest);
  std::cout << totals.complete << " complete, " << totals.parse_empty
            << " empty-answer, " << totals.endpoint_failed
            << " endpoint-failed";
  if (!totals.sub_runs.empty()) {
    std::cout << " across " << totals.sub_runs.size() << " sub-runs";
  }
  std::cout << "; run directory " << out_dir << "\n";
  return 0;
}

int run_score(const std::string& run_dir, const std::string& corpus_path,
              const std::string& out_dir) {
  const mb::Corpus corpus = mb::load_corpus(corpus_path);
  const mb::ScoredRun scored =
      mb::score_run(run_dir, corpus, mb::corpus_file_digest(corpus_path));
  mb::write_score_report(scored, out_dir);
  std::cout << "scored " << scored.summary.units_scored << "/"
            << scored.summary.units_total << " units; macro recall "
            << scored.summary.macro_recall << "; reports in " << out_dir
            << "\n";
  return 0;
}

int run_report(const std::string& runs, bool paired,
               const std::string& out_dir) {
  std::vector<mb::ScoredRun> scored;
  for (const std::string& entry : split_list(runs)) {
    const fs::path p(entry);
    const fs::path file = fs::is_directory(p) ? p / "scores.json" : p;
    scored.push_back(mb::load_scored_run(file.string()));
  }
  if (paired) {
    if (scored.size() != 2)
      throw mb::ConfigError("--paired needs exactly two runs, got " +
                            std::to_string(scored.size()));
    mb::write_movement_report(scored[0], scored[1], out_dir);
    std::cout << "wrote paired movement report to " << out_dir << "\n";
  } else {
    if (scored.empty()) throw mb::ConfigError("--runs list is empty");
    mb::write_temperature_report(scored, out_dir);
    std::cout << "wrote comparison report for " << scored.size()
              << " runs to " << out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-solution benchmark toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int parallelism = 0;
  std::string mock_path;
  auto* seed_opt = app.add_option("--seed", seed, "root seed");
  app.add_option("--parallelism", parallelism, "worker threads");
  app.add_option("--mock", mock_path,
                 "scripted endpoint file, replaces the live endpoint");

  auto* gen = app.add_subcommand("gen", "generate a stratified corpus");
  std::string gen_task, gen_config, gen_out;
  gen->add_option("--task", gen_task, "timetabling or subsetsum")
      ->required()
      ->check(CLI::IsMember({"timetabling", "subsetsum"}));
  gen->add_option("--config", gen_config, "generation config JSON");
  gen->add_option("--out", gen_out, "corpus output file")->required();
  gen->fallthrough();

  auto* solve = app.add_subcommand("solve", "re-verify stored ground truth");
  std::string solve_in;
  bool solve_bf = false;
  solve->add_option("--in", solve_in, "corpus file")->required();
  solve->add_flag("--check-brute-force", solve_bf,
                  "also compare against the exhaustive scan");
  solve->fallthrough();

  auto* run = app.add_subcommand("run", "query an endpoint over a corpus");
  std::string run_corpus, run_config, run_out, run_strategy, run_checkpoints;
  int run_n = 0;
  run->add_option("--corpus", run_corpus, "corpus file")->required();
  run->add_option("--config", run_config, "run config JSON")->required();
  run->add_option("--out", run_out, "run directory")->required();
  run->add_option("--strategy", run_strategy, "override the config strategy")
      ->check(CLI::IsMember(
          {"none", "explore", "sc-median", "sc-vote", "reflect"}));
  run->add_option("--n", run_n, "reasoning paths for sc strategies");
  run->add_option("--checkpoints", run_checkpoints,
                  "comma-separated token budgets for reflect");
  run->fallthrough();

  auto* score = app.add_subcommand("score", "score a finished run");
  std::string score_run_dir, score_corpus, score_out;
  score->add_option("--run", score_run_dir, "run directory")->required();
  score->add_option("--corpus", score_corpus, "corpus file")->required();
  score->add_option("--out", score_out, "report directory")->required();
  score->fallthrough();

  auto* report = app.add_subcommand("report", "compare scored runs");
  std::string report_runs, report_out;
  bool report_paired = false;
  report->add_option("--runs", report_runs,
                     "comma-separated score directories or scores.json files")
      ->required();
  report->add_flag("--paired", report_paired,
                   "per-item movement between exactly two runs");
  report->add_option("--out", report_out, "report directory")->required();
  report->fallthrough();

  auto* selftest =
      app.add_subcommand("selftest", "run the built-in verification battery");
  selftest->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(gen))
      return run_gen(gen_task, gen_config, seed, parallelism, gen_out);
    if (app.got_subcommand(solve)) return run_solve(solve_in, solve_bf);
    if (app.got_subcommand(run))
      return run_run(run_corpus, run_config, run_out, mock_path, run_strategy,
                     run_n, run_checkpoints, seed_opt->count() > 0, seed,
                     parallelism);
    if (app.got_subcommand(score))
      return run_score(score_run_dir, score_corpus, score_out);
    if (app.got_subcommand(report))
      return run_report(report_runs, report_paired, report_out);
    if (app.got_subcommand(selftest))
      return mb::run_selftest(std::cout) == 0 ? 0 : 2;
  } catch (const mb::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mb::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mb::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mb::EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
