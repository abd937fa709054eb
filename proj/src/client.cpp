#include "musobench/client.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "musobench/protocol.hpp"
#include "musobench/serialize.hpp"

namespace musobench {

namespace {

long count_tokens(const std::string& text) {
  long count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool ws = std::isspace(c);
    if (!ws && !in_token) ++count;
    in_token = !ws;
  }
  return count;
}

/// Cut after `limit` whitespace-delimited tokens, preserving the original
/// separators before the cut.
std::string truncate_tokens(const std::string& text, long limit) {
  if (limit <= 0) return "";
  long count = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool ws = std::isspace(static_cast<unsigned char>(text[i]));
    if (!ws && !in_token) {
      if (count == limit) return text.substr(0, i);
      ++count;
    }
    in_token = !ws;
  }
  return text;
}

long prompt_token_count(const std::vector<ChatMessage>& messages) {
  long total = 0;
  for (const auto& m : messages) total += count_tokens(m.content);
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// HttpChatClient

struct HttpChatClient::Impl {
  HttpClientConfig config;
  std::string api_key;
};

HttpChatClient::HttpChatClient(HttpClientConfig config)
    : impl_(std::make_unique<Impl>()) {
  if (config.base_url.empty()) throw ConfigError("endpoint base_url is empty");
  if (!config.api_key_env.empty()) {
    const char* value = std::getenv(config.api_key_env.c_str());
    if (!value)
      throw ConfigError("environment variable '" + config.api_key_env +
                        "' is not set (it should hold the API key)");
    impl_->api_key = value;
  }
  impl_->config = std::move(config);
}

HttpChatClient::~HttpChatClient() = default;

ChatResult HttpChatClient::complete(const std::vector<ChatMessage>& messages,
                                    const RequestOptions& options) {
  const HttpClientConfig& cfg = impl_->config;

  json body;
  body["model"] = cfg.model;
  body["temperature"] = options.temperature;
  body["max_completion_tokens"] = options.max_completion_tokens;
  auto& msgs = body["messages"] = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!impl_->api_key.empty())
    headers.emplace("Authorization", "Bearer " + impl_->api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long>(cfg.retry_backoff_ms) * attempt));

    // One client per request keeps complete() safe to call concurrently.
    httplib::Client cli(cfg.base_url);
    cli.set_connection_timeout(cfg.timeout_seconds, 0);
    cli.set_read_timeout(cfg.timeout_seconds, 0);
    cli.set_write_timeout(cfg.timeout_seconds, 0);

    const auto start = std::chrono::steady_clock::now();
    auto res = cli.Post(cfg.path, headers, payload, "application/json");
    const double latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  start)
            .count();

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw EndpointError("endpoint returned status " + std::to_string(res->status) +
                          ": " + res->body.substr(0, 200));

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception&) {
      last_error = "unparseable response body";
      continue;
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty() ||
        !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content") ||
        !reply["choices"][0]["message"]["content"].is_string()) {
      last_error = "response lacks choices[0].message.content";
      continue;
    }

    ChatResult result;
    result.content = reply["choices"][0]["message"]["content"].get<std::string>();
    result.latency_ms = latency_ms;
    if (reply.contains("usage") && reply["usage"].is_object()) {
      const auto& u = reply["usage"];
      TokenUsage usage;
      usage.prompt_tokens = u.value("prompt_tokens", 0L);
      usage.completion_tokens = u.value("completion_tokens", 0L);
      result.usage = usage;
    }
    return result;
  }
  throw EndpointError("endpoint failed after " +
                      std::to_string(cfg.max_retries + 1) + " attempts (" +
                      last_error + ")");
}

// ---------------------------------------------------------------------------
// Mock script

MockScript mock_script_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("mock script must be a JSON object");
  if (j.value("schema", "") != std::string("musobench.mock/1"))
    throw ConfigError("mock script schema must be \"musobench.mock/1\"");
  MockScript s;
  s.behavior = j.value("behavior", s.behavior);
  if (s.behavior != "truth_fraction" && s.behavior != "verbatim" &&
      s.behavior != "progressive_trace")
    throw ConfigError("unknown mock behavior '" + s.behavior + "'");
  s.recall_fraction = j.value("recall_fraction", s.recall_fraction);
  if (s.recall_fraction < 0.0 || s.recall_fraction > 1.0)
    throw ConfigError("recall_fraction must lie in [0, 1]");
  s.wrong_extra = j.value("wrong_extra", s.wrong_extra);
  if (s.wrong_extra < 0) throw ConfigError("wrong_extra must be >= 0");
  if (j.contains("confidence")) {
    if (j["confidence"].is_null())
      s.confidence.reset();
    else
      s.confidence = j["confidence"].get<int>();
  }
  s.omit_confidence_times = j.value("omit_confidence_times", 0);
  s.rotate_paths = j.value("rotate_paths", false);
  s.recheck_reply = j.value("recheck_reply", s.recheck_reply);
  if (s.recheck_reply != "unchange" && s.recheck_reply != "restate")
    throw ConfigError("recheck_reply must be \"unchange\" or \"restate\"");
  s.explore_add_count = j.value("explore_add_count", 0);
  if (j.contains("explore_confidence"))
    s.explore_confidence = j["explore_confidence"].get<int>();
  s.words_per_candidate = j.value("words_per_candidate", s.words_per_candidate);
  if (s.words_per_candidate < 3)
    throw ConfigError("words_per_candidate must be >= 3");
  if (j.contains("verbatim")) {
    for (const auto& [item_id, rounds] : j["verbatim"].items()) {
      VerbatimReplies replies;
      for (const auto& [round, list] : rounds.items()) {
        if (!list.is_array()) throw ConfigError("verbatim replies must be arrays");
        for (const auto& entry : list)
          replies.by_round[round].push_back(entry.get<std::string>());
      }
      s.verbatim[item_id] = std::move(replies);
    }
  }
  return s;
}

MockScript load_mock_script(const std::string& path) {
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
    throw ConfigError("mock script " + path + ": " + e.what());
  }
  return mock_script_from_json(j);
}

// ---------------------------------------------------------------------------
// ScriptedClient

namespace {

enum class RoundKind { Answer, Confidence, Recheck, Explore, Continuation };

std::string round_name(RoundKind k) {
  switch (k) {
    case RoundKind::Answer: return "answer";
    case RoundKind::Confidence: return "confidence";
    case RoundKind::Recheck: return "recheck";
    case RoundKind::Explore: return "explore";
    case RoundKind::Continuation: return "continuation";
  }
  return "answer";
}

}  // namespace

struct ScriptedClient::Impl {
  MockScript script;
  Corpus corpus;

  std::mutex mu;
  std::map<std::string, int> counters;          // "<item>#<kind>" -> arrivals
  std::map<std::string, SolutionSet> last_sets;  // item -> last answered set

  const BenchmarkItem* find_item(const std::vector<ChatMessage>& messages) const {
    for (const auto& m : messages) {
      if (m.role != "user") continue;
      for (const auto& item : corpus.items)
        if (m.content.find(item.question_text) != std::string::npos) return &item;
    }
    return nullptr;
  }

  static RoundKind classify(const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw EndpointError("mock received an empty conversation");
    if (messages.back().role == "assistant") return RoundKind::Continuation;
    const std::string& text = messages.back().content;
    if (text.find("rate your confidence") != std::string::npos)
      return RoundKind::Confidence;
    if (text.find("Recheck all your answers") != std::string::npos)
      return RoundKind::Recheck;
    if (text.find(builtin_prompts().explore) != std::string::npos)
      return RoundKind::Explore;
    return RoundKind::Answer;
  }

  int bump(const std::string& key) {
    return counters[key]++;  // returns the pre-increment arrival index
  }

  // Ground-truth window [offset, offset+k) mod |Y|, plus fabricated wrong
  // solutions that can never be valid for the instance.
  SolutionSet window_set(const BenchmarkItem& item, std::size_t offset,
                         std::size_t k, int wrong) const {
    const SolutionSet& truth = item.ground_truth;
    SolutionSet out = SolutionSet::empty(item.task_kind);
    const std::size_t total = truth.size();
    for (std::size_t i = 0; i < k && i < total; ++i) {
      const std::size_t idx = (offset + i) % total;
      if (item.task_kind == TaskKind::TimeTabling)
        out.schedules.push_back(truth.schedules[idx]);
      else
        out.subsets.push_back(truth.subsets[idx]);
    }
    for (int j = 0; j < wrong; ++j) {
      if (item.task_kind == TaskKind::TimeTabling) {
        const auto& inst = item.timetabling();
        ScheduleSolution bad;
        for (const auto& course : inst.courses)
          bad.entries.push_back({course.course_id, inst.num_times + j,
                                 course.allowed_rooms.front(), course.teacher});
        out.schedules.push_back(bad);
      } else {
        const auto& inst = item.subsetsum();
        const long long base =
            *std::max_element(inst.elements.begin(), inst.elements.end()) + 1;
        out.subsets.push_back({{base + j}});
      }
    }
    out.canonicalize();
    return out;
  }

  std::size_t answer_k(const BenchmarkItem& item) const {
    const auto total = static_cast<double>(item.ground_truth.size());
    const auto k = static_cast<long long>(std::llround(script.recall_fraction * total));
    return static_cast<std::size_t>(std::clamp<long long>(
        k, 0, static_cast<long long>(item.ground_truth.size())));
  }

  std::string confidence_reply(const BenchmarkItem& item,
                               const std::vector<ChatMessage>& messages) {
    const int seen = bump(item.item_id + "#confidence");
    if (seen < script.omit_confidence_times) return "I cannot say.";
    std::optional<int> value = script.confidence;
    if (script.explore_confidence) {
      for (const auto& m : messages)
        if (m.role == "user" &&
            m.content.find(builtin_prompts().explore) != std::string::npos) {
          value = script.explore_confidence;
          break;
        }
    }
    if (!value) return "I cannot say.";
    return "[[CONFIDENCE: \\boxed{" + std::to_string(*value) + "}]]";
  }

  std::string truth_fraction_reply(const BenchmarkItem& item, RoundKind kind,
                                   const std::vector<ChatMessage>& messages) {
    const std::size_t total = item.ground_truth.size();
    switch (kind) {
      case RoundKind::Answer: {
        const std::size_t k = answer_k(item);
        const int call = bump(item.item_id + "#answer");
        const std::size_t offset =
            script.rotate_paths && total > 0
                ? (static_cast<std::size_t>(call) * std::max<std::size_t>(k, 1)) % total
                : 0;
        SolutionSet set = window_set(item, offset, k, script.wrong_extra);
        last_sets[item.item_id] = set;
        return format_answer(set);
      }
      case RoundKind::Confidence:
        return confidence_reply(item, messages);
      case RoundKind::Recheck: {
        if (script.recheck_reply == "unchange") return "[[UNCHANGE]]";
        auto it = last_sets.find(item.item_id);
        const SolutionSet set = it != last_sets.end()
                                    ? it->second
                                    : window_set(item, 0, answer_k(item),
                                                 script.wrong_extra);
        return "[[CHANGE]]\n" + format_answer(set);
      }
      case RoundKind::Explore: {
        if (script.explore_add_count <= 0) return "[[UNCHANGE]]";
        const std::size_t k = answer_k(item);
        const std::size_t grown = std::min(
            total, k + static_cast<std::size_t>(script.explore_add_count));
        SolutionSet set = window_set(item, 0, grown, script.wrong_extra);
        last_sets[item.item_id] = set;
        return "[[CHANGE]]\n" + format_answer(set);
      }
      case RoundKind::Continuation:
        throw EndpointError("mock behavior truth_fraction does not support continuation");
    }
    throw EndpointError("unreachable");
  }

  std::string trace_segment(std::size_t index) const {
    std::string seg = "Candidate " + std::to_string(index + 1) + ":";
    for (int w = 0; w < script.words_per_candidate - 3; ++w) seg += " weighing";
    seg += " noted.";
    return seg;
  }

  std::string progressive_reply(const BenchmarkItem& item, RoundKind kind,
                                const std::vector<ChatMessage>& messages) {
    const std::size_t total = item.ground_truth.size();
    switch (kind) {
      case RoundKind::Answer: {
        std::string text = "<think>";
        for (std::size_t i = 0; i < total; ++i) text += "\n" + trace_segment(i);
        text += "\n</think>\n";
        text += format_answer(window_set(item, 0, total, 0));
        return text;
      }
      case RoundKind::Continuation: {
        const std::string& prefix = messages.back().content;
        std::size_t done = 0;
        for (std::size_t pos = 0;
             (pos = prefix.find("noted.", pos)) != std::string::npos; ++pos)
          ++done;
        return format_answer(window_set(item, 0, std::min(done, total), 0));
      }
      case RoundKind::Confidence:
        return confidence_reply(item, messages);
      case RoundKind::Recheck:
      case RoundKind::Explore:
        return "[[UNCHANGE]]";
    }
    throw EndpointError("unreachable");
  }

  std::string verbatim_reply(const BenchmarkItem* item, RoundKind kind) {
    const std::string item_key = item ? item->item_id : "*";
    auto entry = script.verbatim.find(item_key);
    if (entry == script.verbatim.end()) entry = script.verbatim.find("*");
    if (entry == script.verbatim.end())
      throw EndpointError("mock script has no replies for item '" + item_key + "'");
    const auto& by_round = entry->second.by_round;
    const auto round = by_round.find(round_name(kind));
    if (round == by_round.end() || round->second.empty())
      throw EndpointError("mock script has no '" + round_name(kind) +
                          "' reply for item '" + item_key + "'");
    const int call = bump(entry->first + "#" + round_name(kind));
    const auto index =
        std::min<std::size_t>(call, round->second.size() - 1);
    return round->second[index];
  }
};

ScriptedClient::ScriptedClient(MockScript script, Corpus corpus)
    : impl_(std::make_unique<Impl>()) {
  impl_->script = std::move(script);
  impl_->corpus = std::move(corpus);
}

ScriptedClient::~ScriptedClient() = default;

ChatResult ScriptedClient::complete(const std::vector<ChatMessage>& messages,
                                    const RequestOptions& options) {
  std::lock_guard<std::mutex> lock(impl_->mu);
  const RoundKind kind = Impl::classify(messages);
  const BenchmarkItem* item = impl_->find_item(messages);

  std::string content;
  if (impl_->script.behavior == "verbatim") {
    content = impl_->verbatim_reply(item, kind);
  } else {
    if (!item)
      throw EndpointError("mock could not match the conversation to a corpus item");
    content = impl_->script.behavior == "truth_fraction"
                  ? impl_->truth_fraction_reply(*item, kind, messages)
                  : impl_->progressive_reply(*item, kind, messages);
  }
  content = truncate_tokens(content, options.max_completion_tokens);

  ChatResult result;
  result.content = content;
  TokenUsage usage;
  usage.prompt_tokens = prompt_token_count(messages);
  usage.completion_tokens = count_tokens(content);
  result.usage = usage;
  return result;
}

// ---------------------------------------------------------------------------
// MockServer

struct MockServer::Impl {
  std::shared_ptr<ChatClient> inner;
  MockServerFaults faults;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> requests{0};
};

MockServer::MockServer(std::shared_ptr<ChatClient> inner, MockServerFaults faults)
    : impl_(std::make_unique<Impl>()) {
  impl_->inner = std::move(inner);
  impl_->faults = faults;

  impl_->server.Post(
      "/v1/chat/completions",
      [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
        const int n = ++impl->requests;
        if (impl->faults.delay_ms > 0)
          std::this_thread::sleep_for(std::chrono::milliseconds(impl->faults.delay_ms));
        if (n <= impl->faults.fail_first) {
          res.status = 500;
          res.set_content("injected failure", "text/plain");
          return;
        }
        if (impl->faults.malformed_every > 0 &&
            n % impl->faults.malformed_every == 0) {
          res.set_content("{\"choices\": [", "application/json");
          return;
        }
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception&) {
          res.status = 400;
          res.set_content("bad request body", "text/plain");
          return;
        }
        std::vector<ChatMessage> messages;
        for (const auto& m : body.value("messages", json::array()))
          messages.push_back({m.value("role", "user"), m.value("content", "")});
        RequestOptions options;
        options.temperature = body.value("temperature", options.temperature);
        options.max_completion_tokens = body.value(
            "max_completion_tokens",
            body.value("max_tokens", options.max_completion_tokens));
        try {
          const ChatResult out = impl->inner->complete(messages, options);
          json reply;
          reply["id"] = "mock-" + std::to_string(n);
          reply["object"] = "chat.completion";
          reply["model"] = body.value("model", "mock");
          reply["choices"] = json::array(
              {{{"index", 0},
                {"message", {{"role", "assistant"}, {"content", out.content}}},
                {"finish_reason", "stop"}}});
          if (out.usage)
            reply["usage"] = {{"prompt_tokens", out.usage->prompt_tokens},
                              {"completion_tokens", out.usage->completion_tokens},
                              {"total_tokens", out.usage->prompt_tokens +
                                                   out.usage->completion_tokens}};
          res.set_content(reply.dump(), "application/json");
        } catch (const std::exception& e) {
          res.status = 500;
          res.set_content(e.what(), "text/plain");
        }
      });

  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw EndpointError("mock server could not bind a port");
  impl_->thread = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace musobench
