#pragma once

#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "musobench/common.hpp"
#include "musobench/corpus.hpp"

namespace musobench {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ChatResult {
  std::string content;
  std::optional<TokenUsage> usage;
  std::optional<double> latency_ms;  // only when the transport measured one
};

struct RequestOptions {
  double temperature = 0.2;
  long max_completion_tokens = 20480;
};

/// A conversation ending in an assistant message is a continuation request:
/// the endpoint is asked to extend that message rather than start a fresh
/// reply. Not every endpoint supports this; see RunConfig.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResult complete(const std::vector<ChatMessage>& messages,
                              const RequestOptions& options) = 0;
};

// ---------------------------------------------------------------------------
// HTTP client (chat-completions JSON shape)

struct HttpClientConfig {
  std::string base_url;  // e.g. "https://api.example.com" or "http://127.0.0.1:8099"
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env;  // name of the env var holding the bearer token; "" = no auth
  int timeout_seconds = 300;
  int max_retries = 3;    // retries after the first attempt
  int retry_backoff_ms = 500;
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpClientConfig config);
  ~HttpChatClient() override;

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const RequestOptions& options) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Scripted mock

/// Reply plan for one benchmark item under the "verbatim" behavior. Each
/// round kind holds a list of replies consumed in arrival order; once
/// exhausted the last entry repeats.
struct VerbatimReplies {
  std::map<std::string, std::vector<std::string>> by_round;
};

/// Loaded from JSON (schema "musobench.mock/1"). `behavior` selects:
///   - "truth_fraction": answers with the first k ground-truth solutions
///     (k from recall_fraction), optionally rotated per call, plus
///     `wrong_extra` fabricated invalid solutions; fixed confidence.
///   - "verbatim": literal per-item, per-round replies.
///   - "progressive_trace": emits a reasoning trace that reveals one
///     ground-truth solution per fixed-size segment, honoring the request
///     token cap; a continuation request answers with exactly the solutions
///     whose segments completed in the supplied prefix.
struct MockScript {
  std::string behavior = "truth_fraction";

  double recall_fraction = 1.0;
  int wrong_extra = 0;
  std::optional<int> confidence = 95;
  int omit_confidence_times = 0;  // confidence requests ignored this many times per item
  bool rotate_paths = false;      // advance the answer window on every answer call
  std::string recheck_reply = "unchange";  // "unchange" | "restate"
  int explore_add_count = 0;      // extra true solutions revealed by the explore cue
  std::optional<int> explore_confidence;

  std::map<std::string, VerbatimReplies> verbatim;  // item_id or "*" fallback

  int words_per_candidate = 12;  // progressive_trace segment size in tokens
};

MockScript mock_script_from_json(const nlohmann::json& j);
MockScript load_mock_script(const std::string& path);

class ScriptedClient : public ChatClient {
 public:
  ScriptedClient(MockScript script, Corpus corpus);
  ~ScriptedClient() override;

  ChatResult complete(const std::vector<ChatMessage>& messages,
                      const RequestOptions& options) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Loopback server exposing any ChatClient over the wire contract

struct MockServerFaults {
  int fail_first = 0;       // respond 500 to this many initial requests
  int malformed_every = 0;  // every k-th response body is not JSON (0 = never)
  int delay_ms = 0;
};

class MockServer {
 public:
  explicit MockServer(std::shared_ptr<ChatClient> inner,
                      MockServerFaults faults = {});
  ~MockServer();  // stops the listener

  int port() const;
  std::string base_url() const;  // "http://127.0.0.1:<port>"

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace musobench
