#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file synthesis.hpp
 * @brief Single-agent -> multi-agent trajectory conversion through a
 *        chat-completion endpoint.
 *
 * Wire contract (any provider can be adapted to it):
 *
 *   POST <url>
 *   Authorization: Bearer $<auth_token_env>      (only when configured)
 *   {"model": "...", "messages": [{"role": "user", "content": "..."}, ...]}
 *
 * The response body is JSON carrying the completion text in
 * `choices[0].message.content`, `content`, or `text`.
 */

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stc/trajectory.hpp"

namespace stc {

struct Supervisor {
  std::string first_name;
  std::string last_name;
  std::string email;
  std::string phone_number;
};

struct SingleAgentTurn {
  std::string thought;
  std::string action;
  std::string observation;
};

struct SingleAgentTrajectory {
  std::string task_id;
  std::string instruction;
  Supervisor supervisor;
  std::vector<SingleAgentTurn> turns;
};

/// `{"task_id","instruction","supervisor":{...},"turns":[{"thought","action","observation"}]}`.
/// Actions may be bare code or wrapped in `<code>` tags.
SingleAgentTrajectory single_agent_from_json(const nlohmann::json& j);
SingleAgentTrajectory parse_single_agent(std::string_view text);

/// Task description followed by the supervisor identity line.
std::string instruction_with_supervisor(const SingleAgentTrajectory& s);

/// Numbered Thought / code / Observation blocks, one per turn.
std::string render_single_agent(const SingleAgentTrajectory& s);

/// Built-in conversion prompt template.
const std::string& default_conversion_template();

/// Small illustrative two-subtask conversion used when no exemplar is given.
const std::string& default_exemplar();

/// Placeholders every template must contain.
const std::vector<std::string>& conversion_placeholders();

/// Substitutes the task, supervisor, exemplar and trajectory into the
/// template in a single pass (substituted text is never re-scanned).
std::string build_conversion_prompt(const SingleAgentTrajectory& s, std::string_view exemplar,
                                    std::string_view template_text = default_conversion_template());

// ---- endpoint ---------------------------------------------------------------

struct EndpointConfig {
  std::string url;
  std::string auth_token_env;  ///< name of the env var holding the bearer token; empty = no auth
  std::string model;
  int max_retries = 2;
  std::chrono::milliseconds request_timeout{120000};
  int max_concurrent_requests = 4;
};

EndpointConfig endpoint_config_from_json(const nlohmann::json& j);
EndpointConfig load_endpoint_config(const std::string& path);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
};

nlohmann::json chat_request_to_json(const ChatRequest& r);
/// Extracts the completion text from a response body; throws EndpointError.
std::string completion_text(std::string_view body);

/// Implementations must be safe to call from several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the completion text. Throws EndpointError on transport failure.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// HTTP(S) client for the wire contract above. Connection failures, 429 and
/// 5xx responses are retried `max_retries` times with exponential backoff.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config, std::chrono::milliseconds base_backoff = std::chrono::milliseconds(250));
  std::string complete(const ChatRequest& request) override;

 private:
  EndpointConfig config_;
  std::chrono::milliseconds base_backoff_;
  std::string scheme_host_port_;
  std::string path_;
};

// ---- conversion ---------------------------------------------------------------

struct ConvertOptions {
  std::string exemplar;
  std::string model;
  int max_retries = 2;
  std::string template_text = default_conversion_template();
  std::optional<std::filesystem::path> audit_dir;
};

struct ConversionResult {
  Trajectory trajectory;
  int attempts = 0;
  std::string raw_response;
};

/// Sends the prompt and parses the reply. A reply that fails to parse or
/// fails the structural checks (exit markers, completion call, numbering) is
/// answered with a repair message and retried, `max_retries` times at most.
ConversionResult convert(const SingleAgentTrajectory& s, ChatClient& client, const ConvertOptions& options);

struct PreservationReport {
  bool ok = true;
  std::size_t source_turns = 0;
  std::size_t converted_steps = 0;  ///< executor steps with the added exit commands removed
  std::optional<std::size_t> mismatch_index;  ///< 1-based
  std::string expected;
  std::string actual;
};

/// Ordered 1:1 comparison of source actions against the converted executor
/// actions after code normalization.
PreservationReport verify_step_preservation(const SingleAgentTrajectory& s, const Trajectory& m);

struct BatchItem {
  std::string task_id;
  std::optional<ConversionResult> result;
  std::optional<PreservationReport> preservation;
  enum class Status { ok, not_preserved, conversion_failed, endpoint_error } status = Status::ok;
  std::string error;
};

/// Converts every input with at most `max_concurrency` requests in flight.
/// Results are returned in input order.
std::vector<BatchItem> convert_all(const std::vector<SingleAgentTrajectory>& inputs, ChatClient& client,
                                   const ConvertOptions& options, int max_concurrency);

void to_json(nlohmann::json& j, const PreservationReport& r);

}  // namespace stc
