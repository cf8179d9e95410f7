// SPDX-License-Identifier: Apache-2.0

#include "stc/synthesis.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "stc/errors.hpp"
#include "text_util.hpp"

namespace stc {

namespace detail {
extern const char* const kConversionPrompt;
extern const char* const kDefaultExemplar;
}

using nlohmann::json;

namespace {

constexpr std::string_view kExamplePlaceholder = "[Example Multi-Agent Trajectory Placeholder]";

std::string get_string(const json& j, const char* key, const std::string& path, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw SchemaError(path + "." + key, "missing required key");
    return {};
  }
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::string strip_markdown_fence(std::string_view raw) {
  auto t = detail::trim(raw);
  if (t.substr(0, 3) != "```") return std::string(t);
  auto nl = t.find('\n');
  if (nl == std::string_view::npos) return std::string(t);
  t.remove_prefix(nl + 1);
  t = detail::trim_right(t);
  if (t.size() >= 3 && t.substr(t.size() - 3) == "```") t.remove_suffix(3);
  return std::string(detail::trim(t));
}

std::string safe_file_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "task" : out;
}

void write_audit(const std::filesystem::path& dir, const std::string& task_id, int attempt,
                 const ChatRequest& request, const std::string& response) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create audit directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / (safe_file_stem(task_id) + ".attempt" + std::to_string(attempt) + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write audit transcript '" + path.string() + "'");
  json record = {{"request", chat_request_to_json(request)}, {"response", response}, {"attempt", attempt}};
  out << record.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
}

std::string repair_message(const std::string& reason) {
  return "Your previous response could not be used: " + reason +
         "\nRespond again with ONLY the corrected JSON object following the schema. Keep every original step, "
         "wrap code in <code> </code> tags and end each subtask with <code>exit</code>.";
}

}  // namespace

// ---- input ---------------------------------------------------------------------

SingleAgentTrajectory single_agent_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
  SingleAgentTrajectory s;
  s.task_id = get_string(j, "task_id", "$", true);
  s.instruction = get_string(j, "instruction", "$", true);
  if (auto sup = j.find("supervisor"); sup != j.end() && !sup->is_null()) {
    if (!sup->is_object()) throw SchemaError("$.supervisor", "expected an object");
    s.supervisor.first_name = get_string(*sup, "first_name", "$.supervisor", false);
    s.supervisor.last_name = get_string(*sup, "last_name", "$.supervisor", false);
    s.supervisor.email = get_string(*sup, "email", "$.supervisor", false);
    s.supervisor.phone_number = get_string(*sup, "phone_number", "$.supervisor", false);
  }
  auto turns = j.find("turns");
  if (turns == j.end() || !turns->is_array()) throw SchemaError("$.turns", "expected an array");
  if (turns->empty()) throw SchemaError("$.turns", "a single-agent trajectory needs at least one turn");
  for (std::size_t i = 0; i < turns->size(); ++i) {
    const auto path = "$.turns[" + std::to_string(i) + "]";
    const auto& tj = (*turns)[i];
    if (!tj.is_object()) throw SchemaError(path, "expected an object");
    SingleAgentTurn turn;
    turn.thought = get_string(tj, "thought", path, false);
    auto action = get_string(tj, "action", path, true);
    if (action.find("<code>") != std::string::npos) {
      auto split = split_plan_and_code(action);
      action = split.action;
      if (turn.thought.empty()) turn.thought = split.thought;
    }
    if (detail::trim(action).empty()) throw SchemaError(path + ".action", "empty action");
    turn.action = std::move(action);
    turn.observation = get_string(tj, "observation", path, false);
    s.turns.push_back(std::move(turn));
  }
  return s;
}

SingleAgentTrajectory parse_single_agent(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  return single_agent_from_json(doc);
}

std::string instruction_with_supervisor(const SingleAgentTrajectory& s) {
  const auto& p = s.supervisor;
  return s.instruction + "\nSupervisor name is: " + p.first_name + " " + p.last_name + ". Email is " + p.email +
         " and phone number is " + p.phone_number + ".";
}

std::string render_single_agent(const SingleAgentTrajectory& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    const auto& t = s.turns[i];
    os << "\n\nStep " << (i + 1) << ":\n";
    if (!t.thought.empty()) os << "Thought: " << t.thought << '\n';
    os << "<code>\n" << t.action << "\n</code>\n";
    os << "Observation:\n" << t.observation;
  }
  os << '\n';
  return os.str();
}

const std::string& default_conversion_template() {
  static const std::string kTemplate(detail::kConversionPrompt);
  return kTemplate;
}

const std::string& default_exemplar() {
  static const std::string kExemplar(detail::kDefaultExemplar);
  return kExemplar;
}

const std::vector<std::string>& conversion_placeholders() {
  static const std::vector<std::string> kNames = {
      std::string(kExamplePlaceholder), "<task_description>", "<first_name>", "<last_name>",
      "<email>",                        "<phone_number>",     "<single_agent_trajectory>"};
  return kNames;
}

std::string build_conversion_prompt(const SingleAgentTrajectory& s, std::string_view exemplar,
                                    std::string_view template_text) {
  if (detail::trim(exemplar).empty()) throw TemplateError("the exemplar multi-agent trajectory is empty");
  const auto& names = conversion_placeholders();
  for (const auto& name : names) {
    if (template_text.find(name) == std::string_view::npos) {
      throw TemplateError("template is missing the placeholder " + name);
    }
  }
  const std::vector<std::string> values = {std::string(exemplar),       s.instruction,
                                           s.supervisor.first_name,     s.supervisor.last_name,
                                           s.supervisor.email,          s.supervisor.phone_number,
                                           render_single_agent(s)};

  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t best = std::string_view::npos;
    std::size_t which = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto at = template_text.find(names[i], pos);
      if (at < best) {
        best = at;
        which = i;
      }
    }
    if (best == std::string_view::npos) {
      out.append(template_text.substr(pos));
      break;
    }
    out.append(template_text.substr(pos, best - pos));
    out.append(values[which]);
    pos = best + names[which].size();
  }
  return out;
}

// ---- endpoint ------------------------------------------------------------------

EndpointConfig endpoint_config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
  EndpointConfig c;
  c.url = get_string(j, "url", "$", true);
  c.model = get_string(j, "model", "$", true);
  c.auth_token_env = get_string(j, "auth_token_env", "$", false);
  auto integer = [&](const char* key, long long fallback) -> long long {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_number_integer()) throw SchemaError(std::string("$.") + key, "expected an integer");
    return it->get<long long>();
  };
  c.max_retries = static_cast<int>(integer("max_retries", c.max_retries));
  c.max_concurrent_requests = static_cast<int>(integer("max_concurrent_requests", c.max_concurrent_requests));
  if (auto it = j.find("request_timeout_seconds"); it != j.end() && !it->is_null()) {
    if (!it->is_number() || it->get<double>() <= 0) {
      throw SchemaError("$.request_timeout_seconds", "expected a positive number");
    }
    c.request_timeout = std::chrono::milliseconds(static_cast<long long>(it->get<double>() * 1000.0));
  }
  if (c.max_retries < 0) throw SchemaError("$.max_retries", "must be >= 0");
  if (c.max_concurrent_requests < 1) throw SchemaError("$.max_concurrent_requests", "must be >= 1");
  return c;
}

EndpointConfig load_endpoint_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open endpoint config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  return endpoint_config_from_json(doc);
}

json chat_request_to_json(const ChatRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", r.model}, {"messages", std::move(messages)}};
}

std::string completion_text(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error&) {
    throw EndpointError("endpoint returned a non-JSON body");
  }
  if (doc.is_object()) {
    if (auto c = doc.find("choices"); c != doc.end() && c->is_array() && !c->empty()) {
      const auto& first = (*c)[0];
      if (first.contains("message") && first["message"].contains("content") &&
          first["message"]["content"].is_string()) {
        return first["message"]["content"].get<std::string>();
      }
      if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
    }
    for (const char* key : {"content", "text"}) {
      if (auto it = doc.find(key); it != doc.end() && it->is_string()) return it->get<std::string>();
    }
  }
  throw EndpointError("endpoint response carries no completion text");
}

HttpChatClient::HttpChatClient(EndpointConfig config, std::chrono::milliseconds base_backoff)
    : config_(std::move(config)), base_backoff_(base_backoff) {
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw EndpointError("endpoint url needs a scheme: '" + config_.url + "'");
  const auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  httplib::Headers headers;
  if (!config_.auth_token_env.empty()) {
    const char* token = std::getenv(config_.auth_token_env.c_str());
    if (token == nullptr) throw EndpointError("environment variable " + config_.auth_token_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const auto body = chat_request_to_json(request).dump(-1, ' ', false, json::error_handler_t::replace);

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(base_backoff_ * (1 << std::min(attempt - 1, 10)));
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.request_timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "request to " + config_.url + " failed: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) return completion_text(res->body);
    last_status = res->status;
    last_error = "endpoint returned HTTP " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500) break;
  }
  throw EndpointError(last_error, last_status);
}

// ---- conversion ------------------------------------------------------------------

ConversionResult convert(const SingleAgentTrajectory& s, ChatClient& client, const ConvertOptions& options) {
  if (options.max_retries < 0) throw Error("max_retries must be >= 0");
  ChatRequest request;
  request.model = options.model;
  request.messages.push_back({"user", build_conversion_prompt(s, options.exemplar, options.template_text)});

  std::string raw;
  std::string reason;
  const int attempts = options.max_retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    raw = client.complete(request);
    if (options.audit_dir) write_audit(*options.audit_dir, s.task_id, attempt, request, raw);
    try {
      auto t = parse_trajectory(strip_markdown_fence(raw));
      t.task_id = s.task_id;
      t.instruction = instruction_with_supervisor(s);
      t.source = TrajectorySource::converted_from_single_agent;
      const auto report = validate_trajectory(t, Budgets::unlimited());
      if (report.ok) return {std::move(t), attempt, raw};
      reason = "structural check failed:";
      for (const auto& v : report.violations) reason += " " + v.code + " (" + v.message + ");";
    } catch (const SchemaError& e) {
      reason = e.what();
    }
    request.messages.push_back({"assistant", raw});
    request.messages.push_back({"user", repair_message(reason)});
  }
  throw ConversionFailed("conversion of task '" + s.task_id + "' failed after " + std::to_string(attempts) +
                             " attempts: " + reason,
                         raw, attempts);
}

PreservationReport verify_step_preservation(const SingleAgentTrajectory& s, const Trajectory& m) {
  std::vector<std::string> converted;
  for (const auto& st : m.subtasks) {
    std::vector<const Step*> exec;
    for (const auto& step : st.steps) {
      if (step.role == StepRole::executor) exec.push_back(&step);
    }
    if (exec.empty()) continue;
    std::string tail = detail::normalize_code(exec.back()->action);
    exec.pop_back();
    for (const auto* step : exec) converted.push_back(detail::normalize_code(step->action));
    // the added exit may be a step of its own or appended to the last real step
    if (tail == "exit") continue;
    if (const auto nl = tail.rfind('\n'); nl != std::string::npos && detail::trim(tail.substr(nl + 1)) == "exit") {
      tail = detail::normalize_code(tail.substr(0, nl));
    }
    converted.push_back(std::move(tail));
  }

  PreservationReport r;
  r.source_turns = s.turns.size();
  r.converted_steps = converted.size();
  const auto n = std::max(converted.size(), s.turns.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string expected = i < s.turns.size() ? detail::normalize_code(s.turns[i].action) : std::string{};
    const std::string actual = i < converted.size() ? converted[i] : std::string{};
    if (i >= s.turns.size() || i >= converted.size() || expected != actual) {
      r.ok = false;
      r.mismatch_index = i + 1;
      r.expected = expected;
      r.actual = actual;
      break;
    }
  }
  return r;
}

std::vector<BatchItem> convert_all(const std::vector<SingleAgentTrajectory>& inputs, ChatClient& client,
                                   const ConvertOptions& options, int max_concurrency) {
  std::vector<BatchItem> out(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      auto& item = out[i];
      item.task_id = inputs[i].task_id;
      try {
        item.result = convert(inputs[i], client, options);
        item.preservation = verify_step_preservation(inputs[i], item.result->trajectory);
        item.status = item.preservation->ok ? BatchItem::Status::ok : BatchItem::Status::not_preserved;
      } catch (const ConversionFailed& e) {
        item.status = BatchItem::Status::conversion_failed;
        item.error = e.what();
      } catch (const EndpointError& e) {
        item.status = BatchItem::Status::endpoint_error;
        item.error = e.what();
      } catch (const std::exception& e) {
        item.status = BatchItem::Status::conversion_failed;
        item.error = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, max_concurrency));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, inputs.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

void to_json(json& j, const PreservationReport& r) {
  j = {{"ok", r.ok}, {"source_turns", r.source_turns}, {"converted_steps", r.converted_steps}};
  j["mismatch_index"] = r.mismatch_index ? json(*r.mismatch_index) : json(nullptr);
  if (!r.ok) {
    j["expected"] = r.expected;
    j["actual"] = r.actual;
  }
}

}  // namespace stc
