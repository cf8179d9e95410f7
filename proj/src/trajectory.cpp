// SPDX-License-Identifier: Apache-2.0

#include "stc/trajectory.hpp"

#include <fstream>
#include <sstream>

#include "stc/errors.hpp"
#include "text_util.hpp"

namespace stc {

using nlohmann::json;

namespace {

constexpr std::string_view kCodeOpen = "<code>";
constexpr std::string_view kCodeClose = "</code>";

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::string_view (&names)[N]) {
  auto i = static_cast<std::size_t>(v);
  return i < N ? names[i] : std::string_view{"?"};
}

template <typename E, std::size_t N>
E enum_from(std::string_view s, const std::string_view (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  throw SchemaError("$", std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::string_view kSourceNames[] = {"native_multi_agent", "converted_from_single_agent"};
constexpr std::string_view kKindNames[] = {"login", "task_specific", "completion", "other_non_task_specific"};
constexpr std::string_view kRoleNames[] = {"executor", "critic"};
constexpr std::string_view kStatusNames[] = {"correct", "self_refined", "erroneous", "unclassified"};

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required key");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::optional<long long> optional_int(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  return it->get<long long>();
}

template <typename E, std::size_t N>
E enum_at(const std::string& value, const std::string_view (&names)[N], const std::string& path) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == value) return static_cast<E>(i);
  }
  throw SchemaError(path, "unknown value '" + value + "'");
}

Step parse_step(const json& doc, const std::string& path, int subtask_number, int position,
                std::vector<Violation>& warnings) {
  Step step;
  step.index = position;
  if (auto n = optional_int(doc, "step_number", path); n && *n != position) {
    throw SchemaError(path + ".step_number",
                      "non-contiguous step_number: expected " + std::to_string(position) + ", got " +
                          std::to_string(*n));
  }
  if (auto n = optional_int(doc, "subtask_number", path); n && *n != subtask_number) {
    throw SchemaError(path + ".subtask_number", "step belongs to subtask " + std::to_string(*n) +
                                                    " but is listed under subtask " + std::to_string(subtask_number));
  }
  if (auto r = optional_string(doc, "role", path)) step.role = enum_at<StepRole>(*r, kRoleNames, path + ".role");
  if (auto s = optional_string(doc, "status", path)) {
    step.status = enum_at<StepStatus>(*s, kStatusNames, path + ".status");
  }
  step.observation = optional_string(doc, "observation", path).value_or("");

  if (step.role == StepRole::critic) {
    step.action = require_string(doc, "feedback", path);
    step.thought = optional_string(doc, "thought", path).value_or("");
    return step;
  }

  auto split = split_plan_and_code(require_string(doc, "plan_and_code", path));
  if (split.code_blocks == 0) {
    throw SchemaError(path + ".plan_and_code", "step without a <code>...</code> fence");
  }
  if (split.code_blocks > 1) {
    warnings.push_back({"MULTIPLE_CODE_BLOCKS", subtask_number, position,
                        std::to_string(split.code_blocks) + " code blocks concatenated into one action"});
  }
  step.thought = std::move(split.thought);
  step.action = std::move(split.action);
  return step;
}

}  // namespace

std::string_view to_string(TrajectorySource v) { return enum_name(v, kSourceNames); }
std::string_view to_string(SubtaskKind v) { return enum_name(v, kKindNames); }
std::string_view to_string(StepRole v) { return enum_name(v, kRoleNames); }
std::string_view to_string(StepStatus v) { return enum_name(v, kStatusNames); }

TrajectorySource parse_source(std::string_view s) { return enum_from<TrajectorySource>(s, kSourceNames, "source"); }
StepRole parse_step_role(std::string_view s) { return enum_from<StepRole>(s, kRoleNames, "role"); }
StepStatus parse_step_status(std::string_view s) { return enum_from<StepStatus>(s, kStatusNames, "status"); }

SubtaskKind parse_subtask_kind(std::string_view s) {
  if (s == "ts") return SubtaskKind::task_specific;
  if (s == "other") return SubtaskKind::other_non_task_specific;
  return enum_from<SubtaskKind>(s, kKindNames, "subtask kind");
}

std::size_t Subtask::executor_step_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.role == StepRole::executor ? 1 : 0;
  return n;
}

std::size_t Trajectory::total_turn_count() const {
  std::size_t n = 0;
  for (const auto& s : subtasks) n += s.executor_step_count();
  return n;
}

PlanAndCode split_plan_and_code(std::string_view text) {
  PlanAndCode out;
  auto first = text.find(kCodeOpen);
  if (first == std::string_view::npos) {
    out.thought = std::string(detail::trim(text));
    return out;
  }
  out.thought = std::string(detail::trim(text.substr(0, first)));

  std::string joined;
  std::size_t pos = first;
  while (pos != std::string_view::npos) {
    auto body_start = pos + kCodeOpen.size();
    auto close = text.find(kCodeClose, body_start);
    // an unterminated fence runs to the end of the text
    auto body = text.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
    if (out.code_blocks > 0) joined.push_back('\n');
    joined.append(detail::normalize_code(body));
    ++out.code_blocks;
    if (close == std::string_view::npos) break;
    pos = text.find(kCodeOpen, close + kCodeClose.size());
  }
  out.action = std::move(joined);
  return out;
}

std::string join_plan_and_code(std::string_view thought, std::string_view action) {
  std::string out;
  if (!thought.empty()) {
    out.append(thought);
    out.push_back('\n');
  }
  out.append(kCodeOpen);
  out.append(action);
  out.append(kCodeClose);
  return out;
}

namespace {

Trajectory walk_document(const json& doc, std::vector<Violation>& warnings) {
  Trajectory t;
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");
  t.task_id = optional_string(doc, "task_id", "$").value_or("");
  t.instruction = optional_string(doc, "instruction", "$").value_or("");
  if (auto s = optional_string(doc, "source", "$")) t.source = enum_at<TrajectorySource>(*s, kSourceNames, "$.source");

  const auto& subtasks = require(doc, "subtasks", "$");
  if (!subtasks.is_array()) throw SchemaError("$.subtasks", "expected an array");
  int expected = 1;
  for (std::size_t i = 0; i < subtasks.size(); ++i, ++expected) {
    const auto path = "$.subtasks[" + std::to_string(i) + "]";
    const auto& sd = subtasks[i];
    const auto& num = require(sd, "subtask_number", path);
    if (!num.is_number_integer()) throw SchemaError(path + ".subtask_number", "expected an integer");
    if (num.get<long long>() != expected) {
      throw SchemaError(path + ".subtask_number", "non-contiguous subtask_number: expected " +
                                                      std::to_string(expected) + ", got " +
                                                      std::to_string(num.get<long long>()));
    }
    Subtask st;
    st.number = expected;
    st.description = require_string(sd, "subtask_description", path);
    if (auto k = optional_string(sd, "kind", path)) st.kind = enum_at<SubtaskKind>(*k, kKindNames, path + ".kind");
    st.final_report = optional_string(sd, "final_report", path).value_or("");
    const auto& steps = require(sd, "executor_steps", path);
    if (!steps.is_array()) throw SchemaError(path + ".executor_steps", "expected an array");
    for (std::size_t j = 0; j < steps.size(); ++j) {
      st.steps.push_back(parse_step(steps[j], path + ".executor_steps[" + std::to_string(j) + "]", expected,
                                    static_cast<int>(j) + 1, warnings));
    }
    t.subtasks.push_back(std::move(st));
  }
  return t;
}

}  // namespace

Trajectory trajectory_from_json(const json& doc) {
  std::vector<Violation> ignored;
  return walk_document(doc, ignored);
}

ParseResult parse_trajectory_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  ParseResult out;
  out.trajectory = walk_document(doc, out.warnings);
  return out;
}

Trajectory parse_trajectory(std::string_view text) { return parse_trajectory_report(text).trajectory; }

json trajectory_to_json(const Trajectory& t) {
  json subtasks = json::array();
  for (const auto& st : t.subtasks) {
    json steps = json::array();
    for (const auto& step : st.steps) {
      json s = {
          {"step_number", step.index},
          {"subtask_number", st.number},
          {"role", to_string(step.role)},
          {"observation", step.observation},
          {"status", to_string(step.status)},
      };
      if (step.role == StepRole::critic) {
        s["feedback"] = step.action;
        if (!step.thought.empty()) s["thought"] = step.thought;
      } else {
        s["plan_and_code"] = join_plan_and_code(step.thought, step.action);
      }
      steps.push_back(std::move(s));
    }
    json sj = {
        {"subtask_number", st.number},
        {"subtask_description", st.description},
        {"final_report", st.final_report},
        {"executor_steps", std::move(steps)},
    };
    if (st.kind) sj["kind"] = to_string(*st.kind);
    subtasks.push_back(std::move(sj));
  }
  return {
      {"task_id", t.task_id},
      {"instruction", t.instruction},
      {"source", to_string(t.source)},
      {"subtasks", std::move(subtasks)},
  };
}

std::string serialize_trajectory(const Trajectory& t) {
  return trajectory_to_json(t).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

// ---- validation ------------------------------------------------------------

bool is_exit_action(std::string_view action) {
  auto lines = detail::split_lines(detail::trim_right(action));
  return !lines.empty() && detail::trim(lines.back()) == "exit";
}

ValidationReport validate_trajectory(const Trajectory& t, const Budgets& budgets) {
  ValidationReport r;
  auto add = [&](std::string code, std::optional<int> subtask, std::optional<int> step, std::string msg) {
    r.violations.push_back({std::move(code), subtask, step, std::move(msg)});
  };

  if (t.subtasks.empty()) add("NO_SUBTASKS", std::nullopt, std::nullopt, "trajectory has no subtasks");
  if (t.subtasks.size() > budgets.max_subtasks) {
    add("SUBTASK_BUDGET", std::nullopt, std::nullopt,
        std::to_string(t.subtasks.size()) + " subtasks exceed the budget of " + std::to_string(budgets.max_subtasks));
  }

  std::size_t completions = 0;
  for (std::size_t i = 0; i < t.subtasks.size(); ++i) {
    const auto& st = t.subtasks[i];
    const int number = static_cast<int>(i) + 1;
    if (st.number != number) {
      add("NON_CONTIGUOUS", st.number, std::nullopt,
          "subtask at position " + std::to_string(number) + " is numbered " + std::to_string(st.number));
    }
    if (st.kind == SubtaskKind::completion) {
      ++completions;
      if (i + 1 != t.subtasks.size()) add("COMPLETION_NOT_LAST", number, std::nullopt, "completion subtask is not last");
    }
    if (st.steps.empty()) {
      add("EMPTY_SUBTASK", number, std::nullopt, "subtask has no steps");
      continue;
    }
    if (st.executor_step_count() > budgets.max_steps_per_subtask) {
      add("STEP_BUDGET", number, std::nullopt,
          std::to_string(st.executor_step_count()) + " executor steps exceed the budget of " +
              std::to_string(budgets.max_steps_per_subtask));
    }
    for (std::size_t j = 0; j < st.steps.size(); ++j) {
      const auto& step = st.steps[j];
      if (detail::trim(step.action).empty()) {
        add("EMPTY_ACTION", number, step.index,
            step.role == StepRole::critic ? "critic step has no feedback" : "executor step has no code");
      }
      if (step.status == StepStatus::self_refined &&
          (j == 0 || st.steps[j - 1].status != StepStatus::erroneous)) {
        add("BAD_SELF_REFINED", number, step.index, "self_refined step does not follow an erroneous step");
      }
    }
    const auto& last = st.steps.back();
    if (last.role != StepRole::executor || !is_exit_action(last.action)) {
      add("MISSING_EXIT", number, last.index, "last step of the subtask does not end with exit");
    }
  }
  if (completions > 1) add("MULTIPLE_COMPLETION", std::nullopt, std::nullopt, "more than one completion subtask");

  if (!t.subtasks.empty()) {
    const auto& final_st = t.subtasks.back();
    bool called = false;
    for (const auto& step : final_st.steps) {
      if (step.role == StepRole::executor && step.action.find("complete_task(") != std::string::npos) called = true;
    }
    if (!called) {
      add("MISSING_COMPLETION_CALL", final_st.number, std::nullopt,
          "final subtask never calls the task completion API");
    }
  }
  r.ok = r.violations.empty();
  return r;
}

// ---- classification -------------------------------------------------------

ErrorPattern ErrorPattern::substring(std::string text) {
  if (text.empty()) throw PatternError("empty error pattern");
  ErrorPattern p;
  p.source_ = std::move(text);
  return p;
}

ErrorPattern ErrorPattern::regex(std::string expr) {
  if (expr.empty()) throw PatternError("empty error pattern");
  ErrorPattern p;
  try {
    p.regex_.emplace(expr, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw PatternError("invalid regular expression '" + expr + "': " + e.what());
  }
  p.source_ = std::move(expr);
  return p;
}

ErrorPattern ErrorPattern::parse(std::string_view entry) {
  constexpr std::string_view kRegexPrefix = "re:";
  if (entry.substr(0, kRegexPrefix.size()) == kRegexPrefix) {
    return regex(std::string(entry.substr(kRegexPrefix.size())));
  }
  return substring(std::string(entry));
}

bool ErrorPattern::matches(std::string_view text) const {
  if (regex_) return std::regex_search(text.begin(), text.end(), *regex_);
  return text.find(source_) != std::string_view::npos;
}

std::vector<ErrorPattern> default_error_patterns() {
  return {ErrorPattern::substring("Traceback"), ErrorPattern::substring("Exception"),
          ErrorPattern::substring("Error:")};
}

std::vector<ErrorPattern> parse_error_patterns(std::string_view contents) {
  std::vector<ErrorPattern> out;
  for (auto line : detail::split_lines(contents)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    out.push_back(ErrorPattern::parse(trimmed));
  }
  return out;
}

std::vector<ErrorPattern> load_error_patterns(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pattern file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_error_patterns(ss.str());
}

Trajectory classify_steps(Trajectory t, const std::vector<ErrorPattern>& patterns) {
  for (auto& st : t.subtasks) {
    bool prev_erroneous = false;
    for (auto& step : st.steps) {
      bool erroneous = false;
      for (const auto& p : patterns) {
        if (p.matches(step.observation)) {
          erroneous = true;
          break;
        }
      }
      if (erroneous) {
        step.status = StepStatus::erroneous;
      } else {
        step.status = prev_erroneous ? StepStatus::self_refined : StepStatus::correct;
      }
      prev_erroneous = erroneous;
    }
  }
  return t;
}

Trajectory classify_subtasks(Trajectory t, const std::map<int, SubtaskKind>& overrides) {
  const auto m = t.subtasks.size();
  for (std::size_t i = 0; i < m; ++i) {
    auto& st = t.subtasks[i];
    if (m == 1 || i + 1 == m) {
      st.kind = SubtaskKind::completion;
    } else if (i == 0) {
      st.kind = SubtaskKind::login;
    } else {
      st.kind = SubtaskKind::task_specific;
    }
    if (auto it = overrides.find(st.number); it != overrides.end()) st.kind = it->second;
  }
  return t;
}

std::vector<SubtaskKind> subtask_kinds(const Trajectory& t) {
  std::vector<SubtaskKind> out;
  out.reserve(t.subtasks.size());
  for (const auto& st : t.subtasks) {
    if (!st.kind) throw UnclassifiedSteps("subtask " + std::to_string(st.number) + " of task '" + t.task_id +
                                          "' has no kind; run classify_subtasks first");
    out.push_back(*st.kind);
  }
  return out;
}

void to_json(json& j, const Violation& v) {
  j = {{"code", v.code}, {"message", v.message}};
  j["subtask"] = v.subtask ? json(*v.subtask) : json(nullptr);
  j["step"] = v.step ? json(*v.step) : json(nullptr);
}

void to_json(json& j, const ValidationReport& r) {
  j = {{"ok", r.ok}, {"violations", r.violations}, {"warnings", r.warnings}};
}

}  // namespace stc
