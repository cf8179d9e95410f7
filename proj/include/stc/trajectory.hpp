#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file trajectory.hpp
 * @brief Multi-agent trajectory model: parsing, canonical serialization,
 *        structural validation and step/subtask annotation.
 *
 * A trajectory records one task solved by an Orchestrator that plans
 * subtasks and an Executor that works through each subtask in ReAct turns
 * (thought, code action, observation). Critic feedback turns live in the
 * same step list with role `critic`.
 *
 * Input documents follow the conversion schema
 * (`subtasks[].subtask_number`, `subtasks[].subtask_description`,
 * `subtasks[].executor_steps[].plan_and_code`) and may carry the extra keys
 * written by `serialize_trajectory`.
 */

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stc {

enum class TrajectorySource { native_multi_agent, converted_from_single_agent };
enum class SubtaskKind { login, task_specific, completion, other_non_task_specific };
enum class StepRole { executor, critic };
enum class StepStatus { correct, self_refined, erroneous, unclassified };

std::string_view to_string(TrajectorySource v);
std::string_view to_string(SubtaskKind v);
std::string_view to_string(StepRole v);
std::string_view to_string(StepStatus v);

TrajectorySource parse_source(std::string_view s);
/// Accepts the long names plus the short forms `ts` and `other`.
SubtaskKind parse_subtask_kind(std::string_view s);
StepRole parse_step_role(std::string_view s);
StepStatus parse_step_status(std::string_view s);

struct Step {
  int index = 0;  ///< 1-based position within the subtask
  StepRole role = StepRole::executor;
  std::string thought;
  std::string action;  ///< code for executor steps, feedback text for critic steps
  std::string observation;
  StepStatus status = StepStatus::unclassified;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Subtask {
  int number = 0;
  std::string description;
  std::optional<SubtaskKind> kind;  ///< unset until classified
  std::vector<Step> steps;
  std::string final_report;

  std::size_t executor_step_count() const;

  friend bool operator==(const Subtask&, const Subtask&) = default;
};

struct Trajectory {
  std::string task_id;
  std::string instruction;
  std::vector<Subtask> subtasks;
  TrajectorySource source = TrajectorySource::native_multi_agent;

  /// One Orchestrator step per subtask.
  std::size_t orchestrator_step_count() const { return subtasks.size(); }
  /// Executor-role steps summed over subtasks.
  std::size_t total_turn_count() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Violation {
  std::string code;
  std::optional<int> subtask;
  std::optional<int> step;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// `ok` is true iff `violations` is empty. Warnings never affect `ok`.
struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
};

struct ParseResult {
  Trajectory trajectory;
  std::vector<Violation> warnings;  ///< e.g. MULTIPLE_CODE_BLOCKS
};

// ---- parsing / serialization ----------------------------------------------

/// Splits a `plan_and_code` string. Thought is the text before the first
/// `<code>` tag; the action is the content of every `<code>...</code>` block
/// joined with newlines. Returns the number of code blocks found (0 means no
/// fence at all).
struct PlanAndCode {
  std::string thought;
  std::string action;
  std::size_t code_blocks = 0;
};
PlanAndCode split_plan_and_code(std::string_view text);

/// Inverse of split_plan_and_code for a single block.
std::string join_plan_and_code(std::string_view thought, std::string_view action);

ParseResult parse_trajectory_report(std::string_view text);
Trajectory parse_trajectory(std::string_view text);
Trajectory trajectory_from_json(const nlohmann::json& doc);

nlohmann::json trajectory_to_json(const Trajectory& t);
/// UTF-8, sorted keys, no insignificant whitespace, LF-terminated.
std::string serialize_trajectory(const Trajectory& t);

// ---- validation ------------------------------------------------------------

struct Budgets {
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
  std::size_t max_subtasks = 12;
  std::size_t max_steps_per_subtask = 15;

  static Budgets unlimited() { return {kUnlimited, kUnlimited}; }
};

/// True when the last non-blank line of `action` is exactly `exit`.
bool is_exit_action(std::string_view action);

ValidationReport validate_trajectory(const Trajectory& t, const Budgets& budgets = {});

// ---- classification -------------------------------------------------------

/// A substring pattern, or a regular expression when written with the `re:`
/// prefix in pattern files.
class ErrorPattern {
 public:
  static ErrorPattern substring(std::string text);
  static ErrorPattern regex(std::string expr);
  /// Parses one pattern-file entry (`re:` prefix selects regex).
  static ErrorPattern parse(std::string_view entry);

  bool matches(std::string_view text) const;
  const std::string& source() const { return source_; }
  bool is_regex() const { return regex_.has_value(); }

 private:
  std::string source_;
  std::optional<std::regex> regex_;
};

/// "Traceback", "Exception", "Error:" as case-sensitive substrings.
std::vector<ErrorPattern> default_error_patterns();

/// One pattern per line, `#` starts a comment line, blank lines ignored.
std::vector<ErrorPattern> parse_error_patterns(std::string_view file_contents);
std::vector<ErrorPattern> load_error_patterns(const std::string& path);

Trajectory classify_steps(Trajectory t, const std::vector<ErrorPattern>& patterns);

/// Default rule: subtask 1 login, subtask M completion, rest task-specific;
/// a single subtask is completion. Explicit overrides win.
Trajectory classify_subtasks(Trajectory t, const std::map<int, SubtaskKind>& overrides = {});

std::vector<SubtaskKind> subtask_kinds(const Trajectory& t);

void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const ValidationReport& r);

}  // namespace stc
