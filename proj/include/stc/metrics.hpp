#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file metrics.hpp
 * @brief Task/scenario goal completion, per-position error rates and token
 *        statistics over evaluated runs.
 *
 * Percentages are rounded to one decimal place, half away from zero.
 * Error-rate rows keep their numerator and denominator.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stc/trajectory.hpp"

namespace stc {

struct AgentCall {
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
};

struct AgentUsage {
  std::string name;
  double params_billions = 0.0;
  std::vector<AgentCall> calls;
};

struct SubtaskTraceEntry {
  int position = 0;
  int error_count = 0;
};

struct RunRecord {
  std::string task_id;
  std::string scenario_id;
  bool passed = false;
  std::vector<AgentUsage> agents;
  std::vector<SubtaskTraceEntry> subtask_trace;
  int max_position_reached = 0;

  /// Sum of tokens_in + tokens_out over every agent call.
  std::int64_t total_tokens() const;
};

RunRecord run_record_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json run_record_to_json(const RunRecord& r);
/// One record per non-blank line.
std::vector<RunRecord> parse_run_log(std::string_view jsonl);
std::vector<RunRecord> load_run_log(const std::string& path);

/// round-half-away-from-zero to one decimal place
double round1(double value);

double tgc(const std::vector<RunRecord>& records);
double sgc(const std::vector<RunRecord>& records);

struct ErrorRateRow {
  int position = 0;
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;
  double rate_percent = 0.0;
};

struct ErrorRateTable {
  std::vector<ErrorRateRow> rows;
};

inline constexpr int kDefaultMinSuccessful = 5;

/// Over passed records only: share of records reaching position i that hit at
/// least one error there. Rows with denominator <= min_successful are dropped.
ErrorRateTable inference_error_rates(const std::vector<RunRecord>& records,
                                     int min_successful = kDefaultMinSuccessful);

/// Joint variant for comparing systems: one table per run set, keeping a
/// position only when every set clears the threshold there.
std::vector<ErrorRateTable> inference_error_rates_joint(const std::vector<std::vector<RunRecord>>& run_sets,
                                                        int min_successful = kDefaultMinSuccessful);

/// Share of tasks having subtask position i with at least one erroneous executor step there.
ErrorRateTable training_error_rates(const std::vector<Trajectory>& corpus);

struct TokenStats {
  std::optional<double> success_mean;
  std::optional<double> success_variance;  ///< population variance
  std::optional<double> failure_mean;
  std::optional<double> failure_variance;
  double success_token_ratio_percent = 0.0;
  std::int64_t success_tokens = 0;
  std::int64_t total_tokens = 0;
  std::size_t success_records = 0;
  std::size_t failure_records = 0;
};

TokenStats token_stats(const std::vector<RunRecord>& records);

/// Aligned plain-text rendering for terminals.
std::string format_error_rates(const ErrorRateTable& table);

void to_json(nlohmann::json& j, const ErrorRateRow& r);
void to_json(nlohmann::json& j, const ErrorRateTable& t);
void to_json(nlohmann::json& j, const TokenStats& s);

}  // namespace stc
