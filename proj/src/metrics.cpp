// SPDX-License-Identifier: Apache-2.0

#include "stc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "stc/errors.hpp"
#include "text_util.hpp"

namespace stc {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing required key");
  return *it;
}

std::int64_t non_negative(const json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  auto n = v.get<std::int64_t>();
  if (n < 0) throw SchemaError(path + "." + key, "must be non-negative");
  return n;
}

std::string string_field(const json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

double percent(std::int64_t num, std::int64_t den) {
  return round1(100.0 * static_cast<double>(num) / static_cast<double>(den));
}

struct MeanVar {
  double mean;
  double variance;
};

MeanVar mean_variance(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, sq / static_cast<double>(xs.size())};
}

}  // namespace

std::int64_t RunRecord::total_tokens() const {
  std::int64_t n = 0;
  for (const auto& a : agents) {
    for (const auto& c : a.calls) n += c.tokens_in + c.tokens_out;
  }
  return n;
}

RunRecord run_record_from_json(const json& j, const std::string& path) {
  RunRecord r;
  r.task_id = string_field(j, "task_id", path);
  r.scenario_id = string_field(j, "scenario_id", path);
  const auto& passed = field(j, "passed", path);
  if (!passed.is_boolean()) throw SchemaError(path + ".passed", "expected a boolean");
  r.passed = passed.get<bool>();

  if (auto it = j.find("agents"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + ".agents", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto apath = path + ".agents[" + std::to_string(i) + "]";
      const auto& aj = (*it)[i];
      AgentUsage a;
      a.name = string_field(aj, "name", apath);
      if (auto p = aj.find("params_billions"); p != aj.end() && !p->is_null()) {
        if (!p->is_number()) throw SchemaError(apath + ".params_billions", "expected a number");
        a.params_billions = p->get<double>();
      }
      if (auto c = aj.find("calls"); c != aj.end()) {
        if (!c->is_array()) throw SchemaError(apath + ".calls", "expected an array");
        for (std::size_t k = 0; k < c->size(); ++k) {
          const auto cpath = apath + ".calls[" + std::to_string(k) + "]";
          a.calls.push_back({non_negative((*c)[k], "tokens_in", cpath), non_negative((*c)[k], "tokens_out", cpath)});
        }
      }
      r.agents.push_back(std::move(a));
    }
  }

  if (auto it = j.find("subtask_trace"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + ".subtask_trace", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto tpath = path + ".subtask_trace[" + std::to_string(i) + "]";
      SubtaskTraceEntry e;
      e.position = static_cast<int>(non_negative((*it)[i], "position", tpath));
      e.error_count = static_cast<int>(non_negative((*it)[i], "error_count", tpath));
      if (e.position != static_cast<int>(i) + 1) {
        throw SchemaError(tpath + ".position", "positions must run 1, 2, ... without gaps");
      }
      r.subtask_trace.push_back(e);
    }
  }
  if (auto it = j.find("max_position_reached"); it != j.end()) {
    r.max_position_reached = static_cast<int>(non_negative(j, "max_position_reached", path));
  } else {
    r.max_position_reached = static_cast<int>(r.subtask_trace.size());
  }
  if (r.max_position_reached != static_cast<int>(r.subtask_trace.size())) {
    throw SchemaError(path + ".max_position_reached", "must equal the last subtask_trace position");
  }
  return r;
}

json run_record_to_json(const RunRecord& r) {
  json agents = json::array();
  for (const auto& a : r.agents) {
    json calls = json::array();
    for (const auto& c : a.calls) calls.push_back({{"tokens_in", c.tokens_in}, {"tokens_out", c.tokens_out}});
    agents.push_back({{"name", a.name}, {"params_billions", a.params_billions}, {"calls", std::move(calls)}});
  }
  json trace = json::array();
  for (const auto& e : r.subtask_trace) trace.push_back({{"position", e.position}, {"error_count", e.error_count}});
  return {{"task_id", r.task_id},           {"scenario_id", r.scenario_id},
          {"passed", r.passed},             {"agents", std::move(agents)},
          {"subtask_trace", std::move(trace)}, {"max_position_reached", r.max_position_reached}};
}

std::vector<RunRecord> parse_run_log(std::string_view jsonl) {
  std::vector<RunRecord> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(jsonl)) {
    ++line_no;
    auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto path = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(trimmed.begin(), trimmed.end());
    } catch (const json::parse_error& e) {
      throw SchemaError(path, std::string("malformed JSON: ") + e.what());
    }
    out.push_back(run_record_from_json(j, path));
  }
  return out;
}

std::vector<RunRecord> load_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open run log '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_log(ss.str());
}

double round1(double value) { return std::round(value * 10.0) / 10.0; }

double tgc(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyRunSet();
  std::int64_t passed = 0;
  for (const auto& r : records) passed += r.passed ? 1 : 0;
  return percent(passed, static_cast<std::int64_t>(records.size()));
}

double sgc(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyRunSet();
  std::map<std::string, bool> scenario_ok;
  for (const auto& r : records) {
    auto [it, inserted] = scenario_ok.emplace(r.scenario_id, r.passed);
    if (!inserted) it->second = it->second && r.passed;
  }
  std::int64_t ok = 0;
  for (const auto& [id, all_passed] : scenario_ok) ok += all_passed ? 1 : 0;
  return percent(ok, static_cast<std::int64_t>(scenario_ok.size()));
}

ErrorRateTable inference_error_rates(const std::vector<RunRecord>& records, int min_successful) {
  int max_position = 0;
  for (const auto& r : records) {
    if (r.passed) max_position = std::max(max_position, r.max_position_reached);
  }
  ErrorRateTable table;
  for (int i = 1; i <= max_position; ++i) {
    std::int64_t num = 0;
    std::int64_t den = 0;
    for (const auto& r : records) {
      if (!r.passed || r.max_position_reached < i) continue;
      ++den;
      if (r.subtask_trace[static_cast<std::size_t>(i - 1)].error_count > 0) ++num;
    }
    if (den > 0 && den > min_successful) table.rows.push_back({i, num, den, percent(num, den)});
  }
  return table;
}

std::vector<ErrorRateTable> inference_error_rates_joint(const std::vector<std::vector<RunRecord>>& run_sets,
                                                        int min_successful) {
  std::vector<ErrorRateTable> tables;
  for (const auto& rs : run_sets) tables.push_back(inference_error_rates(rs, 0));
  std::set<int> keep;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::set<int> ok;
    for (const auto& row : tables[t].rows) {
      if (row.denominator > min_successful) ok.insert(row.position);
    }
    if (t == 0) {
      keep = std::move(ok);
    } else {
      std::set<int> both;
      std::set_intersection(keep.begin(), keep.end(), ok.begin(), ok.end(), std::inserter(both, both.end()));
      keep = std::move(both);
    }
  }
  for (auto& table : tables) {
    std::erase_if(table.rows, [&](const ErrorRateRow& r) { return keep.count(r.position) == 0; });
  }
  return tables;
}

ErrorRateTable training_error_rates(const std::vector<Trajectory>& corpus) {
  std::size_t max_position = 0;
  for (const auto& t : corpus) {
    max_position = std::max(max_position, t.subtasks.size());
    for (const auto& st : t.subtasks) {
      for (const auto& step : st.steps) {
        if (step.status == StepStatus::unclassified) {
          throw UnclassifiedSteps("task '" + t.task_id + "' has unclassified steps; run classify_steps first");
        }
      }
    }
  }
  ErrorRateTable table;
  for (std::size_t i = 0; i < max_position; ++i) {
    std::int64_t num = 0;
    std::int64_t den = 0;
    for (const auto& t : corpus) {
      if (t.subtasks.size() <= i) continue;
      ++den;
      const auto& steps = t.subtasks[i].steps;
      if (std::any_of(steps.begin(), steps.end(), [](const Step& s) { return s.role == StepRole::executor && s.status == StepStatus::erroneous; })) {
        ++num;
      }
    }
    table.rows.push_back({static_cast<int>(i) + 1, num, den, percent(num, den)});
  }
  return table;
}

TokenStats token_stats(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyRunSet();
  TokenStats s;
  std::vector<double> success;
  std::vector<double> failure;
  for (const auto& r : records) {
    const auto tokens = r.total_tokens();
    s.total_tokens += tokens;
    if (r.passed) {
      s.success_tokens += tokens;
      success.push_back(static_cast<double>(tokens));
    } else {
      failure.push_back(static_cast<double>(tokens));
    }
  }
  s.success_records = success.size();
  s.failure_records = failure.size();
  if (!success.empty()) {
    auto mv = mean_variance(success);
    s.success_mean = mv.mean;
    s.success_variance = mv.variance;
  }
  if (!failure.empty()) {
    auto mv = mean_variance(failure);
    s.failure_mean = mv.mean;
    s.failure_variance = mv.variance;
  }
  // all-zero token counts report a ratio of 0
  s.success_token_ratio_percent = s.total_tokens > 0 ? percent(s.success_tokens, s.total_tokens) : 0.0;
  return s;
}

std::string format_error_rates(const ErrorRateTable& table) {
  std::ostringstream os;
  os << std::setw(8) << "position" << std::setw(11) << "numerator" << std::setw(13) << "denominator"
     << std::setw(9) << "rate%" << '\n';
  for (const auto& r : table.rows) {
    os << std::setw(8) << r.position << std::setw(11) << r.numerator << std::setw(13) << r.denominator
       << std::setw(9) << std::fixed << std::setprecision(1) << r.rate_percent << '\n';
  }
  return os.str();
}

void to_json(json& j, const ErrorRateRow& r) {
  j = {{"position", r.position},
       {"numerator", r.numerator},
       {"denominator", r.denominator},
       {"rate_percent", r.rate_percent}};
}

void to_json(json& j, const ErrorRateTable& t) { j = {{"rows", t.rows}}; }

void to_json(json& j, const TokenStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j = {{"success_mean", opt(s.success_mean)},
       {"success_variance", opt(s.success_variance)},
       {"failure_mean", opt(s.failure_mean)},
       {"failure_variance", opt(s.failure_variance)},
       {"success_token_ratio_percent", s.success_token_ratio_percent},
       {"success_tokens", s.success_tokens},
       {"total_tokens", s.total_tokens},
       {"success_records", s.success_records},
       {"failure_records", s.failure_records}};
}

}  // namespace stc
