// SPDX-License-Identifier: Apache-2.0

#include "stc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "stc/errors.hpp"
#include "text_util.hpp"

namespace stc {

using nlohmann::json;

Flops flops_per_call(std::uint64_t params, std::uint64_t tokens_in, std::uint64_t tokens_out) {
  const Flops tokens = static_cast<Flops>(tokens_in) + static_cast<Flops>(tokens_out);
  constexpr Flops kMax = ~Flops{0};
  if (tokens != 0 && static_cast<Flops>(params) > kMax / 2 / tokens) {
    throw Error("FLOPs count does not fit in 128 bits");
  }
  return Flops{2} * static_cast<Flops>(params) * tokens;
}

std::string to_decimal(Flops value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

double to_double(Flops value) {
  const auto hi = static_cast<std::uint64_t>(value >> 64);
  const auto lo = static_cast<std::uint64_t>(value);
  return std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
}

std::string format_si(double value, int precision, std::string_view unit) {
  static constexpr const char* kPrefixes[] = {"", "K", "M", "G", "T", "P", "E", "Z", "Y"};
  std::size_t idx = 0;
  double v = value;
  while (std::fabs(v) >= 1000.0 && idx + 1 < std::size(kPrefixes)) {
    v /= 1000.0;
    ++idx;
  }
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v << ' ' << kPrefixes[idx] << unit;
  auto s = os.str();
  return std::string(detail::trim_right(s));
}

SystemConfig system_config_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  SystemConfig c;
  auto id = j.find("system_id");
  if (id == j.end() || !id->is_string()) throw SchemaError(path + ".system_id", "expected a string");
  c.system_id = id->get<std::string>();
  auto agents = j.find("agents");
  if (agents == j.end() || !agents->is_array()) throw SchemaError(path + ".agents", "expected an array");
  for (std::size_t i = 0; i < agents->size(); ++i) {
    const auto apath = path + ".agents[" + std::to_string(i) + "]";
    const auto& a = (*agents)[i];
    if (!a.is_object() || !a.contains("name") || !a["name"].is_string()) {
      throw SchemaError(apath + ".name", "expected a string");
    }
    AgentSpec spec;
    spec.name = a["name"].get<std::string>();
    if (auto p = a.find("params"); p != a.end() && p->is_number_unsigned()) {
      spec.params = p->get<std::uint64_t>();
    } else if (p != a.end() && p->is_number_float() && p->get<double>() >= 1.0 &&
               p->get<double>() == std::floor(p->get<double>())) {
      // 7e9 is parsed as a float
      spec.params = static_cast<std::uint64_t>(p->get<double>());
    } else if (auto b = a.find("params_billions"); b != a.end() && b->is_number() && b->get<double>() > 0) {
      spec.params = static_cast<std::uint64_t>(std::llround(b->get<double>() * 1e9));
    } else {
      throw SchemaError(apath + ".params", "expected a positive integer parameter count");
    }
    if (spec.params == 0) throw SchemaError(apath + ".params", "must be positive");
    c.agents.push_back(std::move(spec));
  }
  return c;
}

std::vector<SystemConfig> load_system_configs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open system config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  std::vector<SystemConfig> out;
  const json* list = &doc;
  std::string base = "$";
  if (doc.is_object() && doc.contains("systems")) {
    list = &doc["systems"];
    base = "$.systems";
  }
  if (list->is_array()) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      out.push_back(system_config_from_json((*list)[i], base + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(system_config_from_json(*list, base));
  }
  return out;
}

FlopsSummary aggregate_flops(const std::vector<RunRecord>& records, const SystemConfig& config) {
  if (records.empty()) throw EmptyRunSet();
  std::map<std::string, std::uint64_t> params;
  for (const auto& a : config.agents) params[a.name] = a.params;

  FlopsSummary s;
  for (const auto& r : records) {
    for (const auto& agent : r.agents) {
      auto it = params.find(agent.name);
      if (it == params.end()) throw UnknownAgent(agent.name);
      for (const auto& call : agent.calls) {
        s.total += flops_per_call(it->second, static_cast<std::uint64_t>(call.tokens_in),
                                  static_cast<std::uint64_t>(call.tokens_out));
      }
    }
  }
  s.records = records.size();
  s.mean_per_task = to_double(s.total) / static_cast<double>(s.records);
  return s;
}

std::string_view to_string(Effectiveness e) { return e == Effectiveness::tgc ? "tgc" : "sgc"; }

Effectiveness parse_effectiveness(std::string_view s) {
  if (s == "tgc") return Effectiveness::tgc;
  if (s == "sgc") return Effectiveness::sgc;
  throw Error("unknown effectiveness measure '" + std::string(s) + "' (expected tgc or sgc)");
}

double effectiveness_of(const CostPoint& p, Effectiveness e) {
  return e == Effectiveness::tgc ? p.tgc_percent : p.sgc_percent;
}

bool dominates(const CostPoint& q, const CostPoint& p, Effectiveness e) {
  const double qe = effectiveness_of(q, e);
  const double pe = effectiveness_of(p, e);
  return qe >= pe && q.mean_flops_per_task <= p.mean_flops_per_task &&
         (qe > pe || q.mean_flops_per_task < p.mean_flops_per_task);
}

std::vector<CostPoint> pareto_front(const std::vector<CostPoint>& points, Effectiveness e) {
  if (points.empty()) throw EmptyPointSet();
  std::vector<CostPoint> sorted = points;
  // cheapest first; among equal cost, most effective first
  std::stable_sort(sorted.begin(), sorted.end(), [e](const CostPoint& a, const CostPoint& b) {
    if (a.mean_flops_per_task != b.mean_flops_per_task) return a.mean_flops_per_task < b.mean_flops_per_task;
    return effectiveness_of(a, e) > effectiveness_of(b, e);
  });

  // Sweep: a point survives iff no cheaper-or-equal point beats it. Within a
  // block of equal cost only the block's best effectiveness survives.
  std::vector<CostPoint> front;
  bool have_best = false;
  double best = 0.0;  // best effectiveness among strictly cheaper points
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].mean_flops_per_task == sorted[i].mean_flops_per_task) ++j;
    const double block_best = effectiveness_of(sorted[i], e);
    if (!have_best || block_best > best) {
      for (std::size_t k = i; k < j && effectiveness_of(sorted[k], e) == block_best; ++k) front.push_back(sorted[k]);
      best = block_best;
      have_best = true;
    }
    i = j;
  }
  std::sort(front.begin(), front.end(), [](const CostPoint& a, const CostPoint& b) {
    if (a.mean_flops_per_task != b.mean_flops_per_task) return a.mean_flops_per_task < b.mean_flops_per_task;
    return a.system_id < b.system_id;
  });
  return front;
}

CostPoint cost_point(const std::string& system_id, const std::vector<RunRecord>& records,
                     const SystemConfig& config) {
  return {system_id, aggregate_flops(records, config).mean_per_task, tgc(records), sgc(records)};
}

std::vector<CostPoint> parse_cost_points_csv(std::string_view csv) {
  std::vector<CostPoint> out;
  bool header = true;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(csv)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        cols.emplace_back(detail::trim(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    cols.emplace_back(detail::trim(cur));
    if (header) {
      header = false;
      if (cols.size() < 4 || cols[0] != "system_id" || cols[1] != "mean_flops_per_task" ||
          cols[2] != "tgc_percent" || cols[3] != "sgc_percent") {
        throw SchemaError("line 1", "expected header system_id,mean_flops_per_task,tgc_percent,sgc_percent");
      }
      continue;
    }
    const auto where = "line " + std::to_string(line_no);
    if (cols.size() < 4) throw SchemaError(where, "expected 4 columns");
    CostPoint p;
    p.system_id = cols[0];
    try {
      std::size_t used = 0;
      p.mean_flops_per_task = std::stod(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("trailing characters");
      p.tgc_percent = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing characters");
      p.sgc_percent = std::stod(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw SchemaError(where, "non-numeric value");
    }
    if (p.mean_flops_per_task < 0 || p.tgc_percent < 0 || p.tgc_percent > 100 || p.sgc_percent < 0 ||
        p.sgc_percent > 100) {
      throw SchemaError(where, "value out of range");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<CostPoint> load_cost_points(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open points file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cost_points_csv(ss.str());
}

std::string cost_points_to_csv(const std::vector<CostPoint>& points, Effectiveness e) {
  const auto front = points.empty() ? std::vector<CostPoint>{} : pareto_front(points, e);
  std::ostringstream os;
  os << "system_id,mean_flops_per_task,tgc_percent,sgc_percent,on_front\n";
  for (const auto& p : points) {
    const bool on = std::find(front.begin(), front.end(), p) != front.end();
    os << p.system_id << ',' << std::setprecision(17) << p.mean_flops_per_task << ',' << std::setprecision(4)
       << p.tgc_percent << ',' << p.sgc_percent << ',' << (on ? 1 : 0) << '\n';
  }
  return os.str();
}

void to_json(json& j, const CostPoint& p) {
  j = {{"system_id", p.system_id},
       {"mean_flops_per_task", p.mean_flops_per_task},
       {"mean_flops_si", format_si(p.mean_flops_per_task, 2, "FLOPs")},
       {"tgc_percent", p.tgc_percent},
       {"sgc_percent", p.sgc_percent}};
}

}  // namespace stc
