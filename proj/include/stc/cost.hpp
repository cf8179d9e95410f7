#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file cost.hpp
 * @brief Inference FLOPs accounting and cost/effectiveness Pareto fronts.
 *
 * A call to a model with P parameters that processes `in` input and `out`
 * output tokens costs 2 * P * (in + out) FLOPs. Arithmetic is exact in
 * 128-bit integers.
 */

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stc/metrics.hpp"

namespace stc {

using Flops = unsigned __int128;

Flops flops_per_call(std::uint64_t params, std::uint64_t tokens_in, std::uint64_t tokens_out);

/// Decimal digits of an unsigned 128-bit value.
std::string to_decimal(Flops value);
double to_double(Flops value);

/// e.g. format_si(2.24e12, 2, "FLOPs") -> "2.24 TFLOPs".
/// Prefixes: (none), K, M, G, T, P, E, Z, Y.
std::string format_si(double value, int precision = 2, std::string_view unit = "");

struct AgentSpec {
  std::string name;
  std::uint64_t params = 0;
};

struct SystemConfig {
  std::string system_id;
  std::vector<AgentSpec> agents;
};

SystemConfig system_config_from_json(const nlohmann::json& j, const std::string& path = "$");
/// Accepts a single system object, an array of systems, or `{"systems": [...]}`.
std::vector<SystemConfig> load_system_configs(const std::string& path);

struct FlopsSummary {
  Flops total = 0;
  std::size_t records = 0;
  double mean_per_task = 0.0;
};

/// Sums FLOPs over every agent call of every record using the config's
/// parameter counts, and averages per record.
FlopsSummary aggregate_flops(const std::vector<RunRecord>& records, const SystemConfig& config);

struct CostPoint {
  std::string system_id;
  double mean_flops_per_task = 0.0;
  double tgc_percent = 0.0;
  double sgc_percent = 0.0;

  friend bool operator==(const CostPoint&, const CostPoint&) = default;
};

enum class Effectiveness { tgc, sgc };
std::string_view to_string(Effectiveness e);
Effectiveness parse_effectiveness(std::string_view s);

double effectiveness_of(const CostPoint& p, Effectiveness e);

/// q dominates p iff q is at least as effective and at most as costly, with
/// one of the two strict.
bool dominates(const CostPoint& q, const CostPoint& p, Effectiveness e);

/// Non-dominated points sorted by FLOPs ascending, then system_id. Equal
/// points do not dominate each other, so duplicates are all kept.
std::vector<CostPoint> pareto_front(const std::vector<CostPoint>& points, Effectiveness e);

CostPoint cost_point(const std::string& system_id, const std::vector<RunRecord>& records,
                     const SystemConfig& config);

/// `system_id,mean_flops_per_task,tgc_percent,sgc_percent`
std::vector<CostPoint> parse_cost_points_csv(std::string_view csv);
std::vector<CostPoint> load_cost_points(const std::string& path);

/// Adds an `on_front` column for the chosen effectiveness measure.
std::string cost_points_to_csv(const std::vector<CostPoint>& points, Effectiveness e);

void to_json(nlohmann::json& j, const CostPoint& p);

}  // namespace stc
