#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file curriculum.hpp
 * @brief Per-epoch subtask inclusion schedules.
 *
 * A Schedule lists, for every training epoch, the set of subtask numbers
 * whose outputs receive loss. Four strategies are supported:
 *
 * - `ours`: progressive. Starts from two task-specific subtasks, adds the
 *   remaining task-specific subtasks in order with additions back-loaded
 *   onto later growth epochs, then brings in login/completion subtasks.
 *   The final epoch always covers the whole trajectory.
 * - `all`: every subtask in every epoch.
 * - `decrement`: the progressive schedule played backwards.
 * - `random`: every subtask gets a contiguous inclusive epoch range drawn
 *   from a seeded 64-bit LCG (see Lcg64).
 */

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stc/trajectory.hpp"

namespace stc {

enum class Strategy { ours, all, random, decrement };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

/// How `decrement` derives its sets from the progressive schedule.
enum class DecrementMode {
  mirror,     ///< epoch e uses the progressive set of epoch E-1-e
  drop_tail,  ///< same set sizes, but the highest-numbered subtasks leave first
};

using SubtaskSet = std::set<int>;

struct Schedule {
  Strategy strategy = Strategy::ours;
  std::vector<SubtaskSet> epochs;
  std::optional<std::uint64_t> seed;
  int subtask_count = 0;

  int epoch_count() const { return static_cast<int>(epochs.size()); }
  bool includes(int epoch, int subtask) const { return epochs.at(epoch).count(subtask) > 0; }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Knuth's MMIX linear-congruential generator:
///   state' = 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
/// `uniform(n)` advances once and maps the high 32 bits of the new state to
/// [0, n) by multiply-shift: ((state' >> 32) * n) >> 32. The initial state is
/// the seed itself.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  std::uint32_t uniform(std::uint32_t n) {
    return static_cast<std::uint32_t>(((next() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
  }

 private:
  std::uint64_t state_;
};

Schedule build_prost_schedule(const std::vector<SubtaskKind>& kinds, int epochs);

struct ScheduleOptions {
  std::optional<std::uint64_t> seed;
  DecrementMode decrement_mode = DecrementMode::mirror;
};

Schedule build_schedule(Strategy strategy, const std::vector<SubtaskKind>& kinds, int epochs,
                        const ScheduleOptions& options = {});

struct ScheduleViolation {
  std::string code;
  std::optional<int> epoch;
  std::string message;
};

/// Empty iff every invariant for the schedule's strategy holds.
std::vector<ScheduleViolation> verify_schedule(const Schedule& s);

/// One line per epoch: `e<k>: {i,j,...}`.
std::string format_schedule(const Schedule& s);

void to_json(nlohmann::json& j, const Schedule& s);
void to_json(nlohmann::json& j, const ScheduleViolation& v);

}  // namespace stc
