// SPDX-License-Identifier: Apache-2.0

// Fixture builders and brute-force oracles shared by the unit tests and the
// acceptance binary. Nothing here calls into the code under test except for
// plain data types.

#pragma once

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stc/cost.hpp"
#include "stc/curriculum.hpp"
#include "stc/masking.hpp"
#include "stc/trajectory.hpp"

namespace stc::test {

std::string read_text(const std::filesystem::path& path);
std::filesystem::path data_path(const std::string& name);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

/// Builds a trajectory from one string per subtask, one char per step:
///   c correct, s self_refined, e erroneous, u unclassified (executor)
///   C correct critic, E erroneous critic
/// Every subtask ends with an executor `exit` step appended automatically
/// unless `append_exit` is false; the last subtask calls complete_task.
Trajectory make_task(const std::string& task_id, const std::vector<std::string>& shape, bool append_exit = false);

/// Random classified trajectory: 1..max_subtasks subtasks, 1..max_steps
/// steps each, statuses drawn from independent error flags.
Trajectory random_task(std::mt19937_64& rng, const std::string& task_id, int max_subtasks = 8, int max_steps = 6);

/// (subtask, step) identifiers; step 0 denotes the subtask plan itself.
using SegmentKey = std::pair<int, int>;

/// Trainable segments expected by direct expansion of the two indicators:
/// subtask membership in `included` and, for step-level roles, a status of
/// correct or self_refined.
std::set<SegmentKey> oracle_trainable(const Trajectory& t, const std::set<int>& included, AgentRole role);

/// Collects the origins of trainable segments from built sequences.
std::set<SegmentKey> trainable_keys(const std::vector<TrainingSequence>& seqs);

/// Expected content of a trainable segment, derived straight from the data.
std::string oracle_content(const Trajectory& t, AgentRole role, SegmentKey key);

/// Independent check of schedule invariants; returns human-readable problems.
std::vector<std::string> check_schedule(const Schedule& s, const std::vector<SubtaskKind>& kinds);

/// Brute-force non-dominated set, sorted by flops then id.
std::vector<CostPoint> oracle_front(const std::vector<CostPoint>& points, Effectiveness e);

}  // namespace stc::test
