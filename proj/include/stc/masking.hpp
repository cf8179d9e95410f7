#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file masking.hpp
 * @brief Role-specific training sequences with per-message loss flags.
 *
 * Every sequence is a list of chat segments. Only assistant segments can be
 * trainable; a segment is trainable when its subtask is in the epoch's
 * schedule set and, for Executor/Critic turns, when the step is correct or
 * self-refined. Excluded subtasks that precede the last included one stay in
 * the sequence as context; subtasks after it are dropped.
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stc/curriculum.hpp"
#include "stc/trajectory.hpp"

namespace stc {

enum class AgentRole { orchestrator, executor, critic };
enum class Speaker { system, user, assistant };

std::string_view to_string(AgentRole r);
std::string_view to_string(Speaker s);

/// Where a segment came from. Not serialized.
struct SegmentOrigin {
  int subtask = 0;  ///< 0 for task-level segments
  int step = 0;     ///< 0 for subtask-level segments
};

struct Segment {
  Speaker speaker = Speaker::user;
  std::string content;
  bool trainable = false;
  SegmentOrigin origin;
};

struct TrainingSequence {
  std::string task_id;
  AgentRole role = AgentRole::orchestrator;
  int epoch = 0;
  std::string strategy;
  std::vector<Segment> segments;

  std::size_t trainable_count() const;
};

enum class HistoryMode { per_subtask, full_task };

std::string_view to_string(HistoryMode m);
HistoryMode parse_history_mode(std::string_view s);

/// Assistant text of an Executor turn: the thought followed by the fenced code.
std::string render_executor_turn(const Step& step);

std::vector<TrainingSequence> build_orchestrator_examples(const Trajectory& t, const Schedule& s, int epoch);
std::vector<TrainingSequence> build_executor_examples(const Trajectory& t, const Schedule& s, int epoch,
                                                      HistoryMode mode = HistoryMode::full_task);
std::vector<TrainingSequence> build_critic_examples(const Trajectory& t, const Schedule& s, int epoch);

/// `{"epoch","role","segments":[{"content","speaker","trainable"}],"strategy","task_id"}`
nlohmann::json sequence_to_json(const TrainingSequence& seq);
/// Canonical JSONL line (sorted keys, LF-terminated).
std::string serialize_sequence(const TrainingSequence& seq);

struct EmitOptions {
  Strategy strategy = Strategy::ours;
  int epochs = 5;
  std::optional<std::uint64_t> seed;
  HistoryMode history_mode = HistoryMode::full_task;
  DecrementMode decrement_mode = DecrementMode::mirror;
};

struct EmissionManifest {
  Strategy strategy = Strategy::ours;
  int epochs = 0;
  std::optional<std::uint64_t> seed;
  HistoryMode history_mode = HistoryMode::full_task;
  std::vector<AgentRole> roles;
  /// counts[role][epoch] = records written to `<role>.epoch<epoch>.jsonl`
  std::map<std::string, std::vector<std::size_t>> counts;
  std::vector<std::string> files;
  std::string corpus_digest;  ///< SHA-256 over the canonical serializations
};

/// `<role>.epoch<k>.jsonl`
std::string dataset_file_name(AgentRole role, int epoch);

/// Per-task schedule seed for the random strategy: the run seed XOR the
/// 64-bit FNV-1a hash of the task id.
std::uint64_t task_seed(std::uint64_t seed, const std::string& task_id);

/// Schedule for one task under the emission options.
Schedule schedule_for(const Trajectory& t, const EmitOptions& options);

/// SHA-256 hex digest of the concatenated canonical trajectory serializations.
std::string corpus_digest(const std::vector<Trajectory>& corpus);

/// Writes one JSONL file per (role, epoch) plus `manifest.json`.
EmissionManifest emit_epoch_datasets(const std::vector<Trajectory>& corpus, const EmitOptions& options,
                                     const std::filesystem::path& out_dir);

void to_json(nlohmann::json& j, const EmissionManifest& m);

}  // namespace stc
