// SPDX-License-Identifier: Apache-2.0

#include "stc/masking.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "stc/errors.hpp"

namespace stc {

using nlohmann::json;

namespace {

constexpr std::string_view kRoleNames[] = {"orchestrator", "executor", "critic"};
constexpr std::string_view kSpeakerNames[] = {"system", "user", "assistant"};
constexpr std::string_view kHistoryNames[] = {"per_subtask", "full_task"};
constexpr std::array kAllRoles = {AgentRole::orchestrator, AgentRole::executor, AgentRole::critic};

bool trainable_status(StepStatus s) { return s == StepStatus::correct || s == StepStatus::self_refined; }

const SubtaskSet& epoch_set(const Trajectory& t, const Schedule& s, int epoch) {
  if (epoch < 0 || epoch >= s.epoch_count()) {
    throw EpochOutOfRange("epoch " + std::to_string(epoch) + " is outside 0.." + std::to_string(s.epoch_count() - 1));
  }
  if (s.subtask_count != static_cast<int>(t.subtasks.size())) {
    throw Error("schedule covers " + std::to_string(s.subtask_count) + " subtasks but task '" + t.task_id +
                "' has " + std::to_string(t.subtasks.size()));
  }
  return s.epochs[static_cast<std::size_t>(epoch)];
}

void require_classified(const Trajectory& t) {
  for (const auto& st : t.subtasks) {
    for (const auto& step : st.steps) {
      if (step.status == StepStatus::unclassified) {
        throw UnclassifiedSteps("task '" + t.task_id + "' subtask " + std::to_string(st.number) + " step " +
                                std::to_string(step.index) + " is unclassified; run classify_steps first");
      }
    }
  }
}

TrainingSequence start_sequence(const Trajectory& t, const Schedule& s, AgentRole role, int epoch,
                                std::string system_text) {
  TrainingSequence seq;
  seq.task_id = t.task_id;
  seq.role = role;
  seq.epoch = epoch;
  seq.strategy = std::string(to_string(s.strategy));
  seq.segments.push_back({Speaker::system, std::move(system_text), false, {}});
  return seq;
}

/// Appends an Executor-view rendering of the subtask's steps.
void append_executor_steps(TrainingSequence& seq, const Subtask& st, bool included) {
  for (const auto& step : st.steps) {
    const SegmentOrigin origin{st.number, step.index};
    if (step.role == StepRole::critic) {
      seq.segments.push_back({Speaker::user, step.action, false, origin});
      continue;
    }
    seq.segments.push_back({Speaker::assistant, render_executor_turn(step), included && trainable_status(step.status),
                            origin});
    if (!step.observation.empty()) seq.segments.push_back({Speaker::user, step.observation, false, origin});
  }
}

std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string_view to_string(AgentRole r) { return kRoleNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(Speaker s) { return kSpeakerNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(HistoryMode m) { return kHistoryNames[static_cast<std::size_t>(m)]; }

HistoryMode parse_history_mode(std::string_view s) {
  if (s == "per_subtask") return HistoryMode::per_subtask;
  if (s == "full_task") return HistoryMode::full_task;
  throw Error("unknown history mode '" + std::string(s) + "' (expected per_subtask or full_task)");
}

std::size_t TrainingSequence::trainable_count() const {
  std::size_t n = 0;
  for (const auto& seg : segments) n += seg.trainable ? 1 : 0;
  return n;
}

std::string render_executor_turn(const Step& step) { return join_plan_and_code(step.thought, step.action); }

std::vector<TrainingSequence> build_orchestrator_examples(const Trajectory& t, const Schedule& s, int epoch) {
  const auto& included = epoch_set(t, s, epoch);
  if (included.empty()) return {};
  const int last = *included.rbegin();

  auto seq = start_sequence(t, s, AgentRole::orchestrator, epoch, t.instruction);
  for (const auto& st : t.subtasks) {
    if (st.number > last) break;
    const SegmentOrigin origin{st.number, 0};
    seq.segments.push_back({Speaker::assistant, st.description, included.count(st.number) > 0, origin});
    if (!st.final_report.empty()) seq.segments.push_back({Speaker::user, st.final_report, false, origin});
  }
  return {std::move(seq)};
}

std::vector<TrainingSequence> build_executor_examples(const Trajectory& t, const Schedule& s, int epoch,
                                                      HistoryMode mode) {
  const auto& included = epoch_set(t, s, epoch);
  require_classified(t);
  if (included.empty()) return {};

  std::vector<TrainingSequence> out;
  if (mode == HistoryMode::per_subtask) {
    for (const auto& st : t.subtasks) {
      if (!included.count(st.number)) continue;
      auto seq = start_sequence(t, s, AgentRole::executor, epoch, st.description);
      seq.segments.front().origin = {st.number, 0};
      append_executor_steps(seq, st, true);
      out.push_back(std::move(seq));
    }
    return out;
  }

  const int last = *included.rbegin();
  auto seq = start_sequence(t, s, AgentRole::executor, epoch, t.instruction);
  for (const auto& st : t.subtasks) {
    if (st.number > last) break;
    seq.segments.push_back({Speaker::user, st.description, false, {st.number, 0}});
    append_executor_steps(seq, st, included.count(st.number) > 0);
  }
  out.push_back(std::move(seq));
  return out;
}

std::vector<TrainingSequence> build_critic_examples(const Trajectory& t, const Schedule& s, int epoch) {
  const auto& included = epoch_set(t, s, epoch);
  std::vector<TrainingSequence> out;
  for (const auto& st : t.subtasks) {
    for (std::size_t j = 0; j < st.steps.size(); ++j) {
      const auto& step = st.steps[j];
      if (step.role != StepRole::critic) continue;
      if (step.status == StepStatus::unclassified) {
        throw UnclassifiedSteps("task '" + t.task_id + "' subtask " + std::to_string(st.number) + " critic step " +
                                std::to_string(step.index) + " is unclassified");
      }
      auto seq = start_sequence(t, s, AgentRole::critic, epoch, t.instruction);
      seq.segments.push_back({Speaker::user, st.description, false, {st.number, 0}});
      for (std::size_t k = 0; k < j; ++k) {
        const auto& prior = st.steps[k];
        const SegmentOrigin origin{st.number, prior.index};
        if (prior.role == StepRole::critic) {
          seq.segments.push_back({Speaker::assistant, prior.action, false, origin});
          continue;
        }
        seq.segments.push_back({Speaker::user, render_executor_turn(prior), false, origin});
        if (!prior.observation.empty()) seq.segments.push_back({Speaker::user, prior.observation, false, origin});
      }
      seq.segments.push_back({Speaker::assistant, step.action,
                              included.count(st.number) > 0 && trainable_status(step.status),
                              {st.number, step.index}});
      out.push_back(std::move(seq));
    }
  }
  return out;
}

json sequence_to_json(const TrainingSequence& seq) {
  json segments = json::array();
  for (const auto& seg : seq.segments) {
    segments.push_back({{"speaker", to_string(seg.speaker)}, {"content", seg.content}, {"trainable", seg.trainable}});
  }
  return {{"task_id", seq.task_id},
          {"role", to_string(seq.role)},
          {"epoch", seq.epoch},
          {"strategy", seq.strategy},
          {"segments", std::move(segments)}};
}

std::string serialize_sequence(const TrainingSequence& seq) {
  return sequence_to_json(seq).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string dataset_file_name(AgentRole role, int epoch) {
  return std::string(to_string(role)) + ".epoch" + std::to_string(epoch) + ".jsonl";
}

std::uint64_t task_seed(std::uint64_t seed, const std::string& task_id) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : task_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

Schedule schedule_for(const Trajectory& t, const EmitOptions& options) {
  ScheduleOptions so;
  so.decrement_mode = options.decrement_mode;
  if (options.seed) so.seed = task_seed(*options.seed, t.task_id);
  return build_schedule(options.strategy, subtask_kinds(t), options.epochs, so);
}

std::string corpus_digest(const std::vector<Trajectory>& corpus) {
  std::string all;
  for (const auto& t : corpus) all += serialize_trajectory(t);
  return sha256_hex(all);
}

EmissionManifest emit_epoch_datasets(const std::vector<Trajectory>& corpus, const EmitOptions& options,
                                     const std::filesystem::path& out_dir) {
  if (options.epochs < 1) throw Error("epoch count must be at least 1");
  if (options.strategy == Strategy::random && !options.seed) throw MissingSeed();

  const auto epochs = static_cast<std::size_t>(options.epochs);
  // buffers[role][epoch]
  std::vector<std::vector<std::string>> buffers(kAllRoles.size(), std::vector<std::string>(epochs));
  std::vector<std::vector<std::size_t>> counts(kAllRoles.size(), std::vector<std::size_t>(epochs, 0));

  for (const auto& t : corpus) {
    try {
      if (t.subtasks.empty()) throw Error("trajectory has no subtasks");
      const auto schedule = schedule_for(t, options);
      for (int e = 0; e < options.epochs; ++e) {
        for (std::size_t r = 0; r < kAllRoles.size(); ++r) {
          std::vector<TrainingSequence> seqs;
          switch (kAllRoles[r]) {
            case AgentRole::orchestrator:
              seqs = build_orchestrator_examples(t, schedule, e);
              break;
            case AgentRole::executor:
              seqs = build_executor_examples(t, schedule, e, options.history_mode);
              break;
            case AgentRole::critic:
              seqs = build_critic_examples(t, schedule, e);
              break;
          }
          for (const auto& seq : seqs) buffers[r][static_cast<std::size_t>(e)] += serialize_sequence(seq);
          counts[r][static_cast<std::size_t>(e)] += seqs.size();
        }
      }
    } catch (const TaskError&) {
      throw;
    } catch (const std::exception& ex) {
      throw TaskError(t.task_id, ex.what());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  EmissionManifest manifest;
  manifest.strategy = options.strategy;
  manifest.epochs = options.epochs;
  manifest.seed = options.strategy == Strategy::random ? options.seed : std::nullopt;
  manifest.history_mode = options.history_mode;
  manifest.roles.assign(kAllRoles.begin(), kAllRoles.end());
  manifest.corpus_digest = corpus_digest(corpus);
  for (std::size_t r = 0; r < kAllRoles.size(); ++r) {
    manifest.counts[std::string(to_string(kAllRoles[r]))] = counts[r];
    for (std::size_t e = 0; e < epochs; ++e) {
      const auto name = dataset_file_name(kAllRoles[r], static_cast<int>(e));
      write_file(out_dir / name, buffers[r][e]);
      manifest.files.push_back(name);
    }
  }
  write_file(out_dir / "manifest.json", json(manifest).dump(2) + "\n");
  return manifest;
}

void to_json(json& j, const EmissionManifest& m) {
  json roles = json::array();
  for (auto r : m.roles) roles.push_back(to_string(r));
  j = {{"strategy", to_string(m.strategy)},
       {"epochs", m.epochs},
       {"history_mode", to_string(m.history_mode)},
       {"roles", std::move(roles)},
       {"counts", m.counts},
       {"files", m.files},
       {"corpus_digest", m.corpus_digest}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
}

}  // namespace stc
