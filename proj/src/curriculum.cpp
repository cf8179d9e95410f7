// SPDX-License-Identifier: Apache-2.0

#include "stc/curriculum.hpp"

#include <algorithm>
#include <sstream>

#include "stc/errors.hpp"

namespace stc {

namespace {

constexpr std::string_view kStrategyNames[] = {"ours", "all", "random", "decrement"};

SubtaskSet full_set(int m) {
  SubtaskSet s;
  for (int i = 1; i <= m; ++i) s.insert(i);
  return s;
}

Schedule uniform_schedule(Strategy strategy, int m, int epochs) {
  Schedule s;
  s.strategy = strategy;
  s.subtask_count = m;
  s.epochs.assign(static_cast<std::size_t>(epochs), full_set(m));
  return s;
}

std::vector<int> numbers_of(const std::vector<SubtaskKind>& kinds, SubtaskKind kind) {
  std::vector<int> out;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == kind) out.push_back(static_cast<int>(i) + 1);
  }
  return out;
}

bool is_subset(const SubtaskSet& a, const SubtaskSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<std::size_t>(s)]; }

Strategy parse_strategy(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kStrategyNames); ++i) {
    if (kStrategyNames[i] == s) return static_cast<Strategy>(i);
  }
  throw Error("unknown strategy '" + std::string(s) + "' (expected ours, all, random or decrement)");
}

Schedule build_prost_schedule(const std::vector<SubtaskKind>& kinds, int epochs) {
  if (epochs < 1) throw Error("epoch count must be at least 1");
  if (kinds.empty()) throw Error("a schedule needs at least one subtask");
  const int m = static_cast<int>(kinds.size());

  const auto task_specific = numbers_of(kinds, SubtaskKind::task_specific);
  if (m == 1 || task_specific.empty()) return uniform_schedule(Strategy::ours, m, epochs);

  const auto completion = numbers_of(kinds, SubtaskKind::completion);
  const auto login = numbers_of(kinds, SubtaskKind::login);
  const auto other = numbers_of(kinds, SubtaskKind::other_non_task_specific);

  // Seed: first two task-specific subtasks, padded with completion, then
  // login, then any other non-task-specific subtask.
  SubtaskSet seed;
  for (std::size_t i = 0; i < task_specific.size() && seed.size() < 2; ++i) seed.insert(task_specific[i]);
  for (const auto* pool : {&completion, &login, &other}) {
    for (int n : *pool) {
      if (seed.size() >= 2) break;
      seed.insert(n);
    }
  }

  const bool small = m <= 5;
  const int last = epochs - 1;
  // Epoch at which completion subtasks join in the small regime. Falls into
  // the final epoch when there is no room between the seed and the end.
  const int completion_epoch = small && epochs >= 3 ? epochs - 2 : last;
  const int first_phase = std::min(completion_epoch, last);
  // Growth slots are the epochs strictly between the seed epoch and the
  // first non-task-specific phase.
  const int growth = std::max(0, first_phase - 1);

  std::vector<int> pending;
  for (int n : task_specific) {
    if (!seed.count(n)) pending.push_back(n);
  }
  const int additions = static_cast<int>(pending.size());

  std::vector<SubtaskSet> sets(static_cast<std::size_t>(epochs));
  SubtaskSet current = seed;
  sets[0] = current;
  std::size_t next = 0;
  for (int slot = 1; slot <= growth; ++slot) {
    const int base = additions / growth;
    const int extra = slot > growth - additions % growth ? 1 : 0;
    for (int k = 0; k < base + extra && next < pending.size(); ++k) current.insert(pending[next++]);
    sets[static_cast<std::size_t>(slot)] = current;
  }
  for (int e = growth + 1; e < epochs; ++e) {
    if (e == first_phase) {
      // Anything the growth slots could not absorb arrives with the first
      // non-task-specific phase.
      while (next < pending.size()) current.insert(pending[next++]);
      if (small) current.insert(completion.begin(), completion.end());
    }
    if (e == last) current = full_set(m);
    sets[static_cast<std::size_t>(e)] = current;
  }
  if (epochs == 1) sets[0] = full_set(m);

  Schedule s;
  s.strategy = Strategy::ours;
  s.subtask_count = m;
  s.epochs = std::move(sets);
  return s;
}

Schedule build_schedule(Strategy strategy, const std::vector<SubtaskKind>& kinds, int epochs,
                        const ScheduleOptions& options) {
  if (epochs < 1) throw Error("epoch count must be at least 1");
  if (kinds.empty()) throw Error("a schedule needs at least one subtask");
  const int m = static_cast<int>(kinds.size());

  switch (strategy) {
    case Strategy::ours:
      return build_prost_schedule(kinds, epochs);
    case Strategy::all:
      return uniform_schedule(Strategy::all, m, epochs);
    case Strategy::decrement: {
      const auto forward = build_prost_schedule(kinds, epochs);
      Schedule s;
      s.strategy = Strategy::decrement;
      s.subtask_count = m;
      for (int e = 0; e < epochs; ++e) {
        const auto& mirrored = forward.epochs[static_cast<std::size_t>(epochs - 1 - e)];
        if (options.decrement_mode == DecrementMode::mirror) {
          s.epochs.push_back(mirrored);
        } else {
          SubtaskSet head;
          for (int i = 1; i <= static_cast<int>(mirrored.size()); ++i) head.insert(i);
          s.epochs.push_back(std::move(head));
        }
      }
      return s;
    }
    case Strategy::random: {
      if (!options.seed) throw MissingSeed();
      Schedule s;
      s.strategy = Strategy::random;
      s.subtask_count = m;
      s.seed = options.seed;
      s.epochs.assign(static_cast<std::size_t>(epochs), {});
      Lcg64 rng(*options.seed);
      for (int i = 1; i <= m; ++i) {
        const auto a = rng.uniform(static_cast<std::uint32_t>(epochs));
        const auto b = rng.uniform(static_cast<std::uint32_t>(epochs));
        for (auto e = std::min(a, b); e <= std::max(a, b); ++e) s.epochs[e].insert(i);
      }
      return s;
    }
  }
  throw Error("unknown strategy");
}

std::vector<ScheduleViolation> verify_schedule(const Schedule& s) {
  std::vector<ScheduleViolation> out;
  auto add = [&](std::string code, std::optional<int> epoch, std::string msg) {
    out.push_back({std::move(code), epoch, std::move(msg)});
  };
  const int m = s.subtask_count;
  const int epochs = s.epoch_count();
  if (m < 1) add("NO_SUBTASKS", std::nullopt, "subtask_count must be at least 1");
  if (epochs < 1) {
    add("NO_EPOCHS", std::nullopt, "schedule has no epochs");
    return out;
  }
  const auto full = full_set(m);

  SubtaskSet covered;
  for (int e = 0; e < epochs; ++e) {
    for (int n : s.epochs[static_cast<std::size_t>(e)]) {
      if (n < 1 || n > m) add("OUT_OF_RANGE", e, "subtask " + std::to_string(n) + " is outside 1.." + std::to_string(m));
      covered.insert(n);
    }
  }
  for (int n = 1; n <= m; ++n) {
    if (!covered.count(n)) add("COVERAGE", std::nullopt, "subtask " + std::to_string(n) + " never appears");
  }

  switch (s.strategy) {
    case Strategy::ours:
      for (int e = 1; e < epochs; ++e) {
        if (!is_subset(s.epochs[e - 1], s.epochs[e])) add("NOT_MONOTONE", e, "epoch set shrinks");
      }
      if (s.epochs.back() != full) add("FINAL_NOT_FULL", epochs - 1, "final epoch must cover every subtask");
      if (static_cast<int>(s.epochs.front().size()) < std::min(2, m)) {
        add("SEED_TOO_SMALL", 0, "first epoch must include at least min(2, M) subtasks");
      }
      break;
    case Strategy::decrement:
      for (int e = 1; e < epochs; ++e) {
        if (!is_subset(s.epochs[e], s.epochs[e - 1])) add("NOT_MONOTONE", e, "epoch set grows");
      }
      if (s.epochs.front() != full) add("FIRST_NOT_FULL", 0, "first epoch must cover every subtask");
      break;
    case Strategy::all:
      for (int e = 0; e < epochs; ++e) {
        if (s.epochs[e] != full) add("NOT_FULL", e, "every epoch must cover every subtask");
      }
      break;
    case Strategy::random:
      if (!s.seed) add("MISSING_SEED", std::nullopt, "random schedules record their seed");
      for (int n = 1; n <= m; ++n) {
        int first = -1;
        int last = -1;
        int count = 0;
        for (int e = 0; e < epochs; ++e) {
          if (s.epochs[e].count(n)) {
            if (first < 0) first = e;
            last = e;
            ++count;
          }
        }
        if (count > 0 && count != last - first + 1) {
          add("NOT_CONTIGUOUS", std::nullopt, "subtask " + std::to_string(n) + " epochs are not contiguous");
        }
      }
      break;
  }
  return out;
}

std::string format_schedule(const Schedule& s) {
  std::ostringstream os;
  for (int e = 0; e < s.epoch_count(); ++e) {
    os << 'e' << e << ": {";
    bool first = true;
    for (int n : s.epochs[static_cast<std::size_t>(e)]) {
      if (!first) os << ',';
      os << n;
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

void to_json(nlohmann::json& j, const Schedule& s) {
  j = {{"strategy", to_string(s.strategy)}, {"subtask_count", s.subtask_count}, {"epochs", s.epochs}};
  j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const ScheduleViolation& v) {
  j = {{"code", v.code}, {"message", v.message}};
  j["epoch"] = v.epoch ? nlohmann::json(*v.epoch) : nlohmann::json(nullptr);
}

}  // namespace stc
