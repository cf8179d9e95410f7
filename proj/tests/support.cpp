// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stc::test {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path data_path(const std::string& name) { return fs::path(STC_TEST_DATA) / name; }

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("stc-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

namespace {

Step make_step(int index, char code, int subtask) {
  Step s;
  s.index = index;
  const auto tag = std::to_string(subtask) + "." + std::to_string(index);
  switch (code) {
    case 'C':
    case 'E':
      s.role = StepRole::critic;
      s.action = "feedback " + tag;
      s.status = code == 'C' ? StepStatus::correct : StepStatus::erroneous;
      return s;
    default:
      break;
  }
  s.thought = "think " + tag;
  s.action = "print('" + tag + "')";
  switch (code) {
    case 'c':
      s.status = StepStatus::correct;
      s.observation = "ok " + tag;
      break;
    case 's':
      s.status = StepStatus::self_refined;
      s.observation = "ok " + tag;
      break;
    case 'e':
      s.status = StepStatus::erroneous;
      s.observation = "Traceback (most recent call last):\nNameError: " + tag;
      break;
    case 'u':
      s.status = StepStatus::unclassified;
      s.observation = "ok " + tag;
      break;
    default:
      throw std::invalid_argument(std::string("unknown step code ") + code);
  }
  return s;
}

}  // namespace

Trajectory make_task(const std::string& task_id, const std::vector<std::string>& shape, bool append_exit) {
  Trajectory t;
  t.task_id = task_id;
  t.instruction = "Instruction for " + task_id + ". Supervisor: Ada Lovelace (ada@example.com).";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    Subtask st;
    st.number = static_cast<int>(i) + 1;
    st.description = "subtask " + std::to_string(st.number) + " of " + task_id;
    st.final_report = "report " + std::to_string(st.number);
    int idx = 0;
    for (char c : shape[i]) st.steps.push_back(make_step(++idx, c, st.number));
    const bool last = i + 1 == shape.size();
    if (append_exit) {
      Step exit;
      exit.index = ++idx;
      exit.thought = "done";
      exit.action = last ? "apis.supervisor.complete_task()\nexit" : "exit";
      exit.observation = "";
      exit.status = StepStatus::correct;
      st.steps.push_back(exit);
    }
    t.subtasks.push_back(std::move(st));
  }
  if (!t.subtasks.empty()) {
    const auto m = t.subtasks.size();
    for (std::size_t i = 0; i < m; ++i) {
      t.subtasks[i].kind = m == 1 || i + 1 == m ? SubtaskKind::completion
                           : i == 0             ? SubtaskKind::login
                                                : SubtaskKind::task_specific;
    }
  }
  return t;
}

Trajectory random_task(std::mt19937_64& rng, const std::string& task_id, int max_subtasks, int max_steps) {
  std::uniform_int_distribution<int> m_dist(1, max_subtasks);
  std::uniform_int_distribution<int> n_dist(1, max_steps);
  std::bernoulli_distribution err(0.3);
  std::bernoulli_distribution critic(0.15);
  std::vector<std::string> shape;
  const int m = m_dist(rng);
  for (int i = 0; i < m; ++i) {
    std::string s;
    bool prev_err = false;
    const int n = n_dist(rng);
    for (int k = 0; k < n; ++k) {
      if (critic(rng)) {
        const bool e = err(rng);
        s.push_back(e ? 'E' : 'C');
        prev_err = e;
        continue;
      }
      const bool e = err(rng);
      s.push_back(e ? 'e' : (prev_err ? 's' : 'c'));
      prev_err = e;
    }
    shape.push_back(s);
  }
  return make_task(task_id, shape);
}

std::set<SegmentKey> oracle_trainable(const Trajectory& t, const std::set<int>& included, AgentRole role) {
  std::set<SegmentKey> out;
  for (const auto& st : t.subtasks) {
    const int i = st.number;
    const int in_s = included.count(i) ? 1 : 0;
    if (role == AgentRole::orchestrator) {
      if (in_s) out.insert({i, 0});
      continue;
    }
    for (const auto& step : st.steps) {
      const bool want_role = role == AgentRole::critic ? step.role == StepRole::critic : step.role == StepRole::executor;
      if (!want_role) continue;
      const int good = step.status == StepStatus::correct || step.status == StepStatus::self_refined ? 1 : 0;
      if (in_s * good == 1) out.insert({i, step.index});
    }
  }
  return out;
}

std::set<SegmentKey> trainable_keys(const std::vector<TrainingSequence>& seqs) {
  std::set<SegmentKey> out;
  for (const auto& seq : seqs) {
    for (const auto& seg : seq.segments) {
      if (seg.trainable) out.insert({seg.origin.subtask, seg.origin.step});
    }
  }
  return out;
}

std::string oracle_content(const Trajectory& t, AgentRole role, SegmentKey key) {
  const auto& st = t.subtasks.at(static_cast<std::size_t>(key.first - 1));
  if (role == AgentRole::orchestrator) return st.description;
  const auto& step = st.steps.at(static_cast<std::size_t>(key.second - 1));
  if (role == AgentRole::critic) return step.action;
  return step.thought + "\n<code>" + step.action + "</code>";
}

std::vector<std::string> check_schedule(const Schedule& s, const std::vector<SubtaskKind>& kinds) {
  std::vector<std::string> problems;
  const int m = static_cast<int>(kinds.size());
  const int e = s.epoch_count();
  if (s.subtask_count != m) problems.push_back("subtask_count mismatch");
  if (e < 1) {
    problems.push_back("no epochs");
    return problems;
  }
  std::set<int> full;
  for (int i = 1; i <= m; ++i) full.insert(i);
  std::set<int> seen;
  for (int k = 0; k < e; ++k) {
    for (int x : s.epochs[k]) {
      if (x < 1 || x > m) problems.push_back("out of range at e" + std::to_string(k));
      seen.insert(x);
    }
  }
  if (seen != full) problems.push_back("coverage");

  auto subset = [](const std::set<int>& a, const std::set<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  switch (s.strategy) {
    case Strategy::ours: {
      for (int k = 1; k < e; ++k) {
        if (!subset(s.epochs[k - 1], s.epochs[k])) problems.push_back("not monotone at e" + std::to_string(k));
      }
      if (s.epochs.back() != full) problems.push_back("final not full");
      if (static_cast<int>(s.epochs.front().size()) < std::min(2, m)) problems.push_back("seed too small");
      // task-specific subtasks all present before any other kind, unless
      // fewer than two task-specific subtasks force completion padding
      int ts = 0;
      for (auto k : kinds) ts += k == SubtaskKind::task_specific ? 1 : 0;
      if (m >= 3 && ts >= 2) {
        for (int k = 0; k < e; ++k) {
          bool has_other = false;
          bool all_ts = true;
          for (int i = 1; i <= m; ++i) {
            const bool in = s.epochs[k].count(i) > 0;
            if (kinds[i - 1] == SubtaskKind::task_specific) {
              all_ts = all_ts && in;
            } else {
              has_other = has_other || in;
            }
          }
          if (has_other && !all_ts) problems.push_back("non-task-specific before task-specific at e" + std::to_string(k));
        }
      }
      break;
    }
    case Strategy::decrement:
      for (int k = 1; k < e; ++k) {
        if (!subset(s.epochs[k], s.epochs[k - 1])) problems.push_back("not non-increasing at e" + std::to_string(k));
      }
      if (s.epochs.front() != full) problems.push_back("first not full");
      break;
    case Strategy::all:
      for (int k = 0; k < e; ++k) {
        if (s.epochs[k] != full) problems.push_back("not full at e" + std::to_string(k));
      }
      break;
    case Strategy::random:
      if (!s.seed) problems.push_back("missing seed");
      for (int i = 1; i <= m; ++i) {
        int first = -1;
        int last = -1;
        int count = 0;
        for (int k = 0; k < e; ++k) {
          if (s.epochs[k].count(i)) {
            if (first < 0) first = k;
            last = k;
            ++count;
          }
        }
        if (count == 0 || last - first + 1 != count) problems.push_back("subtask " + std::to_string(i) + " not contiguous");
      }
      break;
  }
  return problems;
}

std::vector<CostPoint> oracle_front(const std::vector<CostPoint>& points, Effectiveness e) {
  auto eff = [e](const CostPoint& p) { return e == Effectiveness::tgc ? p.tgc_percent : p.sgc_percent; };
  std::vector<CostPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      const auto& q = points[j];
      const auto& p = points[i];
      const bool geq = eff(q) >= eff(p) && q.mean_flops_per_task <= p.mean_flops_per_task;
      const bool strict = eff(q) > eff(p) || q.mean_flops_per_task < p.mean_flops_per_task;
      dominated = geq && strict;
    }
    if (!dominated) out.push_back(points[i]);
  }
  std::sort(out.begin(), out.end(), [](const CostPoint& a, const CostPoint& b) {
    if (a.mean_flops_per_task != b.mean_flops_per_task) return a.mean_flops_per_task < b.mean_flops_per_task;
    return a.system_id < b.system_id;
  });
  return out;
}

}  // namespace stc::test
