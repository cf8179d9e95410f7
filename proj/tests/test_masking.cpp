// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "stc/errors.hpp"
#include "stc/masking.hpp"
#include "support.hpp"

using namespace stc;
using stc::test::make_task;
using stc::test::oracle_trainable;
using stc::test::trainable_keys;

namespace {

Schedule fixed(int m, std::vector<SubtaskSet> epochs, Strategy strategy = Strategy::ours) {
  Schedule s;
  s.strategy = strategy;
  s.subtask_count = m;
  s.epochs = std::move(epochs);
  return s;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("orchestrator: first epoch of the six-subtask example") {
  const auto t = make_task("fig", {"c", "c", "c", "c", "c", "c"});
  const auto s = build_prost_schedule(subtask_kinds(t), 5);
  const auto seqs = build_orchestrator_examples(t, s, 0);
  REQUIRE(seqs.size() == 1);
  const auto& seq = seqs[0];
  CHECK(seq.role == AgentRole::orchestrator);
  CHECK(seq.strategy == "ours");
  CHECK(seq.segments.front().speaker == Speaker::system);
  CHECK(seq.segments.front().content == t.instruction);
  CHECK_FALSE(seq.segments.front().trainable);
  // s1 r1 s2 r2 s3 r3
  REQUIRE(seq.segments.size() == 7);
  CHECK_FALSE(seq.segments[1].trainable);
  CHECK(seq.segments[3].trainable);
  CHECK(seq.segments[5].trainable);
  CHECK(seq.segments[3].content == t.subtasks[1].description);
  for (const auto& seg : seq.segments) CHECK(seg.origin.subtask <= 3);

  const auto last = build_orchestrator_examples(t, s, 4)[0];
  CHECK(last.trainable_count() == 6);
}

TEST_CASE("orchestrator: single included subtask") {
  const auto t = make_task("m3", {"c", "c", "c"});
  const auto seqs = build_orchestrator_examples(t, fixed(3, {{2}}), 0);
  CHECK(seqs[0].trainable_count() == 1);
  CHECK(trainable_keys(seqs) == std::set<std::pair<int, int>>{{2, 0}});
  // s1 r1 s2 r2 kept, s3 truncated
  CHECK(seqs[0].segments.size() == 5);
  CHECK_THROWS_AS(build_orchestrator_examples(t, fixed(3, {{2}}), 1), EpochOutOfRange);
  CHECK_THROWS_AS(build_orchestrator_examples(t, fixed(3, {{2}}), -1), EpochOutOfRange);
}

TEST_CASE("executor: erroneous steps stay in context untrained") {
  const auto t = make_task("x", {"c", "esc", "c"});
  const auto seqs = build_executor_examples(t, fixed(3, {{2}}), 0);
  REQUIRE(seqs.size() == 1);
  std::vector<bool> flags;
  for (const auto& seg : seqs[0].segments) {
    if (seg.speaker == Speaker::assistant && seg.origin.subtask == 2) flags.push_back(seg.trainable);
  }
  CHECK(flags == std::vector<bool>{false, true, true});
  // subtask 1 is context only, subtask 3 is truncated
  for (const auto& seg : seqs[0].segments) {
    if (seg.origin.subtask == 1) CHECK_FALSE(seg.trainable);
    CHECK(seg.origin.subtask != 3);
    if (seg.trainable) CHECK(seg.speaker == Speaker::assistant);
  }
}

TEST_CASE("executor: per-subtask mode") {
  const auto t = make_task("ps", {"cc", "ecs", "sC"});
  const auto s = fixed(3, {{2, 3}});
  const auto seqs = build_executor_examples(t, s, 0, HistoryMode::per_subtask);
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[0].segments.front().content == t.subtasks[1].description);
  CHECK(seqs[1].segments.front().content == t.subtasks[2].description);
  // hand count: subtask 2 -> c, s trainable; subtask 3 -> s trainable; critic not an executor turn
  std::size_t n = 0;
  for (const auto& q : seqs) n += q.trainable_count();
  CHECK(n == 3);
  CHECK(trainable_keys(seqs) == oracle_trainable(t, {2, 3}, AgentRole::executor));

  const auto full = build_executor_examples(t, s, 0, HistoryMode::full_task);
  CHECK(full.size() == 1);
  CHECK(trainable_keys(full) == trainable_keys(seqs));
}

TEST_CASE("executor: unclassified steps are rejected") {
  const auto t = make_task("u", {"cu"});
  CHECK_THROWS_AS(build_executor_examples(t, fixed(1, {{1}}), 0), UnclassifiedSteps);
}

TEST_CASE("executor: turn rendering") {
  Step s;
  s.thought = "plan";
  s.action = "print(1)";
  CHECK(render_executor_turn(s) == "plan\n<code>print(1)</code>");
}

TEST_CASE("critic examples") {
  CHECK(build_critic_examples(make_task("nc", {"c", "c", "c"}), fixed(3, {{2, 3}}), 0).empty());

  const auto t = make_task("cr", {"c", "c", "eCs"});
  auto in = build_critic_examples(t, fixed(3, {{2, 3}}), 0);
  REQUIRE(in.size() == 1);
  CHECK(in[0].trainable_count() == 1);
  CHECK(in[0].segments.back().content == t.subtasks[2].steps[1].action);
  CHECK(in[0].segments.back().trainable);
  // context carries the erroneous attempt that the feedback reviews
  bool saw_attempt = false;
  for (const auto& seg : in[0].segments) saw_attempt = saw_attempt || seg.content == t.subtasks[2].steps[0].observation;
  CHECK(saw_attempt);

  auto out = build_critic_examples(t, fixed(3, {{2}}), 0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].trainable_count() == 0);

  const auto bad = make_task("cb", {"E"});
  CHECK(build_critic_examples(bad, fixed(1, {{1}}), 0)[0].trainable_count() == 0);
}

TEST_CASE("empty epoch set yields no orchestrator or executor sequences") {
  const auto t = make_task("e", {"c", "c"});
  const auto s = fixed(2, {{}, {1, 2}}, Strategy::random);
  CHECK(build_orchestrator_examples(t, s, 0).empty());
  CHECK(build_executor_examples(t, s, 0).empty());
}

TEST_CASE("mask oracle equivalence on random corpora") {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 60; ++n) {
    const auto t = stc::test::random_task(rng, "task" + std::to_string(n));
    const auto kinds = subtask_kinds(t);
    ScheduleOptions opt;
    opt.seed = static_cast<std::uint64_t>(n) * 7919u;
    for (auto strategy : {Strategy::ours, Strategy::all, Strategy::random, Strategy::decrement}) {
      const auto s = build_schedule(strategy, kinds, 5, opt);
      for (int e = 0; e < 5; ++e) {
        const auto& S = s.epochs[static_cast<std::size_t>(e)];
        CHECK(trainable_keys(build_orchestrator_examples(t, s, e)) == oracle_trainable(t, S, AgentRole::orchestrator));
        for (auto mode : {HistoryMode::full_task, HistoryMode::per_subtask}) {
          CHECK(trainable_keys(build_executor_examples(t, s, e, mode)) == oracle_trainable(t, S, AgentRole::executor));
        }
        CHECK(trainable_keys(build_critic_examples(t, s, e)) == oracle_trainable(t, S, AgentRole::critic));
      }
    }
  }
}

TEST_CASE("progressive data is monotone and ends equal to all") {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 30; ++n) {
    const auto t = stc::test::random_task(rng, "m" + std::to_string(n));
    const auto ours = build_prost_schedule(subtask_kinds(t), 5);
    const auto all = build_schedule(Strategy::all, subtask_kinds(t), 5);
    std::set<std::pair<int, int>> prev;
    for (int e = 0; e < 5; ++e) {
      const auto keys = trainable_keys(build_executor_examples(t, ours, e));
      CHECK(std::includes(keys.begin(), keys.end(), prev.begin(), prev.end()));
      prev = keys;
    }
    auto last = build_executor_examples(t, ours, 4);
    auto ref = build_executor_examples(t, all, 2);
    REQUIRE(last.size() == ref.size());
    for (std::size_t i = 0; i < last.size(); ++i) {
      last[i].strategy = ref[i].strategy;
      last[i].epoch = ref[i].epoch;
      CHECK(serialize_sequence(last[i]) == serialize_sequence(ref[i]));
    }
  }
}

TEST_CASE("sequence serialization") {
  const auto t = make_task("j", {"c"});
  const auto seq = build_orchestrator_examples(t, fixed(1, {{1}}), 0)[0];
  const auto line = serialize_sequence(seq);
  CHECK(line.back() == '\n');
  CHECK(line.rfind(R"({"epoch":0,"role":"orchestrator","segments":[{"content":)", 0) == 0);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["task_id"] == "j");
  CHECK(j["segments"][1]["trainable"] == true);
  CHECK_FALSE(j["segments"][1].contains("origin"));
}

TEST_CASE("emission: two tasks, all strategy, two epochs") {
  const auto dir = stc::test::scratch_dir("emit-all");
  EmitOptions opt;
  opt.strategy = Strategy::all;
  opt.epochs = 2;
  std::vector<Trajectory> corpus{make_task("a", {"c", "cC"}), make_task("b", {"ec", "c", "c"})};
  const auto m = emit_epoch_datasets(corpus, opt, dir);
  CHECK(m.files.size() == 6);
  CHECK(m.counts.at("orchestrator") == std::vector<std::size_t>{2, 2});
  CHECK(m.counts.at("executor") == std::vector<std::size_t>{2, 2});
  CHECK(m.counts.at("critic") == std::vector<std::size_t>{1, 1});
  for (const auto& f : m.files) {
    const auto lines = lines_of(dir / f);
    const auto role = f.substr(0, f.find('.'));
    const auto epoch = static_cast<std::size_t>(f[f.find("epoch") + 5] - '0');
    CHECK(lines.size() == m.counts.at(role)[epoch]);
  }
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(stc::test::read_text(dir / "manifest.json"));
  CHECK(manifest["corpus_digest"] == corpus_digest(corpus));
  CHECK(manifest["corpus_digest"].get<std::string>().size() == 64);
  const auto first = lines_of(dir / "orchestrator.epoch0.jsonl");
  CHECK(nlohmann::json::parse(first[0])["task_id"] == "a");
  CHECK(nlohmann::json::parse(first[1])["task_id"] == "b");
}

TEST_CASE("emission: empty corpus") {
  const auto dir = stc::test::scratch_dir("emit-empty");
  const auto m = emit_epoch_datasets({}, EmitOptions{}, dir);
  CHECK(m.files.size() == 15);
  for (const auto& f : m.files) CHECK(std::filesystem::file_size(dir / f) == 0);
  CHECK(corpus_digest({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("emission: progressive first epoch trains only subtasks 2 and 3") {
  const auto dir = stc::test::scratch_dir("emit-fig");
  const auto t = make_task("fig", {"c", "cc", "ec", "c", "c", "c"});
  const auto m = emit_epoch_datasets({t}, EmitOptions{}, dir);
  CHECK(m.counts.at("executor")[0] == 1);
  const auto rec = nlohmann::json::parse(lines_of(dir / "executor.epoch0.jsonl").at(0));
  std::set<std::string> trained;
  for (const auto& seg : rec["segments"]) {
    if (seg["trainable"].get<bool>()) trained.insert(seg["content"].get<std::string>());
  }
  std::set<std::string> expected;
  for (auto key : oracle_trainable(t, {2, 3}, AgentRole::executor)) {
    expected.insert(stc::test::oracle_content(t, AgentRole::executor, key));
  }
  CHECK(trained == expected);
  CHECK(trained.size() == 3);
}

TEST_CASE("emission: deterministic, random needs a seed, failures name the task") {
  std::vector<Trajectory> corpus{make_task("a", {"c", "cC", "c"}), make_task("b", {"ec", "c"})};
  EmitOptions opt;
  opt.strategy = Strategy::random;
  opt.seed = 5;
  const auto d1 = stc::test::scratch_dir("emit-det1");
  const auto d2 = stc::test::scratch_dir("emit-det2");
  const auto m1 = emit_epoch_datasets(corpus, opt, d1);
  emit_epoch_datasets(corpus, opt, d2);
  for (const auto& f : m1.files) CHECK(stc::test::read_text(d1 / f) == stc::test::read_text(d2 / f));
  CHECK(task_seed(5, "a") != task_seed(5, "b"));
  CHECK(task_seed(0, "") == 14695981039346656037ULL);

  opt.seed.reset();
  CHECK_THROWS_AS(emit_epoch_datasets(corpus, opt, d1), MissingSeed);

  corpus.push_back(make_task("broken", {"cu"}));
  try {
    emit_epoch_datasets(corpus, EmitOptions{}, d1);
    FAIL("expected TaskError");
  } catch (const TaskError& e) {
    CHECK(e.task_id() == "broken");
  }
}
