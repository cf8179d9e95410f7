// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stc/cli.hpp"
#include "stc/errors.hpp"
#include "support.hpp"

using namespace stc;
using stc::test::data_path;
using stc::test::read_text;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return data_path(name).string(); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("schedule prints the six-subtask progressive schedule") {
  const auto r = call({"schedule", "--subtasks", "6", "--kinds", "login,ts,ts,ts,ts,completion", "--epochs", "5",
                       "--strategy", "ours"});
  CHECK(r.code == cli::kOk);
  const auto j = r.json();
  CHECK(j["schedule"]["epochs"] ==
        nlohmann::json::parse("[[2,3],[2,3],[2,3,4],[2,3,4,5],[1,2,3,4,5,6]]"));
  CHECK(j["violations"].empty());
  CHECK(r.err.find("e0: {2,3}") != std::string::npos);
}

TEST_CASE("schedule flag handling") {
  CHECK(call({"schedule", "--subtasks", "4", "--epochs", "3", "--strategy", "random"}).code == cli::kInputError);
  const auto rnd = call({"schedule", "--subtasks", "4", "--epochs", "3", "--strategy", "random", "--seed", "9"});
  CHECK(rnd.code == cli::kOk);
  CHECK(rnd.json()["schedule"]["seed"] == 9);
  CHECK(call({"schedule", "--subtasks", "3", "--kinds", "login,completion"}).code == cli::kInputError);
  CHECK(call({"schedule", "--kinds", "login,bogus"}).code == cli::kInputError);
  CHECK(call({"schedule", "--subtasks", "6", "--strategy", "decrement", "--decrement-mode", "drop_tail"}).code ==
        cli::kOk);
}

TEST_CASE("usage errors and help") {
  CHECK(call({}).code == cli::kInputError);
  CHECK(call({"frobnicate"}).code == cli::kInputError);
  CHECK(call({"schedule", "--epochs", "notanumber"}).code == cli::kInputError);
  for (const char* sub : {"validate", "schedule", "emit", "metrics", "pareto", "convert", "stats"}) {
    const auto r = call({sub, "--help"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
  CHECK(call({"--help"}).code == cli::kOk);
}

TEST_CASE("validate") {
  const auto good = call({"validate", data("corpus")});
  CHECK(good.code == cli::kOk);
  CHECK(good.json()["tasks"].size() == 2);

  const auto bad = call({"validate", data("bad/no_exit.json")});
  CHECK(bad.code == cli::kFindings);
  CHECK(bad.json()["tasks"][0]["violations"][0]["code"] == "MISSING_EXIT");

  CHECK(call({"validate", data("bad/noncontiguous.json")}).code == cli::kInputError);
  CHECK(call({"validate", data("nope")}).code == cli::kInputError);
  CHECK(call({"validate", data("corpus/task_b.json"), "--max-subtasks", "5"}).code == cli::kFindings);
}

TEST_CASE("emit on the two-task corpus") {
  const auto dir = stc::test::scratch_dir("cli-emit");
  const auto r = call({"emit", "--corpus", data("corpus"), "--out", dir.string(), "--strategy", "all", "--epochs", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto m = r.json();
  CHECK(m["files"].size() == 6);
  CHECK(m["counts"]["orchestrator"] == nlohmann::json::parse("[2,2]"));
  CHECK(m["counts"]["critic"] == nlohmann::json::parse("[1,1]"));
  for (const auto& f : m["files"]) CHECK(fs::exists(dir / f.get<std::string>()));

  // the erroneous first step of task_b subtask 2 is never trainable
  const std::string failed = "List contacts.\n<code>contacts = apis.phone.search_contacts(relationship='roommate')</code>";
  std::ifstream in(dir / "executor.epoch0.jsonl");
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    const auto doc = nlohmann::json::parse(line);
    for (const auto& seg : doc["segments"]) {
      if (seg["content"] != failed) continue;
      found = true;
      CHECK_FALSE(seg["trainable"].get<bool>());
    }
  }
  CHECK(found);

  const auto again = stc::test::scratch_dir("cli-emit2");
  call({"emit", "--corpus", data("corpus"), "--out", again.string(), "--strategy", "all", "--epochs", "2"});
  for (const auto& f : m["files"]) {
    CHECK(read_text(dir / f.get<std::string>()) == read_text(again / f.get<std::string>()));
  }
  CHECK(call({"emit", "--corpus", data("corpus"), "--out", dir.string(), "--strategy", "random"}).code ==
        cli::kInputError);
}

TEST_CASE("config file supplies defaults; flags override") {
  const auto dir = stc::test::scratch_dir("cli-config");
  write(dir / "run.json", R"({"corpus_dir": ")" + data("corpus") + R"(", "output_dir": "out", "epochs": 3,
                                  "strategy": "decrement", "budgets": {"max_subtasks": 5}})");
  const auto cfg = cli::load_config(dir / "run.json");
  CHECK(cfg.epochs == 3);
  CHECK(cfg.strategy == Strategy::decrement);
  CHECK(cfg.budgets.max_subtasks == 5);
  CHECK(cfg.budgets.max_steps_per_subtask == 15);
  CHECK(*cfg.output_dir == dir / "out");
  CHECK(cfg.min_successful == 5);

  const auto r = call({"--config-file", (dir / "run.json").string(), "emit"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["epochs"] == 3);
  CHECK(r.json()["strategy"] == "decrement");
  CHECK(fs::exists(dir / "out" / "manifest.json"));

  const auto o = call({"--config-file", (dir / "run.json").string(), "emit", "--epochs", "2", "--strategy", "all"});
  CHECK(o.json()["epochs"] == 2);
  CHECK(o.json()["strategy"] == "all");

  CHECK(call({"--config-file", (dir / "run.json").string(), "validate"}).code == cli::kFindings);

  write(dir / "bad.json", R"({"epochs": "five"})");
  CHECK_THROWS_AS(cli::load_config(dir / "bad.json"), SchemaError);
  CHECK(call({"--config-file", (dir / "bad.json").string(), "schedule", "--subtasks", "3"}).code == cli::kInputError);
}

TEST_CASE("metrics and stats") {
  const auto r = call({"metrics", "--runs", data("runs/eight_tasks.jsonl")});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["tgc"] == 62.5);
  CHECK(r.json()["sgc"] == 25.0);
  CHECK(call({"metrics", "--runs", data("runs/empty.jsonl")}).code == cli::kInputError);
  CHECK(call({"metrics"}).code == cli::kInputError);

  const auto rates = call({"metrics", "--runs", data("runs/error_rates.jsonl"), "--min-successful", "0"});
  CHECK(rates.json()["inference_error_rates"]["rows"].size() == 4);
  const auto joint = call({"metrics", "--runs", data("runs/error_rates.jsonl"), "--joint-with",
                           data("runs/eight_tasks.jsonl"), "--min-successful", "0"});
  REQUIRE(joint.code == cli::kOk);
  // the eight-task log only reaches position 2
  CHECK(joint.json()["inference_error_rates"]["rows"].size() == 2);

  const auto s = call({"stats", "--runs", data("runs/eight_tasks.jsonl"), "--corpus", data("corpus")});
  REQUIRE(s.code == cli::kOk);
  CHECK(s.json()["token_stats"]["success_token_ratio_percent"] == 62.5);
  CHECK(s.json()["training_error_rates"]["rows"].size() == 6);
}

TEST_CASE("pareto") {
  const auto dir = stc::test::scratch_dir("cli-pareto");
  const auto r = call({"pareto", "--points", data("points.csv"), "--csv", (dir / "out.csv").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.json()["front"].size() == 2);
  CHECK(read_text(dir / "out.csv").find("large,3000000000000,20,15,0") != std::string::npos);
  CHECK(call({"pareto", "--points", data("points.csv"), "--effectiveness", "sgc"}).json()["front"].size() == 3);

  const auto runs = data("runs/eight_tasks.jsonl") + "," + data("runs/error_rates.jsonl");
  const auto fromruns = call({"pareto", "--runs", runs, "--config", data("systems.json")});
  REQUIRE(fromruns.code == cli::kOk);
  CHECK(fromruns.json()["points"][0]["system_id"] == "7-7-7");
  CHECK(fromruns.json()["points"][1]["system_id"] == "14-14-14");
  CHECK(call({"pareto"}).code == cli::kInputError);
  CHECK(call({"pareto", "--runs", data("runs/eight_tasks.jsonl"), "--config", data("systems.json")}).code ==
        cli::kInputError);
}

TEST_CASE("convert reports endpoint failure") {
  const auto dir = stc::test::scratch_dir("cli-convert");
  write(dir / "endpoint.json", R"({"url": "http://127.0.0.1:9/v1/chat", "model": "m", "max_retries": 0,
                                   "request_timeout_seconds": 1})");
  const auto r = call({"convert", "--in", data("single/sa_1.json"), "--endpoint-config", (dir / "endpoint.json").string(),
                       "--out", (dir / "out").string()});
  CHECK(r.code == cli::kEndpointError);
  CHECK(r.json()["tasks"][0]["status"] == "endpoint_error");
  CHECK(call({"convert", "--in", data("single/sa_1.json"), "--out", (dir / "out").string()}).code ==
        cli::kInputError);
}

TEST_CASE("the installed binary runs") {
  const std::string bin = STC_CLI_PATH;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((bin + " metrics --runs " + data("runs/empty.jsonl") + " 2> /dev/null").c_str())) == 2);
}
