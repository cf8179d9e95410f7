// SPDX-License-Identifier: Apache-2.0

// Python bindings. Structured values cross the boundary as JSON text and are
// decoded by the pure-Python wrapper in subtask_curriculum/__init__.py.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stc/cli.hpp"
#include "stc/cost.hpp"
#include "stc/curriculum.hpp"
#include "stc/errors.hpp"
#include "stc/masking.hpp"
#include "stc/metrics.hpp"
#include "stc/trajectory.hpp"

namespace py = pybind11;
using namespace stc;

namespace {

std::vector<SubtaskKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<SubtaskKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_subtask_kind(n));
  return kinds;
}

std::string schedule_json(const std::string& strategy, const std::vector<std::string>& kinds, int epochs,
                          std::optional<std::uint64_t> seed, const std::string& decrement_mode) {
  ScheduleOptions opt;
  opt.seed = seed;
  opt.decrement_mode = decrement_mode == "drop_tail" ? DecrementMode::drop_tail : DecrementMode::mirror;
  const auto s = build_schedule(parse_strategy(strategy), parse_kinds(kinds), epochs, opt);
  nlohmann::json j;
  j["schedule"] = s;
  j["violations"] = verify_schedule(s);
  return j.dump();
}

std::string validate_json(const std::string& text, std::size_t max_subtasks, std::size_t max_steps) {
  const auto t = parse_trajectory(text);
  nlohmann::json j = validate_trajectory(t, {max_subtasks, max_steps});
  return j.dump();
}

std::vector<std::string> examples(const std::string& text, const std::string& strategy, int epochs, int epoch,
                                  const std::string& role, std::optional<std::uint64_t> seed,
                                  const std::string& history) {
  auto t = parse_trajectory(text);
  t = classify_subtasks(classify_steps(std::move(t), default_error_patterns()));
  ScheduleOptions opt;
  opt.seed = seed;
  const auto s = build_schedule(parse_strategy(strategy), subtask_kinds(t), epochs, opt);
  std::vector<TrainingSequence> seqs;
  if (role == "orchestrator") {
    seqs = build_orchestrator_examples(t, s, epoch);
  } else if (role == "executor") {
    seqs = build_executor_examples(t, s, epoch, parse_history_mode(history));
  } else if (role == "critic") {
    seqs = build_critic_examples(t, s, epoch);
  } else {
    throw SchemaError("role", "unknown role: " + role);
  }
  std::vector<std::string> out;
  for (const auto& seq : seqs) out.push_back(serialize_sequence(seq));
  return out;
}

std::string error_rates_json(const std::string& jsonl, int min_successful) {
  nlohmann::json j = inference_error_rates(parse_run_log(jsonl), min_successful);
  return j.dump();
}

std::vector<std::string> front_ids(const std::vector<std::tuple<std::string, double, double, double>>& points,
                                   const std::string& effectiveness) {
  std::vector<CostPoint> pts;
  for (const auto& [id, flops, t, s] : points) pts.push_back({id, flops, t, s});
  std::vector<std::string> ids;
  for (const auto& p : pareto_front(pts, parse_effectiveness(effectiveness))) ids.push_back(p.system_id);
  return ids;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of subtask_curriculum";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("canonicalize_trajectory", [](const std::string& text) { return serialize_trajectory(parse_trajectory(text)); },
        py::arg("text"));
  m.def("validate_trajectory", &validate_json, py::arg("text"), py::arg("max_subtasks") = 12,
        py::arg("max_steps_per_subtask") = 15);
  m.def("schedule", &schedule_json, py::arg("strategy"), py::arg("kinds"), py::arg("epochs"),
        py::arg("seed") = py::none(), py::arg("decrement_mode") = "mirror");
  m.def("training_examples", &examples, py::arg("text"), py::arg("strategy"), py::arg("epochs"), py::arg("epoch"),
        py::arg("role"), py::arg("seed") = py::none(), py::arg("history") = "full_task");
  m.def("tgc", [](const std::string& jsonl) { return tgc(parse_run_log(jsonl)); }, py::arg("jsonl"));
  m.def("sgc", [](const std::string& jsonl) { return sgc(parse_run_log(jsonl)); }, py::arg("jsonl"));
  m.def("inference_error_rates", &error_rates_json, py::arg("jsonl"), py::arg("min_successful") = 5);
  m.def("round1", &round1, py::arg("value"));
  m.def("flops_per_call",
        [](std::uint64_t p, std::uint64_t a, std::uint64_t b) { return to_decimal(flops_per_call(p, a, b)); },
        py::arg("params"), py::arg("tokens_in"), py::arg("tokens_out"));
  m.def("pareto_front", &front_ids, py::arg("points"), py::arg("effectiveness") = "tgc");
  m.def("run_cli", &run_cli, py::arg("args"));
}
