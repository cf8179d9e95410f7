// SPDX-License-Identifier: Apache-2.0

#include "stc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stc/cost.hpp"
#include "stc/errors.hpp"
#include "stc/masking.hpp"

namespace stc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
}

json parse_json_file(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

std::vector<SubtaskKind> parse_kind_list(const std::string& csv) {
  std::vector<SubtaskKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    kinds.push_back(parse_subtask_kind(item));
  }
  return kinds;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<ErrorPattern> patterns_for(const Config& config, const std::string& flag) {
  if (!flag.empty()) return load_error_patterns(flag);
  if (config.error_pattern_file) return load_error_patterns(config.error_pattern_file->string());
  return default_error_patterns();
}

/// Classifies steps when any is unclassified and subtasks when any lacks a kind.
Trajectory prepare_for_training(Trajectory t, const std::vector<ErrorPattern>& patterns) {
  bool steps_missing = false;
  bool kinds_missing = false;
  for (const auto& st : t.subtasks) {
    kinds_missing = kinds_missing || !st.kind;
    for (const auto& step : st.steps) steps_missing = steps_missing || step.status == StepStatus::unclassified;
  }
  if (steps_missing) t = classify_steps(std::move(t), patterns);
  if (kinds_missing) t = classify_subtasks(std::move(t));
  return t;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2, ' ', false, json::error_handler_t::replace) << '\n'; }

struct Context {
  Config config;
  std::ostream& out;
  std::ostream& err;
};

// ---- subcommands --------------------------------------------------------------

int cmd_validate(Context& ctx, const std::string& corpus_flag, std::optional<std::size_t> max_subtasks,
                 std::optional<std::size_t> max_steps) {
  fs::path corpus;
  if (!corpus_flag.empty()) {
    corpus = corpus_flag;
  } else if (ctx.config.corpus_dir) {
    corpus = *ctx.config.corpus_dir;
  } else {
    throw Error("validate needs a corpus path");
  }
  Budgets budgets = ctx.config.budgets;
  if (max_subtasks) budgets.max_subtasks = *max_subtasks;
  if (max_steps) budgets.max_steps_per_subtask = *max_steps;

  json tasks = json::array();
  bool all_ok = true;
  for (auto& entry : load_corpus(corpus)) {
    auto report = validate_trajectory(entry.trajectory, budgets);
    report.warnings = entry.warnings;
    all_ok = all_ok && report.ok;
    json item = report;
    item["task_id"] = entry.trajectory.task_id;
    item["file"] = entry.file.string();
    tasks.push_back(std::move(item));
    ctx.err << (report.ok ? "ok    " : "FAIL  ") << entry.trajectory.task_id << '\n';
    for (const auto& v : report.violations) {
      ctx.err << "      " << v.code;
      if (v.subtask) ctx.err << " subtask=" << *v.subtask;
      if (v.step) ctx.err << " step=" << *v.step;
      ctx.err << "  " << v.message << '\n';
    }
    for (const auto& w : report.warnings) ctx.err << "      WARN " << w.code << "  " << w.message << '\n';
  }
  print_json(ctx.out, {{"ok", all_ok},
                       {"budgets", {{"max_subtasks", budgets.max_subtasks}, {"max_steps_per_subtask", budgets.max_steps_per_subtask}}},
                       {"tasks", std::move(tasks)}});
  return all_ok ? kOk : kFindings;
}

struct ScheduleArgs {
  int subtasks = 0;
  std::string kinds;
  std::optional<int> epochs;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::string decrement_mode = "mirror";
};

int cmd_schedule(Context& ctx, const ScheduleArgs& a) {
  const int epochs = a.epochs.value_or(ctx.config.epochs);
  const Strategy strategy = a.strategy.empty() ? ctx.config.strategy : parse_strategy(a.strategy);
  std::vector<SubtaskKind> kinds;
  if (!a.kinds.empty()) {
    kinds = parse_kind_list(a.kinds);
    if (a.subtasks != 0 && static_cast<int>(kinds.size()) != a.subtasks) {
      throw Error("--kinds lists " + std::to_string(kinds.size()) + " kinds but --subtasks is " +
                  std::to_string(a.subtasks));
    }
  } else {
    if (a.subtasks < 1) throw Error("schedule needs --subtasks or --kinds");
    Trajectory t;
    for (int i = 1; i <= a.subtasks; ++i) t.subtasks.push_back(Subtask{i, "", std::nullopt, {}, ""});
    kinds = subtask_kinds(classify_subtasks(std::move(t)));
  }
  ScheduleOptions options;
  options.seed = a.seed ? a.seed : ctx.config.seed;
  if (a.decrement_mode == "drop_tail") {
    options.decrement_mode = DecrementMode::drop_tail;
  } else if (a.decrement_mode != "mirror") {
    throw Error("unknown decrement mode '" + a.decrement_mode + "'");
  }
  const auto schedule = build_schedule(strategy, kinds, epochs, options);
  const auto violations = verify_schedule(schedule);

  json kind_names = json::array();
  for (auto k : kinds) kind_names.push_back(to_string(k));
  ctx.err << format_schedule(schedule);
  print_json(ctx.out, {{"schedule", schedule}, {"kinds", kind_names}, {"violations", violations}});
  return violations.empty() ? kOk : kFindings;
}

struct EmitArgs {
  std::string corpus;
  std::string out;
  std::string strategy;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::string history_mode = "full_task";
  std::string decrement_mode = "mirror";
  std::string patterns;
};

int cmd_emit(Context& ctx, const EmitArgs& a) {
  const fs::path corpus = !a.corpus.empty() ? fs::path(a.corpus)
                                             : ctx.config.corpus_dir.value_or(fs::path{});
  const fs::path out_dir = !a.out.empty() ? fs::path(a.out) : ctx.config.output_dir.value_or(fs::path{});
  if (corpus.empty()) throw Error("emit needs --corpus");
  if (out_dir.empty()) throw Error("emit needs --out");

  EmitOptions options;
  options.strategy = a.strategy.empty() ? ctx.config.strategy : parse_strategy(a.strategy);
  options.epochs = a.epochs.value_or(ctx.config.epochs);
  options.seed = a.seed ? a.seed : ctx.config.seed;
  options.history_mode = parse_history_mode(a.history_mode);
  if (a.decrement_mode == "drop_tail") {
    options.decrement_mode = DecrementMode::drop_tail;
  } else if (a.decrement_mode != "mirror") {
    throw Error("unknown decrement mode '" + a.decrement_mode + "'");
  }

  const auto patterns = patterns_for(ctx.config, a.patterns);
  std::vector<Trajectory> trajectories;
  for (auto& entry : load_corpus(corpus)) {
    trajectories.push_back(prepare_for_training(std::move(entry.trajectory), patterns));
  }
  const auto manifest = emit_epoch_datasets(trajectories, options, out_dir);
  for (const auto& [role, counts] : manifest.counts) {
    ctx.err << role << ':';
    for (auto c : counts) ctx.err << ' ' << c;
    ctx.err << '\n';
  }
  print_json(ctx.out, manifest);
  return kOk;
}

std::vector<RunRecord> load_runs(const std::string& path) {
  auto records = load_run_log(path);
  if (records.empty()) throw EmptyRunSet();
  return records;
}

int cmd_metrics(Context& ctx, const std::string& runs, std::optional<int> min_successful,
                const std::string& joint_with) {
  const auto records = load_runs(runs);
  const int threshold = min_successful.value_or(ctx.config.min_successful);
  // with --joint-with, a position survives only if both run sets clear the threshold
  const auto rates = joint_with.empty() ? inference_error_rates(records, threshold)
                                        : inference_error_rates_joint({records, load_runs(joint_with)}, threshold)[0];
  std::set<std::string> scenarios;
  for (const auto& r : records) scenarios.insert(r.scenario_id);
  const double t = tgc(records);
  const double s = sgc(records);
  ctx.err << "TGC " << t << "  SGC " << s << "  (" << records.size() << " records, " << scenarios.size()
          << " scenarios)\n"
          << format_error_rates(rates);
  print_json(ctx.out, {{"records", records.size()},
                       {"scenarios", scenarios.size()},
                       {"tgc", t},
                       {"sgc", s},
                       {"min_successful", threshold},
                       {"inference_error_rates", rates}});
  return kOk;
}

int cmd_stats(Context& ctx, const std::string& runs, const std::string& corpus, const std::string& patterns_flag) {
  const auto records = load_runs(runs);
  const auto stats = token_stats(records);
  json report = {{"token_stats", stats}};
  ctx.err << "success tokens " << stats.success_tokens << " / " << stats.total_tokens << " ("
          << stats.success_token_ratio_percent << "%)\n";
  if (!corpus.empty()) {
    const auto patterns = patterns_for(ctx.config, patterns_flag);
    std::vector<Trajectory> trajectories;
    for (auto& entry : load_corpus(corpus)) {
      trajectories.push_back(prepare_for_training(std::move(entry.trajectory), patterns));
    }
    const auto rates = training_error_rates(trajectories);
    ctx.err << format_error_rates(rates);
    report["training_error_rates"] = rates;
  }
  print_json(ctx.out, report);
  return kOk;
}

int cmd_pareto(Context& ctx, const std::string& points_file, const std::string& runs, const std::string& config_file,
               const std::string& effectiveness, const std::string& csv_out) {
  const auto eff = parse_effectiveness(effectiveness);
  std::vector<CostPoint> points;
  if (!points_file.empty()) {
    if (!runs.empty()) throw Error("use either --points or --runs, not both");
    points = load_cost_points(points_file);
  } else {
    if (runs.empty() || config_file.empty()) throw Error("pareto needs --points, or --runs with --config");
    const auto files = split_csv(runs);
    const auto systems = load_system_configs(config_file);
    if (systems.size() != files.size() && systems.size() != 1) {
      throw Error("--runs names " + std::to_string(files.size()) + " files but the config describes " +
                  std::to_string(systems.size()) + " systems");
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto& system = systems.size() == 1 ? systems[0] : systems[i];
      const auto id = systems.size() == 1 && files.size() > 1 ? system.system_id + " [" + files[i] + "]"
                                                               : system.system_id;
      points.push_back(cost_point(id, load_runs(files[i]), system));
    }
  }
  if (points.empty()) throw EmptyPointSet();
  const auto front = pareto_front(points, eff);
  if (!csv_out.empty()) write_file(csv_out, cost_points_to_csv(points, eff));

  for (const auto& p : points) {
    const bool on = std::find(front.begin(), front.end(), p) != front.end();
    ctx.err << (on ? "* " : "  ") << p.system_id << "  " << format_si(p.mean_flops_per_task, 2, "FLOPs") << "  TGC "
            << p.tgc_percent << "  SGC " << p.sgc_percent << '\n';
  }
  print_json(ctx.out, {{"effectiveness", to_string(eff)}, {"points", points}, {"front", front}});
  return kOk;
}

struct ConvertArgs {
  std::string in;
  std::string endpoint_config;
  std::string out;
  std::string exemplar;
  std::string template_file;
  std::string audit_dir;
};

int cmd_convert(Context& ctx, const ConvertArgs& a) {
  EndpointConfig endpoint;
  if (!a.endpoint_config.empty()) {
    endpoint = load_endpoint_config(a.endpoint_config);
  } else if (ctx.config.endpoint) {
    endpoint = *ctx.config.endpoint;
  } else {
    throw Error("convert needs --endpoint-config");
  }
  const fs::path out_dir = !a.out.empty() ? fs::path(a.out) : ctx.config.output_dir.value_or(fs::path{});
  if (out_dir.empty()) throw Error("convert needs --out");
  if (a.in.empty()) throw Error("convert needs --in");

  std::vector<SingleAgentTrajectory> inputs;
  std::vector<fs::path> files;
  if (fs::is_directory(a.in)) {
    for (const auto& e : fs::directory_iterator(a.in)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(a.in);
  }
  for (const auto& f : files) {
    try {
      inputs.push_back(parse_single_agent(read_file(f)));
    } catch (const SchemaError& e) {
      throw SchemaError(f.string() + " " + e.path(), e.what());
    }
  }

  ConvertOptions options;
  options.exemplar = a.exemplar.empty() ? default_exemplar() : read_file(a.exemplar);
  options.model = endpoint.model;
  options.max_retries = endpoint.max_retries;
  if (!a.template_file.empty()) options.template_text = read_file(a.template_file);
  options.audit_dir = a.audit_dir.empty() ? out_dir / "audit" : fs::path(a.audit_dir);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  HttpChatClient client(endpoint);
  const auto items = convert_all(inputs, client, options, endpoint.max_concurrent_requests);

  json report = json::array();
  bool endpoint_failed = false;
  bool findings = false;
  for (const auto& item : items) {
    json j = {{"task_id", item.task_id}};
    switch (item.status) {
      case BatchItem::Status::ok:
        j["status"] = "ok";
        break;
      case BatchItem::Status::not_preserved:
        j["status"] = "not_preserved";
        findings = true;
        break;
      case BatchItem::Status::conversion_failed:
        j["status"] = "conversion_failed";
        findings = true;
        break;
      case BatchItem::Status::endpoint_error:
        j["status"] = "endpoint_error";
        endpoint_failed = true;
        break;
    }
    if (item.result) j["attempts"] = item.result->attempts;
    if (item.preservation) j["preservation"] = *item.preservation;
    if (!item.error.empty()) j["error"] = item.error;
    if (item.status == BatchItem::Status::ok) {
      const auto name = item.task_id + ".json";
      write_file(out_dir / name, serialize_trajectory(item.result->trajectory));
      j["file"] = name;
    } else {
      ctx.err << "skipped " << item.task_id << ": " << j["status"].get<std::string>()
              << (item.error.empty() ? "" : " (" + item.error + ")") << '\n';
    }
    report.push_back(std::move(j));
  }
  print_json(ctx.out, {{"converted", std::count_if(items.begin(), items.end(),
                                                    [](const BatchItem& i) { return i.status == BatchItem::Status::ok; })},
                       {"total", items.size()},
                       {"tasks", std::move(report)}});
  if (endpoint_failed) return kEndpointError;
  return findings ? kFindings : kOk;
}

}  // namespace

// ---- config / corpus ----------------------------------------------------------

Config load_config(const fs::path& path) {
  const auto doc = parse_json_file(path);
  if (!doc.is_object()) throw SchemaError(path.string(), "config must be a JSON object");
  const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  auto str = [&](const char* key) -> std::optional<std::string> {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(std::string("$.") + key, "expected a string");
    return it->get<std::string>();
  };
  auto integer = [&](const json& obj, const char* key, const std::string& path) -> std::optional<long long> {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
    return it->get<long long>();
  };

  Config c;
  if (auto v = str("corpus_dir")) c.corpus_dir = resolve(*v);
  if (auto v = str("output_dir")) c.output_dir = resolve(*v);
  if (auto v = str("error_pattern_file")) c.error_pattern_file = resolve(*v);
  if (auto v = str("strategy")) c.strategy = parse_strategy(*v);
  if (auto v = integer(doc, "epochs", "$")) {
    if (*v < 1) throw SchemaError("$.epochs", "must be >= 1");
    c.epochs = static_cast<int>(*v);
  }
  if (auto it = doc.find("seed"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw SchemaError("$.seed", "expected a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  if (auto v = integer(doc, "min_successful", "$")) c.min_successful = static_cast<int>(*v);
  if (auto it = doc.find("budgets"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("$.budgets", "expected an object");
    if (auto v = integer(*it, "max_subtasks", "$.budgets")) c.budgets.max_subtasks = static_cast<std::size_t>(*v);
    if (auto v = integer(*it, "max_steps_per_subtask", "$.budgets")) {
      c.budgets.max_steps_per_subtask = static_cast<std::size_t>(*v);
    }
  }
  if (auto it = doc.find("endpoint"); it != doc.end() && !it->is_null()) {
    if (it->is_string()) {
      c.endpoint = load_endpoint_config(resolve(it->get<std::string>()).string());
    } else {
      c.endpoint = endpoint_config_from_json(*it);
    }
  }
  return c;
}

std::vector<CorpusEntry> load_corpus(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw IoError("corpus path '" + path.string() + "' does not exist");
  }
  std::vector<CorpusEntry> out;
  for (const auto& f : files) {
    ParseResult parsed;
    try {
      parsed = parse_trajectory_report(read_file(f));
    } catch (const SchemaError& e) {
      throw SchemaError(f.string() + " " + e.path(), e.what());
    }
    if (parsed.trajectory.task_id.empty()) parsed.trajectory.task_id = f.stem().string();
    out.push_back({f, std::move(parsed.trajectory), std::move(parsed.warnings)});
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curriculum training-data builder and agent-run analysis"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config-file", config_path, "JSON run configuration; flags override its values");

  std::string validate_corpus;
  std::optional<std::size_t> max_subtasks;
  std::optional<std::size_t> max_steps;
  auto* validate = app.add_subcommand("validate", "Check trajectories against structure and turn budgets");
  validate->add_option("corpus", validate_corpus, "Trajectory file or directory of *.json files");
  validate->add_option("--max-subtasks", max_subtasks, "Subtask budget (default 12)");
  validate->add_option("--max-steps", max_steps, "Executor step budget per subtask (default 15)");

  ScheduleArgs sched;
  auto* schedule = app.add_subcommand("schedule", "Print the per-epoch subtask sets for a strategy");
  schedule->add_option("--subtasks", sched.subtasks, "Number of subtasks M");
  schedule->add_option("--kinds", sched.kinds, "Comma-separated kinds: login, ts, completion, other");
  schedule->add_option("--epochs", sched.epochs, "Number of epochs E (default 5)");
  schedule->add_option("--strategy", sched.strategy, "ours | all | random | decrement");
  schedule->add_option("--seed", sched.seed, "Seed for the random strategy");
  schedule->add_option("--decrement-mode", sched.decrement_mode, "mirror | drop_tail");

  EmitArgs emit_args;
  auto* emit = app.add_subcommand("emit", "Write per-role, per-epoch JSONL training datasets");
  emit->add_option("--corpus", emit_args.corpus, "Trajectory file or directory");
  emit->add_option("--out", emit_args.out, "Output directory");
  emit->add_option("--strategy", emit_args.strategy, "ours | all | random | decrement");
  emit->add_option("--epochs", emit_args.epochs, "Number of epochs E (default 5)");
  emit->add_option("--seed", emit_args.seed, "Seed for the random strategy");
  emit->add_option("--history-mode", emit_args.history_mode, "full_task | per_subtask");
  emit->add_option("--decrement-mode", emit_args.decrement_mode, "mirror | drop_tail");
  emit->add_option("--patterns", emit_args.patterns, "Error pattern file");

  std::string metrics_runs;
  std::optional<int> min_successful;
  auto* metrics = app.add_subcommand("metrics", "TGC, SGC and per-position error rates of a run log");
  metrics->add_option("--runs", metrics_runs, "Run-log JSONL")->required();
  metrics->add_option("--min-successful", min_successful, "Drop positions reached by this many tasks or fewer");
  std::string joint_with;
  metrics->add_option("--joint-with", joint_with, "Second run log; keep positions that clear the threshold in both");

  std::string points_file;
  std::string pareto_runs;
  std::string pareto_config;
  std::string effectiveness = "tgc";
  std::string csv_out;
  auto* pareto = app.add_subcommand("pareto", "FLOPs versus effectiveness Pareto front");
  pareto->add_option("--points", points_file, "CSV of cost points");
  pareto->add_option("--runs", pareto_runs, "Comma-separated run logs, one per system");
  pareto->add_option("--config", pareto_config, "System config JSON (agents and parameter counts)");
  pareto->add_option("--effectiveness", effectiveness, "tgc | sgc");
  pareto->add_option("--csv", csv_out, "Also write the points with an on_front column to this CSV");

  ConvertArgs conv;
  auto* convert_cmd = app.add_subcommand("convert", "Convert single-agent trajectories through a chat endpoint");
  convert_cmd->add_option("--in", conv.in, "Single-agent trajectory file or directory");
  convert_cmd->add_option("--endpoint-config", conv.endpoint_config, "Endpoint config JSON");
  convert_cmd->add_option("--out", conv.out, "Output directory");
  convert_cmd->add_option("--exemplar", conv.exemplar, "Exemplar multi-agent trajectory text");
  convert_cmd->add_option("--template", conv.template_file, "Prompt template override");
  convert_cmd->add_option("--audit-dir", conv.audit_dir, "Transcript directory (default <out>/audit)");

  std::string stats_runs;
  std::string stats_corpus;
  std::string stats_patterns;
  auto* stats = app.add_subcommand("stats", "Token statistics of a run log");
  stats->add_option("--runs", stats_runs, "Run-log JSONL")->required();
  stats->add_option("--corpus", stats_corpus, "Also report training error rates for this corpus");
  stats->add_option("--patterns", stats_patterns, "Error pattern file for --corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    Context ctx{config_path.empty() ? Config{} : load_config(config_path), out, err};
    if (*validate) return cmd_validate(ctx, validate_corpus, max_subtasks, max_steps);
    if (*schedule) return cmd_schedule(ctx, sched);
    if (*emit) return cmd_emit(ctx, emit_args);
    if (*metrics) return cmd_metrics(ctx, metrics_runs, min_successful, joint_with);
    if (*pareto) return cmd_pareto(ctx, points_file, pareto_runs, pareto_config, effectiveness, csv_out);
    if (*convert_cmd) return cmd_convert(ctx, conv);
    if (*stats) return cmd_stats(ctx, stats_runs, stats_corpus, stats_patterns);
  } catch (const EndpointError& e) {
    err << "endpoint error: " << e.what() << '\n';
    return kEndpointError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("stc");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace stc::cli
