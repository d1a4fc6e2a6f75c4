// tactbci: six-command tactile P300 BCI simulator.
//
// Subcommands: calibrate, run, sweep, evaluate, replay. Progress goes to
// stderr, results to stdout. Exit codes: 0 success, 1 verification or
// decoding failure, 2 usage or config error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tactbci/config.hpp"
#include "tactbci/decoder.hpp"
#include "tactbci/eval.hpp"
#include "tactbci/paradigm.hpp"
#include "tactbci/rng.hpp"
#include "tactbci/robot.hpp"
#include "tactbci/session_io.hpp"
#include "tactbci/swlda.hpp"

namespace {

using namespace tactbci;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "config file path");
  sub->add_option("--seed", opts.seed, "override the config seed");
  sub->add_option("--set", opts.overrides,
                  "override one config key, key=value (repeatable; nested keys dotted)");
}

Config make_config(const CommonOpts& opts) {
  Config config = opts.config_path.empty() ? Config{} : load_config(opts.config_path);
  for (const auto& assignment : opts.overrides) apply_override(config, assignment);
  if (opts.seed) config.seed = *opts.seed;
  config.validate();
  return config;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<CommandId> load_intents(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open intents file: " + path);
  std::vector<CommandId> intents;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string token = trim(line);
    if (token.empty() || token[0] == '#') continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc{} && ptr == token.data() + token.size()) {
      if (!valid_command(value)) {
        throw std::runtime_error("intents file line " + std::to_string(line_no) +
                                 ": command id out of range: " + token);
      }
      intents.push_back(value);
    } else {
      intents.push_back(command_to_id(command_from_name(token)));
    }
  }
  if (intents.empty()) throw std::runtime_error("intents file is empty: " + path);
  return intents;
}

void print_metrics(const Metrics& m) {
  std::printf("selections: %lld\n", static_cast<long long>(m.n_selections));
  std::printf("accuracy: %.4f\n", m.accuracy);
  std::printf("p vs chance: %.4g\n", m.binomial_p_vs_chance);
  std::printf("itr: %.4f bits/selection, %.2f bits/min (%.3f s/selection)\n",
              m.itr_bits_per_selection, m.itr_bits_per_minute, m.seconds_per_selection);
}

void print_confusion(const ConfusionMatrix& cm) {
  std::printf("confusion (rows intended, cols chosen):\n");
  std::printf("%9s", "");
  for (int c = 0; c < kNumCommands; ++c) {
    std::printf(" %8s", command_name(command_from_id(c)));
  }
  std::printf("\n");
  for (int r = 0; r < kNumCommands; ++r) {
    std::printf("%9s", command_name(command_from_id(r)));
    for (int c = 0; c < kNumCommands; ++c) {
      std::printf(" %8lld", static_cast<long long>(
                                cm.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
    }
    std::printf("\n");
  }
}

int cmd_calibrate(const CommonOpts& common, const std::string& model_path,
                  const std::string& out_path, bool record_raw) {
  Config config;
  try {
    config = make_config(common);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  try {
    const SimulationConfig sim = config.simulation(SessionMode::kCalibration);
    std::fprintf(stderr, "calibrating: %d selections x %d rounds, seed %llu\n",
                 sim.plan.n_selections(), sim.plan.rounds_per_selection,
                 static_cast<unsigned long long>(config.seed));

    std::vector<StimulusEvent> events;
    std::vector<SignalBuffer> raw;
    auto [data, model] = run_calibration(sim, &events, record_raw ? &raw : nullptr);

    std::int64_t targets = 0;
    for (int label : data.labels) targets += label > 0 ? 1 : 0;
    std::printf("epochs: %lld (target %lld / nontarget %lld), features: %lld\n",
                static_cast<long long>(data.rows), static_cast<long long>(targets),
                static_cast<long long>(data.rows - targets), static_cast<long long>(data.cols));
    std::printf("features selected: %zu\n", model.selected.size());
    std::printf("training accuracy: %.4f\n", training_accuracy(model, data));

    save_model(model, model_path);

    SessionRecord record;
    record.created_at = current_timestamp();
    record.config = config;
    record.seed = config.seed;
    record.mode = SessionMode::kCalibration;
    record.has_model = true;
    record.model = model;
    record.events = std::move(events);
    if (record_raw) record.raw_signals = std::move(raw);
    save_session(record, out_path);

    std::fprintf(stderr, "model -> %s\nsession -> %s\n", model_path.c_str(), out_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int cmd_run(const CommonOpts& common, const std::string& model_path, const std::string& out_path,
            const std::string& intents_path, bool record_raw) {
  Config config;
  SwldaModel model;
  std::vector<CommandId> intents;
  const bool task_mode = intents_path.empty();
  const TaskSpec task = default_task();
  try {
    config = make_config(common);
    model = load_model(model_path);
    if (task_mode) {
      for (RobotCommand cmd : optimal_script(task)) intents.push_back(command_to_id(cmd));
    } else {
      intents = load_intents(intents_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    const SimulationConfig sim =
        config.simulation(SessionMode::kOnline, static_cast<int>(intents.size()));
    std::fprintf(stderr, "decoding %zu selections (%d rounds each), seed %llu\n", intents.size(),
                 sim.plan.rounds_per_selection, static_cast<unsigned long long>(config.seed));

    std::vector<StimulusEvent> events;
    std::vector<SignalBuffer> raw;
    const std::vector<SelectionResult> results =
        run_online(sim, model, intents, &events, record_raw ? &raw : nullptr);

    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      std::printf("selection %zu: intended %s chosen %s (%s)\n", i,
                  command_name(command_from_id(r.intended)),
                  command_name(command_from_id(r.chosen)),
                  r.intended == r.chosen ? "correct" : "wrong");
    }

    SessionRecord record;
    record.created_at = current_timestamp();
    record.config = config;
    record.seed = config.seed;
    record.mode = SessionMode::kOnline;
    record.has_model = true;
    record.model = model;
    record.events = std::move(events);
    record.selections = results;
    if (record_raw) record.raw_signals = std::move(raw);

    bool task_success = true;
    if (task_mode) {
      std::vector<RobotCommand> decoded;
      for (const auto& r : results) decoded.push_back(command_from_id(r.chosen));
      const TaskRun outcome = run_task(task, decoded);
      for (std::size_t i = 0; i < decoded.size(); ++i) {
        record.robot_trace.push_back({decoded[i], outcome.trace[i]});
      }
      task_success = outcome.success;
      std::fputs(render(outcome.trace.empty() ? task.start : outcome.trace.back()).c_str(),
                 stderr);
      if (task_success) {
        std::printf("task: SUCCESS in %zu selections\n", results.size());
      } else {
        std::printf("task: FAILURE after %zu selections\n", results.size());
      }
    }

    const Metrics metrics = summarize(results, selection_duration(sim.plan));
    print_metrics(metrics);

    save_session(record, out_path);
    std::fprintf(stderr, "session -> %s\n", out_path.c_str());
    return task_mode && !task_success ? 1 : 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int cmd_sweep(const CommonOpts& common, const std::vector<double>& amplitudes, int per_cell,
              const std::string& out_path) {
  Config base;
  try {
    base = make_config(common);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  try {
    const std::vector<int> rounds_axis{1, 3, 15};
    std::string table = "amplitude\trounds\tselections\tcorrect\taccuracy\tci_low\tci_high\n";

    for (std::size_t ai = 0; ai < amplitudes.size(); ++ai) {
      Config cell = base;
      cell.erp.target_amplitude = amplitudes[ai];
      cell.seed = hash_combine(base.seed, 0x5eed0000 + ai);
      cell.validate();

      std::fprintf(stderr, "sweep: calibrating amplitude %g\n", amplitudes[ai]);
      auto [data, model] = run_calibration(cell.simulation(SessionMode::kCalibration));

      std::vector<CommandId> intents(static_cast<std::size_t>(per_cell));
      for (std::size_t i = 0; i < intents.size(); ++i) {
        intents[i] = static_cast<CommandId>(i % kNumCommands);
      }

      for (int rounds : rounds_axis) {
        Config online = cell;
        online.rounds_online = rounds;
        online.seed = hash_combine(cell.seed, static_cast<std::uint64_t>(rounds));
        const auto results =
            run_online(online.simulation(SessionMode::kOnline, per_cell), model, intents);
        std::int64_t correct = 0;
        for (const auto& r : results) correct += r.chosen == r.intended ? 1 : 0;
        const double accuracy =
            static_cast<double>(correct) / static_cast<double>(results.size());
        const auto [lo, hi] = binomial_ci(correct, static_cast<std::int64_t>(results.size()), 0.95);
        char row[160];
        std::snprintf(row, sizeof(row), "%g\t%d\t%zu\t%lld\t%.4f\t%.4f\t%.4f\n", amplitudes[ai],
                      rounds, results.size(), static_cast<long long>(correct), accuracy, lo, hi);
        table += row;
        std::fprintf(stderr, "sweep: amplitude %g rounds %d -> %.4f\n", amplitudes[ai], rounds,
                     accuracy);
      }
    }

    std::fputs(table.c_str(), stdout);
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write sweep table: " + out_path);
      out << table;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int cmd_evaluate(const std::string& in_path) {
  if (!std::filesystem::exists(in_path)) {
    std::fprintf(stderr, "error: no such session file: %s\n", in_path.c_str());
    return 2;
  }
  SessionRecord record;
  try {
    record = load_session(in_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  try {
    if (record.selections.empty()) {
      throw std::invalid_argument("record contains no selections (calibration session?)");
    }
    const SimulationConfig sim = record.config.simulation(
        SessionMode::kOnline, static_cast<int>(record.selections.size()));
    const Metrics metrics = summarize(record.selections, selection_duration(sim.plan));
    print_metrics(metrics);
    print_confusion(confusion(record.selections));
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int cmd_replay(const std::string& in_path) {
  if (!std::filesystem::exists(in_path)) {
    std::fprintf(stderr, "error: no such session file: %s\n", in_path.c_str());
    return 2;
  }
  try {
    const SessionRecord record = load_session(in_path);
    const std::vector<SelectionResult> regenerated = replay(record);
    if (regenerated.size() != record.selections.size()) {
      std::printf("replay mismatch: stored %zu selections, regenerated %zu\n",
                  record.selections.size(), regenerated.size());
      return 1;
    }
    for (std::size_t i = 0; i < regenerated.size(); ++i) {
      if (!(regenerated[i] == record.selections[i])) {
        if (regenerated[i].chosen != record.selections[i].chosen) {
          std::printf("replay mismatch at selection %zu: stored %s, regenerated %s\n", i,
                      command_name(command_from_id(record.selections[i].chosen)),
                      command_name(command_from_id(regenerated[i].chosen)));
        } else {
          std::printf("replay mismatch at selection %zu: scores differ\n", i);
        }
        return 1;
      }
    }
    if (record.mode == SessionMode::kCalibration) {
      std::printf("replay: OK (calibration model verified)\n");
    } else {
      std::printf("replay: OK (%zu selections match)\n", regenerated.size());
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-less tactile P300 BCI simulator"};
  app.require_subcommand(1);

  CommonOpts cal_common;
  std::string cal_model = "model.json";
  std::string cal_out = "calibration.ndjson";
  bool cal_raw = false;
  CLI::App* cal = app.add_subcommand("calibrate", "synthesize a training session and fit a model");
  add_common(cal, cal_common);
  cal->add_option("--model", cal_model, "output model path");
  cal->add_option("--out", cal_out, "output session record path");
  cal->add_flag("--record-raw", cal_raw, "embed raw signals in the session record");

  CommonOpts run_common;
  std::string run_model;
  std::string run_out = "run.ndjson";
  std::string run_intents;
  bool run_raw = false;
  CLI::App* run = app.add_subcommand("run", "decode intents online and drive the robot task");
  add_common(run, run_common);
  run->add_option("--model", run_model, "trained model path")->required();
  run->add_option("--out", run_out, "output session record path");
  run->add_option("--intents", run_intents,
                  "intent list file (command names or ids, one per line); default: task script");
  run->add_flag("--record-raw", run_raw, "embed raw signals in the session record");

  CommonOpts sweep_common;
  std::vector<double> sweep_amplitudes{0.0, 1.0, 2.0, 3.0, 5.0};
  int sweep_n = 200;
  std::string sweep_out;
  CLI::App* sweep =
      app.add_subcommand("sweep", "accuracy table over ERP amplitude x rounds {1,3,15}");
  add_common(sweep, sweep_common);
  sweep->add_option("--amplitudes", sweep_amplitudes, "ERP amplitudes to sweep")
      ->delimiter(',');
  sweep->add_option("--selections", sweep_n, "selections per cell (200 for stable CIs)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "also write the table to this path");

  std::string eval_in;
  CLI::App* evaluate = app.add_subcommand("evaluate", "metrics and confusion from a session record");
  evaluate->add_option("session", eval_in, "session record path")->required();

  std::string replay_in;
  CLI::App* rep = app.add_subcommand("replay", "verify a session record reproduces bit-identically");
  rep->add_option("session", replay_in, "session record path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (cal->parsed()) return cmd_calibrate(cal_common, cal_model, cal_out, cal_raw);
  if (run->parsed()) return cmd_run(run_common, run_model, run_out, run_intents, run_raw);
  if (sweep->parsed()) return cmd_sweep(sweep_common, sweep_amplitudes, sweep_n, sweep_out);
  if (evaluate->parsed()) return cmd_evaluate(eval_in);
  if (rep->parsed()) return cmd_replay(replay_in);
  return 2;
}
