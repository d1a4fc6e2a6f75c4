#include "tactbci/session_io.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "config_detail.hpp"

namespace tactbci {

namespace {

using nlohmann::json;

json model_to_json(const SwldaModel& model) {
  return json{{"selected", model.selected},     {"weights", model.weights},
              {"intercept", model.intercept},   {"p_enter", model.p_enter},
              {"p_remove", model.p_remove},     {"max_features", model.max_features},
              {"feature_dim", model.feature_dim}};
}

SwldaModel model_from_json(const json& j) {
  SwldaModel model;
  model.selected = j.at("selected").get<std::vector<int>>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.intercept = j.at("intercept").get<double>();
  model.p_enter = j.at("p_enter").get<double>();
  model.p_remove = j.at("p_remove").get<double>();
  model.max_features = j.at("max_features").get<int>();
  model.feature_dim = j.at("feature_dim").get<std::int64_t>();
  if (model.selected.size() != model.weights.size()) {
    throw std::runtime_error("model: selected and weights lengths differ");
  }
  if (model.feature_dim < 0) throw std::runtime_error("model: negative feature_dim");
  for (int idx : model.selected) {
    if (idx < 0 || idx >= model.feature_dim) {
      throw std::runtime_error("model: selected index out of range");
    }
  }
  return model;
}

json target_to_json(TargetFlag flag) {
  switch (flag) {
    case TargetFlag::kTarget: return json(true);
    case TargetFlag::kNonTarget: return json(false);
    case TargetFlag::kUnknown: break;
  }
  return json(nullptr);
}

TargetFlag target_from_json(const json& j) {
  if (j.is_null()) return TargetFlag::kUnknown;
  if (!j.is_boolean()) throw std::runtime_error("event: target must be true, false or null");
  return j.get<bool>() ? TargetFlag::kTarget : TargetFlag::kNonTarget;
}

const char* effect_name(ActionEffect effect) {
  switch (effect) {
    case ActionEffect::kApplied: return "applied";
    case ActionEffect::kNoOp: return "noop";
    case ActionEffect::kNone: break;
  }
  return "none";
}

ActionEffect effect_from_name(const std::string& name) {
  if (name == "applied") return ActionEffect::kApplied;
  if (name == "noop") return ActionEffect::kNoOp;
  if (name == "none") return ActionEffect::kNone;
  throw std::runtime_error("robot: unknown action effect \"" + name + "\"");
}

json selection_to_json(const SelectionResult& s) {
  return json{{"type", "selection"},
              {"intended", s.intended},
              {"chosen", s.chosen},
              {"scores", s.command_scores},
              {"rounds", s.rounds_used},
              {"tie", s.tie_flag}};
}

SelectionResult selection_from_json(const json& j) {
  SelectionResult s;
  s.intended = j.at("intended").get<CommandId>();
  s.chosen = j.at("chosen").get<CommandId>();
  s.command_scores = j.at("scores").get<std::array<double, kNumCommands>>();
  s.rounds_used = j.at("rounds").get<int>();
  s.tie_flag = j.at("tie").get<bool>();
  return s;
}

[[noreturn]] void fail_version(int version) {
  throw std::runtime_error("unsupported session format version " + std::to_string(version));
}

}  // namespace

std::string current_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void save_session(const SessionRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write session file: " + path);

  json header{{"type", "header"},
              {"format_version", record.format_version},
              {"created_at", record.created_at},
              {"mode", record.mode == SessionMode::kCalibration ? "calibration" : "online"},
              {"seed", record.seed},
              {"config", detail::config_to_json(record.config)},
              {"model", record.has_model ? model_to_json(record.model) : json(nullptr)}};
  out << header.dump() << '\n';

  for (const auto& ev : record.events) {
    out << json{{"type", "event"},
                {"command", ev.command},
                {"onset", ev.onset_sample},
                {"round", ev.round_index},
                {"target", target_to_json(ev.target)}}
               .dump()
        << '\n';
  }
  for (const auto& sel : record.selections) out << selection_to_json(sel).dump() << '\n';
  for (const auto& entry : record.robot_trace) {
    const RobotState& st = entry.state;
    out << json{{"type", "robot"},
                {"command", command_name(entry.command)},
                {"gripper", {st.gripper.x, st.gripper.y}},
                {"holding", st.holding},
                {"object", {st.object.x, st.object.y}},
                {"goal", {st.goal.x, st.goal.y}},
                {"width", st.width},
                {"height", st.height},
                {"effect", effect_name(st.last_action_effect)}}
               .dump()
        << '\n';
  }
  for (std::size_t i = 0; i < record.raw_signals.size(); ++i) {
    const SignalBuffer& buf = record.raw_signals[i];
    out << json{{"type", "raw"},
                {"selection", i},
                {"sample_rate", buf.sample_rate},
                {"channels", buf.channels}}
               .dump()
        << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed while writing session file: " + path);
}

SessionRecord load_session(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open session file: " + path);

  SessionRecord record;
  bool saw_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("session file " + path + " line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    try {
      const std::string type = j.value("type", "");
      if (type == "header") {
        if (saw_header) throw std::runtime_error("duplicate header");
        record.format_version = j.at("format_version").get<int>();
        if (record.format_version != 1) fail_version(record.format_version);
        record.created_at = j.value("created_at", "");
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "calibration") record.mode = SessionMode::kCalibration;
        else if (mode == "online") record.mode = SessionMode::kOnline;
        else throw std::runtime_error("unknown session mode \"" + mode + "\"");
        record.seed = j.at("seed").get<std::uint64_t>();
        record.config = detail::config_from_json(j.at("config"));
        if (j.contains("model") && !j.at("model").is_null()) {
          record.model = model_from_json(j.at("model"));
          record.has_model = true;
        }
        saw_header = true;
        continue;
      }
      if (!saw_header) throw std::runtime_error("first line must be the header");
      if (type == "event") {
        StimulusEvent ev;
        ev.command = j.at("command").get<CommandId>();
        ev.onset_sample = j.at("onset").get<std::int64_t>();
        ev.round_index = j.at("round").get<int>();
        ev.target = target_from_json(j.at("target"));
        if (!valid_command(ev.command)) throw std::runtime_error("event command out of range");
        record.events.push_back(ev);
      } else if (type == "selection") {
        record.selections.push_back(selection_from_json(j));
      } else if (type == "robot") {
        RobotTraceEntry entry;
        entry.command = command_from_name(j.at("command").get<std::string>());
        auto pos = [&](const char* key) {
          const auto arr = j.at(key).get<std::array<int, 2>>();
          return GridPos{arr[0], arr[1]};
        };
        entry.state.gripper = pos("gripper");
        entry.state.holding = j.at("holding").get<bool>();
        entry.state.object = pos("object");
        entry.state.goal = pos("goal");
        entry.state.width = j.at("width").get<int>();
        entry.state.height = j.at("height").get<int>();
        entry.state.last_action_effect = effect_from_name(j.at("effect").get<std::string>());
        record.robot_trace.push_back(entry);
      } else if (type == "raw") {
        SignalBuffer buf;
        buf.sample_rate = j.at("sample_rate").get<double>();
        buf.channels = j.at("channels").get<std::vector<std::vector<double>>>();
        record.raw_signals.push_back(std::move(buf));
      } else {
        throw std::runtime_error("unknown record type \"" + type + "\"");
      }
    } catch (const json::exception& e) {
      throw std::runtime_error("session file " + path + " line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  if (!saw_header) throw std::runtime_error("session file " + path + ": missing header");
  return record;
}

void save_model(const SwldaModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model).dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed while writing model file: " + path);
}

SwldaModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j;
  try {
    in >> j;
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
}

std::vector<SelectionResult> replay(const SessionRecord& record) {
  if (record.format_version != 1) fail_version(record.format_version);

  Config config = record.config;
  config.seed = record.seed;
  config.validate();

  if (record.mode == SessionMode::kCalibration) {
    auto [data, model] = run_calibration(config.simulation(SessionMode::kCalibration));
    if (record.has_model && !(model == record.model)) {
      throw std::runtime_error("replay: regenerated model differs from the stored one");
    }
    return {};
  }

  if (!record.has_model) throw std::runtime_error("replay: online record lacks an embedded model");
  std::vector<CommandId> intents;
  intents.reserve(record.selections.size());
  for (const auto& sel : record.selections) {
    if (!valid_command(sel.intended)) {
      throw std::runtime_error("replay: record is missing intent labels");
    }
    intents.push_back(sel.intended);
  }
  if (intents.empty()) return {};
  const SimulationConfig sim =
      config.simulation(SessionMode::kOnline, static_cast<int>(intents.size()));
  return run_online(sim, record.model, intents);
}

}  // namespace tactbci
