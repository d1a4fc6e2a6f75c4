#include "tactbci/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "config_detail.hpp"
#include "tactbci/paradigm.hpp"

namespace tactbci {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& reason) {
  throw std::invalid_argument("config: key \"" + key + "\" " + reason);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) bad_key(key, "must be a number");
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& key) {
  if (!v.is_number()) bad_key(key, "must be an integer");
  const double d = v.get<double>();
  if (d != std::floor(d) || std::abs(d) > 9.0e15) bad_key(key, "must be an integer");
  return std::llround(d);
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long n = as_integer(v, key);
  if (n < 0) bad_key(key, "must be non-negative");
  return static_cast<std::uint64_t>(n);
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

namespace detail {

void set_config_key(Config& config, const std::string& key, const json& value) {
  if (key == "noise" || key == "erp") {
    if (!value.is_object()) bad_key(key, "must be an object");
    for (const auto& [sub, sval] : value.items()) set_config_key(config, key + "." + sub, sval);
    return;
  }

  if (key == "sample_rate") config.sample_rate = as_double(value, key);
  else if (key == "hp") config.hp = as_double(value, key);
  else if (key == "lp") config.lp = as_double(value, key);
  else if (key == "notch") {
    if (!value.is_array() || value.size() != 2) bad_key(key, "must be an array of two numbers");
    config.notch = {as_double(value[0], key), as_double(value[1], key)};
  } else if (key == "epoch_ms") config.epoch_ms = as_double(value, key);
  else if (key == "decimation") config.decimation = static_cast<int>(as_integer(value, key));
  else if (key == "stimulus_ms") config.stimulus_ms = static_cast<int>(as_integer(value, key));
  else if (key == "isi_ms") config.isi_ms = static_cast<int>(as_integer(value, key));
  else if (key == "rounds_online") config.rounds_online = static_cast<int>(as_integer(value, key));
  else if (key == "rounds_calibration")
    config.rounds_calibration = static_cast<int>(as_integer(value, key));
  else if (key == "n_commands") config.n_commands = static_cast<int>(as_integer(value, key));
  else if (key == "p_enter") config.p_enter = as_double(value, key);
  else if (key == "p_remove") config.p_remove = as_double(value, key);
  else if (key == "max_features") config.max_features = static_cast<int>(as_integer(value, key));
  else if (key == "seed") config.seed = as_seed(value, key);
  else if (key == "inter_selection_gap_ms")
    config.inter_selection_gap_ms = static_cast<int>(as_integer(value, key));
  else if (key == "calibration_targets") {
    if (!value.is_array() || value.empty()) bad_key(key, "must be a non-empty array");
    config.calibration_targets.clear();
    for (const auto& item : value) {
      config.calibration_targets.push_back(static_cast<CommandId>(as_integer(item, key)));
    }
  } else if (key == "noise.background_rms") config.noise.background_rms = as_double(value, key);
  else if (key == "noise.spectral_slope") config.noise.spectral_slope = as_double(value, key);
  else if (key == "noise.mains_freq") config.noise.mains_freq = as_double(value, key);
  else if (key == "noise.mains_amplitude") config.noise.mains_amplitude = as_double(value, key);
  else if (key == "erp.target_amplitude") config.erp.target_amplitude = as_double(value, key);
  else if (key == "erp.latency_mean_ms") config.erp.latency_mean_ms = as_double(value, key);
  else if (key == "erp.latency_jitter_sd_ms")
    config.erp.latency_jitter_sd_ms = as_double(value, key);
  else if (key == "erp.width_sd_ms") config.erp.width_sd_ms = as_double(value, key);
  else if (key == "erp.nontarget_scale") config.erp.nontarget_scale = as_double(value, key);
  else if (key == "erp.spatial_weights") {
    if (!value.is_array() || value.size() != static_cast<std::size_t>(kNumChannels)) {
      bad_key(key, "must be an array of 8 numbers");
    }
    for (int i = 0; i < kNumChannels; ++i) {
      config.erp.spatial_weights[static_cast<std::size_t>(i)] =
          as_double(value[static_cast<std::size_t>(i)], key);
    }
  } else {
    throw std::invalid_argument("config: unknown key \"" + key + "\"");
  }
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  Config config;
  for (const auto& [key, value] : j.items()) set_config_key(config, key, value);
  config.validate();
  return config;
}

json config_to_json(const Config& c) {
  json j;
  j["sample_rate"] = c.sample_rate;
  j["hp"] = c.hp;
  j["lp"] = c.lp;
  j["notch"] = c.notch;
  j["epoch_ms"] = c.epoch_ms;
  j["decimation"] = c.decimation;
  j["stimulus_ms"] = c.stimulus_ms;
  j["isi_ms"] = c.isi_ms;
  j["rounds_online"] = c.rounds_online;
  j["rounds_calibration"] = c.rounds_calibration;
  j["n_commands"] = c.n_commands;
  j["p_enter"] = c.p_enter;
  j["p_remove"] = c.p_remove;
  j["max_features"] = c.max_features;
  j["seed"] = c.seed;
  j["inter_selection_gap_ms"] = c.inter_selection_gap_ms;
  j["calibration_targets"] = c.calibration_targets;
  j["noise"] = {{"background_rms", c.noise.background_rms},
                {"spectral_slope", c.noise.spectral_slope},
                {"mains_freq", c.noise.mains_freq},
                {"mains_amplitude", c.noise.mains_amplitude}};
  j["erp"] = {{"target_amplitude", c.erp.target_amplitude},
              {"latency_mean_ms", c.erp.latency_mean_ms},
              {"latency_jitter_sd_ms", c.erp.latency_jitter_sd_ms},
              {"width_sd_ms", c.erp.width_sd_ms},
              {"nontarget_scale", c.erp.nontarget_scale},
              {"spatial_weights", c.erp.spatial_weights}};
  return j;
}

}  // namespace detail

void Config::validate() const {
  if (!std::isfinite(sample_rate) || sample_rate < 256.0) {
    throw std::invalid_argument("config: \"sample_rate\" must be at least 256");
  }
  if (!std::isfinite(hp) || hp <= 0.0) {
    throw std::invalid_argument("config: \"hp\" must be positive");
  }
  if (!std::isfinite(lp) || lp <= hp || lp >= sample_rate / 2.0) {
    throw std::invalid_argument("config: \"lp\" must lie between \"hp\" and half the sample rate");
  }
  if (!(notch[0] < notch[1])) {
    throw std::invalid_argument("config: \"notch\" bounds must be ordered low < high");
  }
  if (notch[0] <= hp || notch[1] >= lp) {
    throw std::invalid_argument("config: \"notch\" band must lie inside the pass band");
  }
  if (!std::isfinite(epoch_ms) || epoch_ms <= 0.0) {
    throw std::invalid_argument("config: \"epoch_ms\" must be positive");
  }
  const auto window = epoch_samples(sample_rate, epoch_ms);
  if (decimation < 1) throw std::invalid_argument("config: \"decimation\" must be at least 1");
  if (static_cast<std::size_t>(decimation) > window) {
    throw std::invalid_argument("config: \"decimation\" exceeds the epoch sample count");
  }
  if (stimulus_ms <= 0) throw std::invalid_argument("config: \"stimulus_ms\" must be positive");
  if (isi_ms < 0) throw std::invalid_argument("config: \"isi_ms\" must be non-negative");
  if (std::lround((stimulus_ms + isi_ms) / 1000.0 * sample_rate) < 1) {
    throw std::invalid_argument(
        "config: \"stimulus_ms\" + \"isi_ms\" spans less than one sample at this rate");
  }
  if (rounds_online < 1) throw std::invalid_argument("config: \"rounds_online\" must be at least 1");
  if (rounds_calibration < 1) {
    throw std::invalid_argument("config: \"rounds_calibration\" must be at least 1");
  }
  if (n_commands != kNumCommands) {
    throw std::invalid_argument("config: \"n_commands\" must be 6 (fixed command set)");
  }
  if (!(p_enter > 0.0) || !(p_enter <= p_remove) || !(p_remove < 1.0)) {
    throw std::invalid_argument(
        "config: \"p_enter\" and \"p_remove\" must satisfy 0 < p_enter <= p_remove < 1");
  }
  if (max_features < 0) throw std::invalid_argument("config: \"max_features\" must be >= 0");
  if (inter_selection_gap_ms < 0) {
    throw std::invalid_argument("config: \"inter_selection_gap_ms\" must be non-negative");
  }
  if (calibration_targets.empty()) {
    throw std::invalid_argument("config: \"calibration_targets\" must be non-empty");
  }
  for (CommandId c : calibration_targets) {
    if (!valid_command(c)) {
      throw std::invalid_argument("config: \"calibration_targets\" entries must be in [0, 6)");
    }
  }
  if (!std::isfinite(noise.mains_freq) || noise.mains_freq <= 0.0) {
    throw std::invalid_argument("config: \"noise.mains_freq\" must be positive");
  }
  try {
    noise.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: \"noise\": ") + e.what());
  }
  try {
    erp.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: \"erp\": ") + e.what());
  }
}

SimulationConfig Config::simulation(SessionMode mode, int online_selections) const {
  SimulationConfig sim;
  sim.layout = ChannelLayout::parietal_default();
  sim.noise = noise;
  sim.erp = erp;

  SessionPlan plan;
  if (mode == SessionMode::kCalibration) {
    plan = SessionPlan::calibration_default(rounds_calibration);
    plan.calibration_targets = calibration_targets;
  } else {
    plan = SessionPlan::online(online_selections, rounds_online);
  }
  plan.sample_rate = sample_rate;
  plan.stimulus_ms = stimulus_ms;
  plan.isi_ms = isi_ms;
  plan.inter_selection_gap_ms = inter_selection_gap_ms;
  sim.plan = plan;

  sim.sample_rate = sample_rate;
  sim.high_pass_hz = hp;
  sim.low_pass_hz = lp;
  sim.notch_low_hz = notch[0];
  sim.notch_high_hz = notch[1];
  sim.epoch_ms = epoch_ms;
  sim.decimation = decimation;
  sim.swlda.p_enter = p_enter;
  sim.swlda.p_remove = p_remove;
  sim.swlda.max_features = max_features;
  sim.seed = seed;
  return sim;
}

Config parse_config(const std::string& text) {
  if (trimmed(text).empty()) {
    Config config;
    config.validate();
    return config;
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  return detail::config_from_json(j);
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void apply_override(Config& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value, got \"" + assignment + "\"");
  }
  const std::string key = trimmed(assignment.substr(0, eq));
  const std::string value_text = trimmed(assignment.substr(eq + 1));
  if (key.empty() || value_text.empty()) {
    throw std::invalid_argument("override must look like key=value, got \"" + assignment + "\"");
  }
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::exception&) {
    throw std::invalid_argument("config: cannot parse value for key \"" + key + "\": " +
                                value_text);
  }
  detail::set_config_key(config, key, value);
}

std::string dump_config(const Config& config, int indent) {
  return detail::config_to_json(config).dump(indent);
}

}  // namespace tactbci
