#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tactbci/decoder.hpp"
#include "tactbci/signal.hpp"
#include "tactbci/types.hpp"

namespace tactbci {

// Every tunable of the simulator in one flat bag, loadable from a config
// file. Field names double as the file keys; noise and erp nest one level.
struct Config {
  double sample_rate = 512.0;
  double hp = 0.1;                    // high-pass cutoff, Hz
  double lp = 60.0;                   // low-pass cutoff, Hz
  std::array<double, 2> notch{48.0, 52.0};
  double epoch_ms = 800.0;
  int decimation = 20;
  int stimulus_ms = 100;
  int isi_ms = 300;
  int rounds_online = 3;
  int rounds_calibration = 15;
  int n_commands = 6;                 // fixed by the command set; validated
  double p_enter = 0.10;
  double p_remove = 0.15;
  int max_features = 60;
  std::uint64_t seed = 0;
  int inter_selection_gap_ms = 2000;
  std::vector<CommandId> calibration_targets{0, 1, 2, 3, 4, 5};
  NoiseModel noise;
  ErpModel erp;

  // Enforces the downstream module invariants up front; every error message
  // names the offending key.
  void validate() const;

  // Assembles the decoder-facing view for one session.
  SimulationConfig simulation(SessionMode mode, int online_selections = 0) const;

  bool operator==(const Config&) const = default;
};

// Missing keys keep their defaults, unknown keys are rejected by name, and
// the result is validated. An empty file yields the default Config.
Config load_config(const std::string& path);

// Same contract on an in-memory string.
Config parse_config(const std::string& text);

// Applies one "key=value" assignment (nested keys dotted, e.g.
// noise.background_rms=0.5; array values in bracket syntax). Leaves
// validation to the caller so several overrides can land together.
void apply_override(Config& config, const std::string& assignment);

// Serializes with full round-trip precision.
std::string dump_config(const Config& config, int indent = 2);

}  // namespace tactbci
