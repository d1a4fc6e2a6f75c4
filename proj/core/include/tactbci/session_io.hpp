#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tactbci/config.hpp"
#include "tactbci/decoder.hpp"
#include "tactbci/robot.hpp"
#include "tactbci/signal.hpp"
#include "tactbci/swlda.hpp"
#include "tactbci/types.hpp"

namespace tactbci {

struct RobotTraceEntry {
  RobotCommand command = RobotCommand::kLeft;
  RobotState state;  // after applying command

  bool operator==(const RobotTraceEntry&) const = default;
};

// One recorded session: everything needed to reproduce it bit for bit.
// Saved as newline-delimited structured text, one record per line: the
// header first, then one line per event, one per selection, and optional
// robot-trace and raw-signal lines.
struct SessionRecord {
  int format_version = 1;
  std::string created_at;  // informational; not part of the replay contract
  Config config;
  std::uint64_t seed = 0;  // authoritative seed, wins over config.seed
  SessionMode mode = SessionMode::kCalibration;
  bool has_model = false;
  SwldaModel model;  // embedded so online records replay standalone
  std::vector<StimulusEvent> events;
  std::vector<SelectionResult> selections;
  std::vector<RobotTraceEntry> robot_trace;  // only for robot-driven runs
  std::vector<SignalBuffer> raw_signals;     // one per selection, on request

  bool operator==(const SessionRecord&) const = default;
};

// UTC wall-clock in ISO 8601, for SessionRecord.created_at.
std::string current_timestamp();

// Newline-delimited structured text, UTF-8, numbers at full round-trip
// precision. Throws with the path on I/O failure.
void save_session(const SessionRecord& record, const std::string& path);
SessionRecord load_session(const std::string& path);

// Flat model file without timestamps: the same inputs byte-identically
// produce the same file.
void save_model(const SwldaModel& model, const std::string& path);
SwldaModel load_model(const std::string& path);

// Re-runs the decoder from the embedded config, seed and model and returns
// the regenerated selections; callers compare them against record.selections.
// Calibration records regenerate the model instead and throw on mismatch.
// Throws an unsupported-version error unless format_version is 1.
std::vector<SelectionResult> replay(const SessionRecord& record);

}  // namespace tactbci
