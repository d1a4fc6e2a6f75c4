#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tactbci/types.hpp"

namespace tactbci {

enum class SessionMode { kCalibration, kOnline };

// Stimulation timing for one session. SOA = stimulus + ISI = 400 ms,
// which is 205 samples at 512 Hz (the +0.39 ms rounding is deliberate:
// onsets live on the integer sample grid).
struct SessionPlan {
  SessionMode mode = SessionMode::kOnline;
  int rounds_per_selection = 3;     // 15 for calibration data collection
  std::vector<CommandId> calibration_targets;  // calibration mode: intended command per selection
  int online_selections = 0;        // online mode: selection count
  double sample_rate = 512.0;
  int stimulus_ms = 100;
  int isi_ms = 300;
  int inter_selection_gap_ms = 2000;

  int soa_samples() const;
  int n_selections() const;
  std::optional<CommandId> intended_target(int selection_index) const;

  static SessionPlan calibration_default(int rounds = 15);
  static SessionPlan online(int n_selections, int rounds = 3);
};

// One randomized round: a permutation of the six commands whose first
// element differs from the previous round's last element.
std::array<CommandId, kNumCommands> build_round(std::uint64_t seed,
                                                std::optional<CommandId> previous_last);

// All stimulus events of one selection, onsets spaced exactly soa_samples()
// apart starting at start_sample. In calibration mode is_target is filled
// from the plan's intended command; online events are left unknown.
std::vector<StimulusEvent> schedule_selection(const SessionPlan& plan, int selection_index,
                                              std::int64_t start_sample, std::uint64_t seed);

// Total scheduled session time: per selection the stimuli span plus an
// 800 ms epoch tail, with inter_selection_gap_ms between selections.
double session_duration(const SessionPlan& plan);

// Time covered by a single selection including the epoch tail.
double selection_duration(const SessionPlan& plan);

}  // namespace tactbci
