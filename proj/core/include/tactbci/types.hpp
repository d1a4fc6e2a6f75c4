#pragma once

#include <cstdint>

namespace tactbci {

// Six stimulation sites / robot commands, indexed 0..5.
using CommandId = int;
inline constexpr int kNumCommands = 6;

inline constexpr bool valid_command(CommandId c) { return c >= 0 && c < kNumCommands; }

enum class TargetFlag { kNonTarget, kTarget, kUnknown };

// One tactile stimulus in a session.
struct StimulusEvent {
  CommandId command = 0;
  std::int64_t onset_sample = 0;
  int round_index = 0;
  TargetFlag target = TargetFlag::kUnknown;
};

inline bool operator==(const StimulusEvent& a, const StimulusEvent& b) {
  return a.command == b.command && a.onset_sample == b.onset_sample &&
         a.round_index == b.round_index && a.target == b.target;
}

}  // namespace tactbci
