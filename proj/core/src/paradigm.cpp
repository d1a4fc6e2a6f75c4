#include "tactbci/paradigm.hpp"

#include <cmath>
#include <stdexcept>

#include "tactbci/rng.hpp"

namespace tactbci {

int SessionPlan::soa_samples() const {
  const double soa_s = static_cast<double>(stimulus_ms + isi_ms) / 1000.0;
  return static_cast<int>(std::lround(soa_s * sample_rate));
}

int SessionPlan::n_selections() const {
  return mode == SessionMode::kCalibration ? static_cast<int>(calibration_targets.size())
                                           : online_selections;
}

std::optional<CommandId> SessionPlan::intended_target(int selection_index) const {
  if (mode != SessionMode::kCalibration) return std::nullopt;
  if (selection_index < 0 || selection_index >= static_cast<int>(calibration_targets.size())) {
    throw std::out_of_range("SessionPlan: selection index " + std::to_string(selection_index) +
                            " outside calibration target list");
  }
  return calibration_targets[static_cast<std::size_t>(selection_index)];
}

SessionPlan SessionPlan::calibration_default(int rounds) {
  SessionPlan plan;
  plan.mode = SessionMode::kCalibration;
  plan.rounds_per_selection = rounds;
  plan.calibration_targets = {0, 1, 2, 3, 4, 5};
  return plan;
}

SessionPlan SessionPlan::online(int n_selections, int rounds) {
  SessionPlan plan;
  plan.mode = SessionMode::kOnline;
  plan.rounds_per_selection = rounds;
  plan.online_selections = n_selections;
  return plan;
}

std::array<CommandId, kNumCommands> build_round(std::uint64_t seed,
                                                std::optional<CommandId> previous_last) {
  Rng rng(seed);
  std::array<CommandId, kNumCommands> order{};
  for (int i = 0; i < kNumCommands; ++i) order[static_cast<std::size_t>(i)] = i;
  // Fisher-Yates; redraw when the cross-round no-repeat constraint is hit.
  do {
    for (int i = kNumCommands - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<std::size_t>(i)], order[j]);
    }
  } while (previous_last.has_value() && order[0] == *previous_last);
  return order;
}

std::vector<StimulusEvent> schedule_selection(const SessionPlan& plan, int selection_index,
                                              std::int64_t start_sample, std::uint64_t seed) {
  if (start_sample < 0) {
    throw std::invalid_argument("schedule_selection: start_sample must be >= 0");
  }
  const int soa = plan.soa_samples();
  const std::optional<CommandId> intended = plan.intended_target(selection_index);

  std::vector<StimulusEvent> events;
  events.reserve(static_cast<std::size_t>(plan.rounds_per_selection) * kNumCommands);
  std::optional<CommandId> previous_last;
  for (int r = 0; r < plan.rounds_per_selection; ++r) {
    const auto order = build_round(hash_combine(seed, static_cast<std::uint64_t>(r)), previous_last);
    for (int k = 0; k < kNumCommands; ++k) {
      StimulusEvent ev;
      ev.command = order[static_cast<std::size_t>(k)];
      ev.onset_sample = start_sample + static_cast<std::int64_t>(r * kNumCommands + k) * soa;
      ev.round_index = r;
      ev.target = intended.has_value()
                      ? (ev.command == *intended ? TargetFlag::kTarget : TargetFlag::kNonTarget)
                      : TargetFlag::kUnknown;
      events.push_back(ev);
    }
    previous_last = order[kNumCommands - 1];
  }
  return events;
}

double selection_duration(const SessionPlan& plan) {
  const int n_stimuli = plan.rounds_per_selection * kNumCommands;
  const double soa_s = plan.soa_samples() / plan.sample_rate;
  return static_cast<double>(n_stimuli - 1) * soa_s + 0.800;
}

double session_duration(const SessionPlan& plan) {
  const int n = plan.n_selections();
  if (n == 0) return 0.0;
  const double gap_s = static_cast<double>(plan.inter_selection_gap_ms) / 1000.0;
  return static_cast<double>(n) * selection_duration(plan) + static_cast<double>(n - 1) * gap_s;
}

}  // namespace tactbci
