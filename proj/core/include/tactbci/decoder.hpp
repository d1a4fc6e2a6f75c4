#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "tactbci/dsp.hpp"
#include "tactbci/paradigm.hpp"
#include "tactbci/signal.hpp"
#include "tactbci/swlda.hpp"
#include "tactbci/types.hpp"

namespace tactbci {

// One six-way decision.
struct SelectionResult {
  CommandId intended = -1;  // -1 = unknown
  CommandId chosen = 0;
  std::array<double, kNumCommands> command_scores{};  // mean epoch score per command
  int rounds_used = 0;
  bool tie_flag = false;
};

bool operator==(const SelectionResult& a, const SelectionResult& b);

// Everything the closed loop needs: montage, noise and ERP ground truth,
// stimulation plan, conditioning parameters, classifier settings, seed.
struct SimulationConfig {
  ChannelLayout layout = ChannelLayout::parietal_default();
  NoiseModel noise;
  ErpModel erp;
  SessionPlan plan;
  double sample_rate = 512.0;
  double high_pass_hz = 0.1;
  double low_pass_hz = 60.0;
  double notch_low_hz = 48.0;
  double notch_high_hz = 52.0;
  double epoch_ms = 800.0;
  int decimation = 20;
  SwldaOptions swlda;
  std::uint64_t seed = 0;

  void validate() const;
};

// Averages epoch scores per command and picks the argmax. Exact ties pick
// the lowest index and set tie_flag. Requires every command to appear the
// same number of times.
SelectionResult decide(const std::vector<std::pair<StimulusEvent, double>>& scored_events);

// Runs the full calibration session: schedule, synthesize, condition,
// label by is_target, train. Deterministic per config.seed. The optional
// out-params collect the presented events and the unfiltered per-selection
// signals for session records.
std::pair<Dataset, SwldaModel> run_calibration(const SimulationConfig& config,
                                               std::vector<StimulusEvent>* events_out = nullptr,
                                               std::vector<SignalBuffer>* raw_out = nullptr);

// Scores fresh synthetic EEG for each intent and returns one decision per
// intent. Selection i draws its private seed from hash(seed, i), so results
// do not depend on evaluation order.
std::vector<SelectionResult> run_online(const SimulationConfig& config, const SwldaModel& model,
                                        const std::vector<CommandId>& intents,
                                        std::vector<StimulusEvent>* events_out = nullptr,
                                        std::vector<SignalBuffer>* raw_out = nullptr);

// Features of a single synthesized selection (shared by calibration and
// online paths). raw_out, when given, receives the synthesized buffer
// before filtering.
std::vector<FeatureVector> synthesize_selection_features(const SimulationConfig& config,
                                                         const std::vector<StimulusEvent>& events,
                                                         std::uint64_t selection_seed,
                                                         SignalBuffer* raw_out = nullptr);

}  // namespace tactbci
