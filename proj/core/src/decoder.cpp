#include "tactbci/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tactbci/rng.hpp"

namespace tactbci {

namespace {

enum DecoderSeedTag : std::uint64_t { kTagSchedule = 11, kTagBackground = 12, kTagInject = 13 };

std::uint64_t selection_seed(std::uint64_t seed, int selection_index) {
  return hash_combine(seed, static_cast<std::uint64_t>(selection_index));
}

}  // namespace

bool operator==(const SelectionResult& a, const SelectionResult& b) {
  return a.intended == b.intended && a.chosen == b.chosen && a.command_scores == b.command_scores &&
         a.rounds_used == b.rounds_used && a.tie_flag == b.tie_flag;
}

void SimulationConfig::validate() const {
  layout.validate();
  noise.validate();
  erp.validate();
  if (sample_rate < 256.0) throw std::invalid_argument("SimulationConfig: sample_rate must be >= 256");
  if (plan.sample_rate != sample_rate) {
    throw std::invalid_argument("SimulationConfig: plan sample_rate disagrees with config");
  }
  if (plan.rounds_per_selection < 1) {
    throw std::invalid_argument("SimulationConfig: rounds_per_selection must be >= 1");
  }
  if (decimation < 1) throw std::invalid_argument("SimulationConfig: decimation must be >= 1");
}

SelectionResult decide(const std::vector<std::pair<StimulusEvent, double>>& scored_events) {
  std::array<double, kNumCommands> sums{};
  std::array<int, kNumCommands> counts{};
  for (const auto& [event, epoch_score] : scored_events) {
    if (!valid_command(event.command)) throw std::invalid_argument("decide: command index out of range");
    sums[static_cast<std::size_t>(event.command)] += epoch_score;
    counts[static_cast<std::size_t>(event.command)] += 1;
  }
  for (int c = 0; c < kNumCommands; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw std::invalid_argument("decide: no epochs for command " + std::to_string(c));
    }
    if (counts[static_cast<std::size_t>(c)] != counts[0]) {
      throw std::invalid_argument("decide: unequal epoch counts per command");
    }
  }

  SelectionResult result;
  result.rounds_used = counts[0];
  for (int c = 0; c < kNumCommands; ++c) {
    result.command_scores[static_cast<std::size_t>(c)] =
        sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  result.chosen = 0;
  int max_count = 1;
  for (int c = 1; c < kNumCommands; ++c) {
    const double s = result.command_scores[static_cast<std::size_t>(c)];
    const double best = result.command_scores[static_cast<std::size_t>(result.chosen)];
    if (s > best) {
      result.chosen = c;
      max_count = 1;
    } else if (s == best) {
      ++max_count;
    }
  }
  result.tie_flag = max_count > 1;
  return result;
}

std::vector<FeatureVector> synthesize_selection_features(const SimulationConfig& config,
                                                         const std::vector<StimulusEvent>& events,
                                                         std::uint64_t sel_seed,
                                                         SignalBuffer* raw_out) {
  if (events.empty()) throw std::invalid_argument("synthesize_selection_features: no events");
  const std::size_t window = epoch_samples(config.sample_rate, config.epoch_ms);
  std::int64_t last_onset = 0;
  for (const auto& ev : events) last_onset = std::max(last_onset, ev.onset_sample);
  const auto n_samples = static_cast<std::size_t>(last_onset) + window;

  SignalBuffer buffer = generate_background_samples(config.layout, n_samples, config.sample_rate,
                                                    config.noise,
                                                    hash_combine(sel_seed, kTagBackground));
  buffer = inject_erp(buffer, events, config.erp, hash_combine(sel_seed, kTagInject));
  if (raw_out != nullptr) *raw_out = buffer;

  const FilterChain chain =
      design_chain(config.sample_rate, config.high_pass_hz, config.low_pass_hz,
                   config.notch_low_hz, config.notch_high_hz);
  const SignalBuffer conditioned = apply_chain(chain, buffer);

  const auto epochs = extract_epochs(conditioned, events, config.epoch_ms);
  std::vector<FeatureVector> features;
  features.reserve(epochs.size());
  for (const auto& ep : epochs) features.push_back(decimate_epoch(ep, config.decimation));
  return features;
}

std::pair<Dataset, SwldaModel> run_calibration(const SimulationConfig& config,
                                               std::vector<StimulusEvent>* events_out,
                                               std::vector<SignalBuffer>* raw_out) {
  config.validate();
  if (config.plan.mode != SessionMode::kCalibration) {
    throw std::invalid_argument("run_calibration: plan mode must be calibration");
  }
  if (events_out != nullptr) events_out->clear();
  if (raw_out != nullptr) raw_out->clear();

  Dataset data;
  const int n_selections = config.plan.n_selections();
  for (int s = 0; s < n_selections; ++s) {
    const std::uint64_t sel_seed = selection_seed(config.seed, s);
    const auto events =
        schedule_selection(config.plan, s, 0, hash_combine(sel_seed, kTagSchedule));
    SignalBuffer raw;
    const auto features = synthesize_selection_features(config, events, sel_seed,
                                                        raw_out != nullptr ? &raw : nullptr);
    for (const auto& fv : features) data.push_row(fv);
    if (events_out != nullptr) events_out->insert(events_out->end(), events.begin(), events.end());
    if (raw_out != nullptr) raw_out->push_back(std::move(raw));
  }

  SwldaModel model = train(data, config.swlda);
  return {std::move(data), std::move(model)};
}

std::vector<SelectionResult> run_online(const SimulationConfig& config, const SwldaModel& model,
                                        const std::vector<CommandId>& intents,
                                        std::vector<StimulusEvent>* events_out,
                                        std::vector<SignalBuffer>* raw_out) {
  config.validate();
  if (config.plan.mode != SessionMode::kOnline) {
    throw std::invalid_argument("run_online: plan mode must be online");
  }
  if (intents.empty()) throw std::invalid_argument("run_online: intents must be non-empty");
  for (CommandId c : intents) {
    if (!valid_command(c)) throw std::invalid_argument("run_online: intent out of range");
  }
  if (events_out != nullptr) events_out->clear();
  if (raw_out != nullptr) raw_out->clear();

  std::vector<SelectionResult> results;
  results.reserve(intents.size());
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const CommandId intent = intents[i];
    const std::uint64_t sel_seed = selection_seed(config.seed, static_cast<int>(i));
    auto events =
        schedule_selection(config.plan, static_cast<int>(i), 0, hash_combine(sel_seed, kTagSchedule));
    // Ground truth for synthesis only; the classifier never sees labels.
    for (auto& ev : events) {
      ev.target = ev.command == intent ? TargetFlag::kTarget : TargetFlag::kNonTarget;
    }
    SignalBuffer raw;
    const auto features = synthesize_selection_features(config, events, sel_seed,
                                                        raw_out != nullptr ? &raw : nullptr);
    if (events_out != nullptr) events_out->insert(events_out->end(), events.begin(), events.end());
    if (raw_out != nullptr) raw_out->push_back(std::move(raw));

    std::vector<std::pair<StimulusEvent, double>> scored;
    scored.reserve(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
      scored.emplace_back(events[k], score(model, features[k]));
    }
    SelectionResult result = decide(scored);
    result.intended = intent;
    results.push_back(result);
  }
  return results;
}

}  // namespace tactbci
