#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tactbci/types.hpp"

namespace tactbci {

inline constexpr int kNumChannels = 8;

// Electrode montage. The simulator fixes eight channels over parietal sites.
struct ChannelLayout {
  std::array<std::string, kNumChannels> names;
  std::string reference_label = "A1";
  std::string ground_label = "Fpz";

  static ChannelLayout parietal_default();
  void validate() const;  // unique, non-empty labels
};

// Multichannel sampled EEG in microvolts.
struct SignalBuffer {
  double sample_rate = 512.0;
  std::vector<std::vector<double>> channels;  // [channel][sample]

  std::size_t n_channels() const { return channels.size(); }
  std::size_t n_samples() const { return channels.empty() ? 0 : channels[0].size(); }
  void validate() const;  // equal row lengths, finite values, rate > 0

  bool operator==(const SignalBuffer&) const = default;
};

// Structured background noise: 1/f^slope-shaped Gaussian noise scaled to a
// target RMS plus a mains sinusoid with per-channel random phase.
struct NoiseModel {
  double background_rms = 10.0;   // microvolts
  double spectral_slope = 1.0;    // PSD ~ 1/f^slope, in [0, 2]
  double mains_freq = 50.0;       // Hz
  double mains_amplitude = 2.0;   // microvolts

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

// Gaussian-envelope positive deflection injected at target stimulus onsets.
// Defaults are simulator placeholders at a typical published P300 scale.
struct ErpModel {
  double target_amplitude = 5.0;   // microvolts, peak
  double latency_mean_ms = 350.0;
  double latency_jitter_sd_ms = 20.0;
  double width_sd_ms = 60.0;
  double nontarget_scale = 0.0;    // fraction of target amplitude on non-target epochs
  std::array<double, kNumChannels> spatial_weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

  void validate() const;
  bool operator==(const ErpModel&) const = default;
};

// Synthesizes floor(duration * rate) samples of background noise per channel.
// Deterministic per seed; all-zero when both noise components are zero.
SignalBuffer generate_background(const ChannelLayout& layout, double duration_s,
                                 const NoiseModel& noise, std::uint64_t seed);

// Sample-count variant used by the decoder so buffer lengths match event
// schedules exactly.
SignalBuffer generate_background_samples(const ChannelLayout& layout, std::size_t n_samples,
                                         double sample_rate, const NoiseModel& noise,
                                         std::uint64_t seed);

// Single-channel Gaussian deflection of `length` samples peaking with value
// target_amplitude at the sample nearest `latency_ms`.
std::vector<double> erp_template(const ErpModel& erp, double latency_ms, std::size_t length,
                                 double sample_rate);

// Returns a copy of `buffer` with one ERP deflection added per event across
// the 800 ms epoch window. Target events get full amplitude, non-target
// events are scaled by nontarget_scale, and each channel is weighted by
// spatial_weights. Latency jitter is seeded per event from its onset sample
// so that disjoint event sets compose exactly.
SignalBuffer inject_erp(const SignalBuffer& buffer, const std::vector<StimulusEvent>& events,
                        const ErpModel& erp, std::uint64_t seed);

// Epoch window length: ceil(0.8 s * rate) samples, 410 at 512 Hz.
std::size_t epoch_samples(double sample_rate, double epoch_ms = 800.0);

}  // namespace tactbci
