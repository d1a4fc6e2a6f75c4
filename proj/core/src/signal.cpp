#include "tactbci/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

#include "tactbci/fft.hpp"
#include "tactbci/rng.hpp"

namespace tactbci {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Sub-stream tags for hash_combine so noise, mains phase and ERP jitter
// never share a stream.
enum SeedTag : std::uint64_t { kTagNoise = 1, kTagMains = 2, kTagErp = 3 };

}  // namespace

ChannelLayout ChannelLayout::parietal_default() {
  ChannelLayout layout;
  layout.names = {"P3", "Pz", "P4", "CP1", "CP2", "CP5", "CP6", "POz"};
  layout.reference_label = "A1";   // left earlobe
  layout.ground_label = "Fpz";     // forehead
  return layout;
}

void ChannelLayout::validate() const {
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) throw std::invalid_argument("ChannelLayout: empty channel label");
    if (!seen.insert(name).second) {
      throw std::invalid_argument("ChannelLayout: duplicate channel label '" + name + "'");
    }
  }
}

void SignalBuffer::validate() const {
  if (sample_rate <= 0.0) throw std::invalid_argument("SignalBuffer: sample_rate must be > 0");
  const std::size_t len = n_samples();
  for (const auto& ch : channels) {
    if (ch.size() != len) throw std::invalid_argument("SignalBuffer: ragged channel lengths");
    for (double v : ch) {
      if (!std::isfinite(v)) throw std::invalid_argument("SignalBuffer: non-finite sample");
    }
  }
}

void NoiseModel::validate() const {
  if (background_rms < 0.0) throw std::invalid_argument("NoiseModel: background_rms must be >= 0");
  if (mains_amplitude < 0.0) throw std::invalid_argument("NoiseModel: mains_amplitude must be >= 0");
  if (spectral_slope < 0.0 || spectral_slope > 2.0) {
    throw std::invalid_argument("NoiseModel: spectral_slope must be in [0, 2]");
  }
}

void ErpModel::validate() const {
  if (target_amplitude < 0.0) throw std::invalid_argument("ErpModel: target_amplitude must be >= 0");
  if (latency_mean_ms + 3.0 * width_sd_ms >= 800.0) {
    throw std::invalid_argument("ErpModel: latency_mean_ms + 3*width_sd_ms must stay below 800 ms");
  }
  bool any_unit = false;
  for (double w : spatial_weights) {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("ErpModel: spatial_weights must be in [0, 1]");
    if (w == 1.0) any_unit = true;
  }
  if (!any_unit) throw std::invalid_argument("ErpModel: at least one spatial weight must equal 1");
}

std::size_t epoch_samples(double sample_rate, double epoch_ms) {
  return static_cast<std::size_t>(std::ceil(epoch_ms / 1000.0 * sample_rate));
}

namespace {

// 1/f^slope-shaped Gaussian noise, exact target RMS. Shaping happens on a
// power-of-two grid; the first n samples are kept and rescaled in time.
std::vector<double> shaped_noise(std::size_t n, double rate, double rms, double slope,
                                 std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (rms <= 0.0 || n == 0) return out;

  Rng rng(seed);
  const std::size_t len = next_pow2(std::max<std::size_t>(n, 2));
  std::vector<std::complex<double>> spec(len);
  for (auto& v : spec) v = std::complex<double>(rng.gaussian(), 0.0);

  if (slope > 0.0) {
    fft_pow2(spec, false);
    spec[0] = 0.0;  // mean-free
    for (std::size_t k = 1; k <= len / 2; ++k) {
      const double f = static_cast<double>(k) * rate / static_cast<double>(len);
      const double gain = std::pow(f, -slope / 2.0);
      spec[k] *= gain;
      if (k != len / 2) spec[len - k] = std::conj(spec[k]);
    }
    fft_pow2(spec, true);
  }

  double sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = spec[i].real();
    sumsq += out[i] * out[i];
  }
  const double measured = std::sqrt(sumsq / static_cast<double>(n));
  if (measured > 0.0) {
    const double scale = rms / measured;
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace

SignalBuffer generate_background_samples(const ChannelLayout& layout, std::size_t n_samples,
                                         double sample_rate, const NoiseModel& noise,
                                         std::uint64_t seed) {
  layout.validate();
  noise.validate();
  if (sample_rate <= 0.0) throw std::invalid_argument("generate_background: sample_rate must be > 0");

  SignalBuffer buffer;
  buffer.sample_rate = sample_rate;
  buffer.channels.resize(kNumChannels);
  for (int c = 0; c < kNumChannels; ++c) {
    const std::uint64_t chan_seed = hash_combine(seed, static_cast<std::uint64_t>(c));
    auto& ch = buffer.channels[static_cast<std::size_t>(c)];
    ch = shaped_noise(n_samples, sample_rate, noise.background_rms, noise.spectral_slope,
                      hash_combine(chan_seed, kTagNoise));
    if (noise.mains_amplitude > 0.0) {
      Rng phase_rng(hash_combine(chan_seed, kTagMains));
      const double phase = phase_rng.uniform(0.0, kTwoPi);
      const double w = kTwoPi * noise.mains_freq / sample_rate;
      for (std::size_t i = 0; i < n_samples; ++i) {
        ch[i] += noise.mains_amplitude * std::sin(w * static_cast<double>(i) + phase);
      }
    }
  }
  return buffer;
}

SignalBuffer generate_background(const ChannelLayout& layout, double duration_s,
                                 const NoiseModel& noise, std::uint64_t seed) {
  if (duration_s <= 0.0) throw std::invalid_argument("generate_background: duration must be > 0");
  const auto n_samples = static_cast<std::size_t>(std::floor(duration_s * 512.0));
  return generate_background_samples(layout, n_samples, 512.0, noise, seed);
}

std::vector<double> erp_template(const ErpModel& erp, double latency_ms, std::size_t length,
                                 double sample_rate) {
  if (length == 0) throw std::invalid_argument("erp_template: length must be > 0");
  std::vector<double> wave(length, 0.0);
  if (erp.target_amplitude == 0.0) return wave;

  // Center on the sample nearest the requested latency so the peak value is
  // exactly target_amplitude.
  const double peak_sample = std::round(latency_ms * sample_rate / 1000.0);
  const double width_samples = erp.width_sd_ms * sample_rate / 1000.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double d = (static_cast<double>(i) - peak_sample) / width_samples;
    wave[i] = erp.target_amplitude * std::exp(-0.5 * d * d);
  }
  return wave;
}

SignalBuffer inject_erp(const SignalBuffer& buffer, const std::vector<StimulusEvent>& events,
                        const ErpModel& erp, std::uint64_t seed) {
  buffer.validate();
  erp.validate();
  const std::size_t window = epoch_samples(buffer.sample_rate);
  const auto n_samples = static_cast<std::int64_t>(buffer.n_samples());

  SignalBuffer out = buffer;
  for (const auto& ev : events) {
    if (ev.onset_sample < 0 || ev.onset_sample + static_cast<std::int64_t>(window) > n_samples) {
      throw std::out_of_range("inject_erp: event window exceeds buffer (command " +
                              std::to_string(ev.command) + ", onset " +
                              std::to_string(ev.onset_sample) + ")");
    }
    const double scale = ev.target == TargetFlag::kTarget ? 1.0 : erp.nontarget_scale;
    if (scale == 0.0 || erp.target_amplitude == 0.0) continue;

    // Per-event jitter keyed on the onset sample: event sets compose
    // deterministically regardless of how they are batched.
    Rng jitter_rng(hash_combine(hash_combine(seed, kTagErp),
                                static_cast<std::uint64_t>(ev.onset_sample)));
    const double latency = erp.latency_mean_ms + erp.latency_jitter_sd_ms * jitter_rng.gaussian();
    const auto wave = erp_template(erp, latency, window, buffer.sample_rate);
    for (int c = 0; c < kNumChannels; ++c) {
      const double w = scale * erp.spatial_weights[static_cast<std::size_t>(c)];
      if (w == 0.0) continue;
      auto& ch = out.channels[static_cast<std::size_t>(c)];
      const auto base = static_cast<std::size_t>(ev.onset_sample);
      for (std::size_t i = 0; i < window; ++i) ch[base + i] += w * wave[i];
    }
  }
  return out;
}

}  // namespace tactbci
