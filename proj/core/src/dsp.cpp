#include "tactbci/dsp.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace tactbci {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

Biquad lowpass_biquad(double fc, double rate, double q) {
  const double w0 = 2.0 * kPi * fc / rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 - cw) / 2.0 / a0;
  s.b1 = (1.0 - cw) / a0;
  s.b2 = (1.0 - cw) / 2.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

Biquad highpass_biquad(double fc, double rate, double q) {
  const double w0 = 2.0 * kPi * fc / rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 + cw) / 2.0 / a0;
  s.b1 = -(1.0 + cw) / a0;
  s.b2 = (1.0 + cw) / 2.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

Biquad notch_biquad(double f0, double rate, double q) {
  const double w0 = 2.0 * kPi * f0 / rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * cw / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

}  // namespace

FilterChain design_chain(double sample_rate) {
  return design_chain(sample_rate, 0.1, 60.0, 48.0, 52.0);
}

FilterChain design_chain(double sample_rate, double high_pass_cutoff, double low_pass_cutoff,
                         double notch_low, double notch_high) {
  if (sample_rate < 256.0) {
    throw std::invalid_argument("design_chain: sample_rate " + std::to_string(sample_rate) +
                                " too low for the 60 Hz cutoff (need >= 256)");
  }
  if (!(0.0 < high_pass_cutoff && high_pass_cutoff < low_pass_cutoff &&
        low_pass_cutoff < sample_rate / 2.0)) {
    throw std::invalid_argument("design_chain: need 0 < high_pass < low_pass < rate/2");
  }
  if (!(high_pass_cutoff < notch_low && notch_low < notch_high && notch_high < low_pass_cutoff)) {
    throw std::invalid_argument("design_chain: notch band must lie inside the pass band");
  }

  FilterChain chain;
  chain.sample_rate = sample_rate;
  chain.high_pass_cutoff = high_pass_cutoff;
  chain.low_pass_cutoff = low_pass_cutoff;
  chain.notch_low = notch_low;
  chain.notch_high = notch_high;

  // 2nd-order Butterworth high-pass.
  chain.stages.push_back(highpass_biquad(high_pass_cutoff, sample_rate, 1.0 / std::sqrt(2.0)));

  // 8th-order Butterworth low-pass as four sections. Section Q values come
  // from the Butterworth pole angles (2k-1)*pi/16.
  for (int k = 1; k <= 4; ++k) {
    const double theta = (2.0 * k - 1.0) * kPi / 16.0;
    chain.stages.push_back(lowpass_biquad(low_pass_cutoff, sample_rate, 1.0 / (2.0 * std::sin(theta))));
  }

  // Notch with -3 dB edges at the rejection band bounds: Q = f0 / bandwidth.
  const double f0 = (notch_low + notch_high) / 2.0;
  const double q = f0 / (notch_high - notch_low);
  chain.stages.push_back(notch_biquad(f0, sample_rate, q));
  return chain;
}

double FilterChain::response_magnitude(double freq) const {
  const std::complex<double> z = std::exp(std::complex<double>(0.0, 2.0 * kPi * freq / sample_rate));
  const std::complex<double> zi = 1.0 / z;
  std::complex<double> h(1.0, 0.0);
  for (const auto& s : stages) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return std::abs(h);
}

std::vector<double> apply_chain(const FilterChain& chain, const std::vector<double>& samples) {
  std::vector<double> y = samples;
  for (const auto& s : chain.stages) {
    // Direct form II transposed, zero initial state.
    double z1 = 0.0, z2 = 0.0;
    for (auto& v : y) {
      const double x = v;
      const double out = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * out + z2;
      z2 = s.b2 * x - s.a2 * out;
      v = out;
    }
  }
  return y;
}

SignalBuffer apply_chain(const FilterChain& chain, const SignalBuffer& buffer) {
  if (buffer.sample_rate != chain.sample_rate) {
    throw std::invalid_argument("apply_chain: buffer rate " + std::to_string(buffer.sample_rate) +
                                " does not match chain rate " + std::to_string(chain.sample_rate));
  }
  SignalBuffer out;
  out.sample_rate = buffer.sample_rate;
  out.channels.reserve(buffer.channels.size());
  for (const auto& ch : buffer.channels) out.channels.push_back(apply_chain(chain, ch));
  return out;
}

std::vector<Epoch> extract_epochs(const SignalBuffer& buffer,
                                  const std::vector<StimulusEvent>& events, double epoch_ms) {
  const std::size_t window = epoch_samples(buffer.sample_rate, epoch_ms);
  const auto n_samples = static_cast<std::int64_t>(buffer.n_samples());

  std::vector<Epoch> epochs;
  epochs.reserve(events.size());
  for (const auto& ev : events) {
    if (ev.onset_sample < 0 || ev.onset_sample + static_cast<std::int64_t>(window) > n_samples) {
      throw std::out_of_range("extract_epochs: window overruns buffer (command " +
                              std::to_string(ev.command) + ", onset " +
                              std::to_string(ev.onset_sample) + ")");
    }
    Epoch ep;
    ep.event = ev;
    ep.samples.reserve(buffer.channels.size());
    const auto base = static_cast<std::size_t>(ev.onset_sample);
    for (const auto& ch : buffer.channels) {
      ep.samples.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(base),
                              ch.begin() + static_cast<std::ptrdiff_t>(base + window));
    }
    epochs.push_back(std::move(ep));
  }
  return epochs;
}

FeatureVector decimate_epoch(const Epoch& epoch, int factor) {
  if (factor < 1) throw std::invalid_argument("decimate_epoch: factor must be >= 1");
  if (epoch.samples.empty()) throw std::invalid_argument("decimate_epoch: empty epoch");
  const std::size_t len = epoch.samples[0].size();
  if (static_cast<std::size_t>(factor) > len) {
    throw std::invalid_argument("decimate_epoch: factor " + std::to_string(factor) +
                                " exceeds samples per channel " + std::to_string(len));
  }
  const std::size_t n_blocks = len / static_cast<std::size_t>(factor);

  FeatureVector fv;
  fv.values.reserve(epoch.samples.size() * n_blocks);
  for (const auto& ch : epoch.samples) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      double sum = 0.0;
      const std::size_t base = b * static_cast<std::size_t>(factor);
      for (std::size_t i = 0; i < static_cast<std::size_t>(factor); ++i) sum += ch[base + i];
      fv.values.push_back(sum / static_cast<double>(factor));
    }
  }
  switch (epoch.event.target) {
    case TargetFlag::kTarget: fv.label = TargetFlag::kTarget; break;
    case TargetFlag::kNonTarget: fv.label = TargetFlag::kNonTarget; break;
    default: fv.label = TargetFlag::kUnknown; break;
  }
  return fv;
}

}  // namespace tactbci
