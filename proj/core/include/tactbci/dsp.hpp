#pragma once

#include <cstddef>
#include <vector>

#include "tactbci/signal.hpp"
#include "tactbci/types.hpp"

namespace tactbci {

// Second-order IIR section, coefficients normalized so a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Causal conditioning chain: 0.1 Hz high-pass, 60 Hz low-pass, 48-52 Hz
// notch, realized as cascaded biquads applied with zero initial state.
struct FilterChain {
  double sample_rate = 512.0;
  double high_pass_cutoff = 0.1;
  double low_pass_cutoff = 60.0;
  double notch_low = 48.0;
  double notch_high = 52.0;
  std::vector<Biquad> stages;

  // |H(e^{j 2 pi f / rate})| from the coefficients; test/diagnostic aid.
  double response_magnitude(double freq) const;
};

FilterChain design_chain(double sample_rate);
FilterChain design_chain(double sample_rate, double high_pass_cutoff, double low_pass_cutoff,
                         double notch_low, double notch_high);

// Runs every channel through the cascade (state starts at zero, consumed
// locally). Causal and linear; same shape out.
SignalBuffer apply_chain(const FilterChain& chain, const SignalBuffer& buffer);

// Single-channel convenience used by tests and the chain itself.
std::vector<double> apply_chain(const FilterChain& chain, const std::vector<double>& samples);

// 0-800 ms post-stimulus window of one event.
struct Epoch {
  std::vector<std::vector<double>> samples;  // [channel][sample], 8 x 410 at 512 Hz
  StimulusEvent event;
};

// One epoch per event, window [onset, onset + epoch_samples). Events may
// overlap in the signal; each still gets its full window.
std::vector<Epoch> extract_epochs(const SignalBuffer& buffer,
                                  const std::vector<StimulusEvent>& events,
                                  double epoch_ms = 800.0);

// Per-epoch decimated features.
struct FeatureVector {
  std::vector<double> values;  // channel-major block means, 160 for the default chain
  TargetFlag label = TargetFlag::kUnknown;
};

// Block-mean decimation: per channel the first floor(len/factor) complete
// blocks of `factor` consecutive samples are averaged; the remainder is
// discarded. 410 samples with factor 20 give 20 block means per channel.
FeatureVector decimate_epoch(const Epoch& epoch, int factor = 20);

}  // namespace tactbci
