#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tactbci/dsp.hpp"
#include "tactbci/signal.hpp"

using namespace tactbci;

namespace {

constexpr double kRate = 512.0;

std::vector<double> sine(double freq, double seconds, double rate = kRate) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate);
  }
  return x;
}

// steady-state amplitude: quadrature projection over the final two seconds,
// long after the transient has decayed
double steady_amplitude(const std::vector<double>& y, double freq, double rate = kRate) {
  const auto tail = static_cast<std::size_t>(2.0 * rate);
  const std::size_t start = y.size() - tail;
  double re = 0.0, im = 0.0;
  for (std::size_t i = start; i < y.size(); ++i) {
    const double t = 2.0 * M_PI * freq * static_cast<double>(i) / rate;
    re += y[i] * std::cos(t);
    im += y[i] * std::sin(t);
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(tail);
}

double measured_gain_db(const FilterChain& chain, double freq) {
  const auto y = apply_chain(chain, sine(freq, 10.0));
  return 20.0 * std::log10(steady_amplitude(y, freq));
}

std::vector<double> random_samples(std::size_t n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = dist(gen);
  return x;
}

Epoch ramp_epoch(std::size_t channels, std::size_t len, TargetFlag label) {
  Epoch ep;
  ep.samples.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    ep.samples[c].resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      ep.samples[c][i] = static_cast<double>(c) * 1000.0 + static_cast<double>(i);
    }
  }
  ep.event.target = label;
  return ep;
}

}  // namespace

TEST_CASE("chain frequency response hits the design targets") {
  const FilterChain chain = design_chain(kRate);
  REQUIRE(chain.stages.size() == 6);  // 1 high-pass + 4 low-pass + 1 notch

  CHECK(measured_gain_db(chain, 50.0) < -30.0);   // notch center
  CHECK(std::abs(measured_gain_db(chain, 10.0)) < 1.0);
  CHECK(std::abs(measured_gain_db(chain, 25.0)) < 1.0);
  CHECK(measured_gain_db(chain, 80.0) < -20.0);   // low-pass stop band

  // notch edges sit near the -3 dB points
  const double edge_lo = measured_gain_db(chain, 48.0);
  const double edge_hi = measured_gain_db(chain, 52.0);
  CHECK(edge_lo > -4.5);
  CHECK(edge_lo < -2.0);
  CHECK(edge_hi > -4.5);
  CHECK(edge_hi < -2.0);

  // steady-state measurement agrees with the analytic magnitude response
  for (double f : {10.0, 25.0, 48.0, 52.0, 80.0}) {
    const double analytic = 20.0 * std::log10(chain.response_magnitude(f));
    CHECK(std::abs(measured_gain_db(chain, f) - analytic) < 0.3);
  }
}

TEST_CASE("high-pass removes DC") {
  const FilterChain chain = design_chain(kRate);
  std::vector<double> dc(static_cast<std::size_t>(10.0 * kRate), 1.0);
  const auto y = apply_chain(chain, dc);
  double acc = 0.0;
  const auto tail = static_cast<std::size_t>(2.0 * kRate);
  for (std::size_t i = y.size() - tail; i < y.size(); ++i) acc += y[i];
  const double mean = std::abs(acc / static_cast<double>(tail));
  CHECK(20.0 * std::log10(mean + 1e-30) < -40.0);
}

TEST_CASE("notch suppresses mains while passing the P300 band") {
  const FilterChain chain = design_chain(kRate);
  const double a50 = steady_amplitude(apply_chain(chain, sine(50.0, 10.0)), 50.0);
  const double a10 = steady_amplitude(apply_chain(chain, sine(10.0, 10.0)), 10.0);
  CHECK(a50 * a50 / (a10 * a10) < 1e-3);
}

TEST_CASE("filtering is causal") {
  const FilterChain chain = design_chain(kRate);
  const auto x = random_samples(4096, 11);
  auto x2 = x;
  for (std::size_t i = 2000; i < x2.size(); ++i) x2[i] += 5.0;

  const auto y = apply_chain(chain, x);
  const auto y2 = apply_chain(chain, x2);
  for (std::size_t i = 0; i < 2000; ++i) CHECK(y[i] == y2[i]);
  CHECK(y[2000] != y2[2000]);
}

TEST_CASE("filtering is linear") {
  const FilterChain chain = design_chain(kRate);
  const auto x = random_samples(2048, 1);
  const auto w = random_samples(2048, 2);
  std::vector<double> mix(2048);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 3.0 * x[i] - 0.5 * w[i];

  const auto ymix = apply_chain(chain, mix);
  const auto yx = apply_chain(chain, x);
  const auto yw = apply_chain(chain, w);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    CHECK(ymix[i] == doctest::Approx(3.0 * yx[i] - 0.5 * yw[i]).epsilon(1e-9));
  }
}

TEST_CASE("each call starts from zero state") {
  const FilterChain chain = design_chain(kRate);
  const auto x = random_samples(1024, 7);
  CHECK(apply_chain(chain, x) == apply_chain(chain, x));

  SignalBuffer buf;
  buf.channels = {x, x};
  const SignalBuffer out = apply_chain(chain, buf);
  CHECK(out.n_channels() == 2);
  CHECK(out.channels[0] == apply_chain(chain, x));
  CHECK(out.channels[0] == out.channels[1]);
}

TEST_CASE("buffer and chain sample rates must agree") {
  const FilterChain chain = design_chain(kRate);
  SignalBuffer buf;
  buf.sample_rate = 500.0;
  buf.channels = {std::vector<double>(64, 0.0)};
  CHECK_THROWS_AS(apply_chain(chain, buf), std::invalid_argument);
}

TEST_CASE("design rejects unusable parameters") {
  CHECK_THROWS_WITH_AS(design_chain(255.0),
                       "design_chain: sample_rate 255.000000 too low for the 60 Hz cutoff "
                       "(need >= 256)",
                       std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 70.0, 60.0, 48.0, 52.0), std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 0.0, 60.0, 48.0, 52.0), std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 0.1, 300.0, 48.0, 52.0), std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 0.1, 60.0, 52.0, 48.0), std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 0.1, 60.0, 48.0, 65.0), std::invalid_argument);
  CHECK_THROWS_AS(design_chain(512.0, 0.1, 60.0, 0.05, 52.0), std::invalid_argument);
  CHECK_NOTHROW(design_chain(256.0));
}

TEST_CASE("epoch extraction copies the post-stimulus window") {
  SignalBuffer buf;
  buf.channels.resize(8);
  for (std::size_t c = 0; c < 8; ++c) {
    buf.channels[c].resize(2048);
    for (std::size_t i = 0; i < 2048; ++i) {
      buf.channels[c][i] = static_cast<double>(c) * 10000.0 + static_cast<double>(i);
    }
  }

  std::vector<StimulusEvent> events(3);
  events[0].command = 0;
  events[0].onset_sample = 0;
  events[1].command = 3;
  events[1].onset_sample = 205;
  events[1].target = TargetFlag::kTarget;
  events[2].command = 5;
  events[2].onset_sample = 1638;  // 1638 + 410 == 2048, fits exactly

  const auto epochs = extract_epochs(buf, events);
  REQUIRE(epochs.size() == 3);
  for (const auto& ep : epochs) {
    CHECK(ep.samples.size() == 8);
    for (const auto& ch : ep.samples) CHECK(ch.size() == 410);
  }
  CHECK(epochs[1].samples[0][0] == 205.0);
  CHECK(epochs[1].samples[2][409] == 20614.0);  // 20000 + 205 + 409
  CHECK(epochs[1].event.command == 3);
  CHECK(epochs[1].event.target == TargetFlag::kTarget);

  // overlapping events each get a full window
  std::vector<StimulusEvent> overlap(2);
  overlap[0].onset_sample = 100;
  overlap[1].onset_sample = 150;
  CHECK(extract_epochs(buf, overlap).size() == 2);

  // custom window length
  CHECK(extract_epochs(buf, events, 100.0)[0].samples[0].size() == 52);
}

TEST_CASE("epoch extraction rejects out-of-range events by name") {
  SignalBuffer buf;
  buf.channels.assign(1, std::vector<double>(1000, 0.0));
  StimulusEvent ev;
  ev.command = 2;
  ev.onset_sample = 591;  // 591 + 410 > 1000
  try {
    extract_epochs(buf, {ev});
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find("591") != std::string::npos);
  }

  ev.onset_sample = -1;
  CHECK_THROWS_AS(extract_epochs(buf, {ev}), std::out_of_range);
}

TEST_CASE("block-mean decimation") {
  const Epoch ep = ramp_epoch(1, 410, TargetFlag::kTarget);
  const FeatureVector fv = decimate_epoch(ep, 20);
  REQUIRE(fv.values.size() == 20);
  CHECK(fv.label == TargetFlag::kTarget);
  for (std::size_t b = 0; b < 20; ++b) {
    // mean of an arithmetic run of 20 starting at 20b
    CHECK(fv.values[b] == doctest::Approx(20.0 * static_cast<double>(b) + 9.5).epsilon(1e-12));
  }

  // the trailing partial block (samples 400..409) is dropped entirely
  CHECK(410 % 20 == 10);
}

TEST_CASE("decimation is channel-major and preserves labels") {
  const Epoch ep = ramp_epoch(8, 410, TargetFlag::kNonTarget);
  const FeatureVector fv = decimate_epoch(ep, 20);
  REQUIRE(fv.values.size() == 160);
  CHECK(fv.label == TargetFlag::kNonTarget);
  for (std::size_t c = 0; c < 8; ++c) {
    for (std::size_t b = 0; b < 20; ++b) {
      const double expect = static_cast<double>(c) * 1000.0 + 20.0 * static_cast<double>(b) + 9.5;
      CHECK(fv.values[c * 20 + b] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  CHECK(decimate_epoch(ramp_epoch(1, 64, TargetFlag::kUnknown), 8).label == TargetFlag::kUnknown);
}

TEST_CASE("decimation edge factors") {
  const Epoch ep = ramp_epoch(1, 16, TargetFlag::kTarget);
  const FeatureVector ident = decimate_epoch(ep, 1);
  REQUIRE(ident.values.size() == 16);
  CHECK(ident.values == ep.samples[0]);

  CHECK_THROWS_AS(decimate_epoch(ep, 0), std::invalid_argument);
  try {
    decimate_epoch(ep, 17);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("17") != std::string::npos);
    CHECK(msg.find("16") != std::string::npos);
  }

  Epoch empty;
  CHECK_THROWS_AS(decimate_epoch(empty, 1), std::invalid_argument);
}

TEST_CASE("default pipeline yields 160 features per epoch") {
  const ChannelLayout layout = ChannelLayout::parietal_default();
  const SignalBuffer raw = generate_background_samples(layout, 1024, kRate, NoiseModel{}, 99);
  const FilterChain chain = design_chain(kRate);
  const SignalBuffer filtered = apply_chain(chain, raw);

  StimulusEvent ev;
  ev.onset_sample = 300;
  const auto epochs = extract_epochs(filtered, {ev});
  const FeatureVector fv = decimate_epoch(epochs[0]);
  CHECK(fv.values.size() == 160);
}
