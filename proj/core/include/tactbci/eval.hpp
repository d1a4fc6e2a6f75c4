#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tactbci/decoder.hpp"

namespace tactbci {

// Rows = intended command, columns = chosen command.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumCommands>, kNumCommands> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
};

struct Metrics {
  double accuracy = 0.0;
  std::int64_t n_selections = 0;
  double binomial_p_vs_chance = 1.0;  // exact one-sided tail against 1/6
  double itr_bits_per_selection = 0.0;
  double itr_bits_per_minute = 0.0;
  double seconds_per_selection = 0.0;
};

// Exact upper binomial tail P(X >= k | n, p), summed in log space.
double binomial_tail(std::int64_t k, std::int64_t n, double p);

// Exact (Clopper-Pearson) two-sided confidence bounds on a proportion.
std::pair<double, double> binomial_ci(std::int64_t k, std::int64_t n, double confidence);

// Wolpaw bits per selection for an N-way choice at accuracy p.
double wolpaw_bits(double p, int n_commands = kNumCommands);

Metrics summarize(const std::vector<SelectionResult>& results, double seconds_per_selection);
ConfusionMatrix confusion(const std::vector<SelectionResult>& results);

}  // namespace tactbci
