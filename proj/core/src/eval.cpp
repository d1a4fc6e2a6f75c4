#include "tactbci/eval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tactbci {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int i = 0; i < kNumCommands; ++i) t += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  return t;
}

double binomial_tail(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("binomial_tail: need 0 <= k <= n");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("binomial_tail: need 0 < p < 1");
  if (k == 0) return 1.0;
  // log-space terms, extended precision and compensated summation so the
  // complement identity holds to 1e-12 even at n = 10^4
  const long double log_p = logl(static_cast<long double>(p));
  const long double log_q = log1pl(-static_cast<long double>(p));
  const long double lgn = lgammal(static_cast<long double>(n) + 1.0L);
  long double tail = 0.0L;
  long double carry = 0.0L;
  for (std::int64_t i = k; i <= n; ++i) {
    const long double log_term = lgn - lgammal(static_cast<long double>(i) + 1.0L) -
                                 lgammal(static_cast<long double>(n - i) + 1.0L) +
                                 static_cast<long double>(i) * log_p +
                                 static_cast<long double>(n - i) * log_q;
    const long double term = expl(log_term) - carry;
    const long double next = tail + term;
    carry = (next - tail) - term;
    tail = next;
  }
  return std::min(static_cast<double>(tail), 1.0);
}

std::pair<double, double> binomial_ci(std::int64_t k, std::int64_t n, double confidence) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("binomial_ci: need 0 <= k <= n, n > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("binomial_ci: confidence must be in (0, 1)");
  }
  const double alpha = 1.0 - confidence;

  // Clopper-Pearson by bisection on the exact tails; both tails are
  // monotone in p.
  auto solve = [n](std::int64_t kk, double target, bool upper_tail) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = (lo + hi) / 2.0;
      if (mid <= 0.0 || mid >= 1.0) break;
      const double tail = upper_tail ? binomial_tail(kk, n, mid)
                                     : 1.0 - binomial_tail(kk + 1, n, mid);
      if (upper_tail) {
        (tail > target ? hi : lo) = mid;
      } else {
        (tail > target ? lo : hi) = mid;
      }
    }
    return (lo + hi) / 2.0;
  };

  const double lower = k == 0 ? 0.0 : solve(k, alpha / 2.0, true);
  const double upper = k == n ? 1.0 : solve(k, alpha / 2.0, false);
  return {lower, upper};
}

double wolpaw_bits(double p, int n_commands) {
  if (n_commands < 2) throw std::invalid_argument("wolpaw_bits: need at least two commands");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("wolpaw_bits: accuracy must be in [0, 1]");
  const double nn = static_cast<double>(n_commands);
  double bits = std::log2(nn);
  if (p > 0.0) bits += p * std::log2(p);
  if (p < 1.0) bits += (1.0 - p) * std::log2((1.0 - p) / (nn - 1.0));
  return bits;
}

Metrics summarize(const std::vector<SelectionResult>& results, double seconds_per_selection) {
  if (results.empty()) throw std::invalid_argument("summarize: no selections");
  if (seconds_per_selection <= 0.0) {
    throw std::invalid_argument("summarize: seconds_per_selection must be > 0");
  }
  std::int64_t correct = 0;
  for (const auto& r : results) {
    if (r.intended < 0) throw std::invalid_argument("summarize: selection with unknown intent");
    if (r.chosen == r.intended) ++correct;
  }
  Metrics m;
  m.n_selections = static_cast<std::int64_t>(results.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n_selections);
  m.binomial_p_vs_chance = binomial_tail(correct, m.n_selections, 1.0 / kNumCommands);
  m.itr_bits_per_selection = std::max(wolpaw_bits(m.accuracy), 0.0);
  m.seconds_per_selection = seconds_per_selection;
  m.itr_bits_per_minute = 60.0 * m.itr_bits_per_selection / seconds_per_selection;
  return m;
}

ConfusionMatrix confusion(const std::vector<SelectionResult>& results) {
  ConfusionMatrix cm;
  for (const auto& r : results) {
    if (r.intended < 0) throw std::invalid_argument("confusion: selection with unknown intent");
    if (!valid_command(r.intended) || !valid_command(r.chosen)) {
      throw std::invalid_argument("confusion: command index out of range");
    }
    ++cm.counts[static_cast<std::size_t>(r.intended)][static_cast<std::size_t>(r.chosen)];
  }
  return cm;
}

}  // namespace tactbci
