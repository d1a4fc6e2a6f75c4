#pragma once

#include <cstdint>
#include <vector>

#include "tactbci/dsp.hpp"

namespace tactbci {

// Training data: one row per epoch, +1 target / -1 non-target labels.
struct Dataset {
  std::vector<double> features;  // row-major, rows x cols
  std::vector<int> labels;       // +1 / -1
  std::int64_t rows = 0;
  std::int64_t cols = 0;

  double at(std::int64_t r, std::int64_t c) const { return features[static_cast<std::size_t>(r * cols + c)]; }
  void push_row(const FeatureVector& fv);
  void validate() const;  // >= 12 rows, both classes, finite values
};

struct SwldaOptions {
  double p_enter = 0.10;
  double p_remove = 0.15;
  int max_features = 60;
};

// Stepwise-selected linear discriminant: ordered selected feature indices,
// least-squares weights over them, and an intercept.
struct SwldaModel {
  std::vector<int> selected;
  std::vector<double> weights;
  double intercept = 0.0;
  double p_enter = 0.10;
  double p_remove = 0.15;
  int max_features = 60;
  std::int64_t feature_dim = 0;

  bool operator==(const SwldaModel&) const = default;
};

// Upper-tail p-value of the partial F statistic
//   F = (ss_reduced - ss_full) / (ss_full / df_full)
// with (1, df_full) degrees of freedom, via the regularized incomplete beta
// function. A perfect fit (ss_full = 0) gives p = 0.
double partial_f_pvalue(double residual_ss_reduced, double residual_ss_full, std::int64_t df_full);

// Forward-entry / backward-removal stepwise regression of the +-1 labels on
// the feature columns. Each pass adds the unselected feature with the
// smallest partial-F p-value when it beats p_enter, then drops selected
// features whose p-value exceeds p_remove (largest first), until the
// selection is stable or max_features is reached. Ties break toward the
// lowest feature index; features with variance below 1e-12 never enter.
SwldaModel train(const Dataset& data, const SwldaOptions& options = {});

// intercept + sum of weights * fv[selected]; higher = more target-like.
double score(const SwldaModel& model, const FeatureVector& fv);
double score(const SwldaModel& model, const std::vector<double>& values);

// Fraction of rows whose score sign matches the label.
double training_accuracy(const SwldaModel& model, const Dataset& data);

}  // namespace tactbci
