#include "tactbci/swlda.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "tactbci/rng.hpp"

namespace tactbci {

void Dataset::push_row(const FeatureVector& fv) {
  if (fv.label == TargetFlag::kUnknown) {
    throw std::invalid_argument("Dataset: cannot add an unlabeled epoch");
  }
  if (rows == 0) {
    cols = static_cast<std::int64_t>(fv.values.size());
  } else if (cols != static_cast<std::int64_t>(fv.values.size())) {
    throw std::invalid_argument("Dataset: inconsistent feature length");
  }
  features.insert(features.end(), fv.values.begin(), fv.values.end());
  labels.push_back(fv.label == TargetFlag::kTarget ? 1 : -1);
  ++rows;
}

void Dataset::validate() const {
  if (rows < 12) throw std::invalid_argument("Dataset: need at least 12 rows");
  if (cols < 1) throw std::invalid_argument("Dataset: need at least one feature column");
  if (static_cast<std::int64_t>(labels.size()) != rows ||
      static_cast<std::int64_t>(features.size()) != rows * cols) {
    throw std::invalid_argument("Dataset: shape mismatch");
  }
  bool has_pos = false, has_neg = false;
  for (int l : labels) {
    if (l == 1) has_pos = true;
    else if (l == -1) has_neg = true;
    else throw std::invalid_argument("Dataset: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("Dataset: both classes must be present");
  for (double v : features) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite feature value");
  }
}

double partial_f_pvalue(double residual_ss_reduced, double residual_ss_full, std::int64_t df_full) {
  if (df_full < 1) throw std::invalid_argument("partial_f_pvalue: df_full must be >= 1");
  if (residual_ss_full < 0.0 || residual_ss_reduced < residual_ss_full) {
    throw std::invalid_argument("partial_f_pvalue: need ss_reduced >= ss_full >= 0");
  }
  if (residual_ss_full == 0.0) return 0.0;  // perfect fit
  const double f = (residual_ss_reduced - residual_ss_full) / (residual_ss_full / static_cast<double>(df_full));
  if (f <= 0.0) return 1.0;
  const double df = static_cast<double>(df_full);
  // Upper tail of F(1, df) = I_{df/(df+F)}(df/2, 1/2).
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + f));
}

namespace {

// Dense lower-triangular Cholesky of a small SPD matrix (row-major).
// Returns false when a pivot degenerates (collinear design).
bool cholesky(std::vector<double>& m, int dim) {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = m[static_cast<std::size_t>(i * dim + j)];
      for (int k = 0; k < j; ++k) {
        sum -= m[static_cast<std::size_t>(i * dim + k)] * m[static_cast<std::size_t>(j * dim + k)];
      }
      if (i == j) {
        if (sum <= 1e-300) return false;
        m[static_cast<std::size_t>(i * dim + j)] = std::sqrt(sum);
      } else {
        m[static_cast<std::size_t>(i * dim + j)] = sum / m[static_cast<std::size_t>(j * dim + j)];
      }
    }
  }
  return true;
}

// Solves L L^T x = b in place given the factor from cholesky().
void cholesky_solve(const std::vector<double>& l, int dim, std::vector<double>& b) {
  for (int i = 0; i < dim; ++i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) sum -= l[static_cast<std::size_t>(i * dim + k)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = sum / l[static_cast<std::size_t>(i * dim + i)];
  }
  for (int i = dim - 1; i >= 0; --i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < dim; ++k) sum -= l[static_cast<std::size_t>(k * dim + i)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = sum / l[static_cast<std::size_t>(i * dim + i)];
  }
}

// Diagonal of (L L^T)^{-1}.
std::vector<double> cholesky_inverse_diagonal(const std::vector<double>& l, int dim) {
  std::vector<double> diag(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> e(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    cholesky_solve(l, dim, e);
    diag[static_cast<std::size_t>(j)] = e[static_cast<std::size_t>(j)];
  }
  return diag;
}

// Precomputed inner products of the training data: everything the stepwise
// loop needs lives in feature space, so each candidate test costs one small
// triangular solve instead of a pass over the rows.
struct GramCache {
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::vector<double> gram;      // p x p, x_i . x_j
  std::vector<double> col_sum;   // 1 . x_i
  std::vector<double> col_y;     // x_i . y
  double y_sum = 0.0;
  double y_dot = 0.0;
  std::vector<double> variance;  // per-column variance (biased)

  explicit GramCache(const Dataset& d)
      : n(d.rows),
        p(d.cols),
        gram(static_cast<std::size_t>(d.cols * d.cols), 0.0),
        col_sum(static_cast<std::size_t>(d.cols), 0.0),
        col_y(static_cast<std::size_t>(d.cols), 0.0),
        variance(static_cast<std::size_t>(d.cols), 0.0) {
    for (std::int64_t r = 0; r < n; ++r) {
      const double* row = d.features.data() + r * p;
      const double y = static_cast<double>(d.labels[static_cast<std::size_t>(r)]);
      y_sum += y;
      y_dot += y * y;
      for (std::int64_t i = 0; i < p; ++i) {
        col_sum[static_cast<std::size_t>(i)] += row[i];
        col_y[static_cast<std::size_t>(i)] += row[i] * y;
        for (std::int64_t j = i; j < p; ++j) {
          gram[static_cast<std::size_t>(i * p + j)] += row[i] * row[j];
        }
      }
    }
    for (std::int64_t i = 0; i < p; ++i) {
      for (std::int64_t j = 0; j < i; ++j) {
        gram[static_cast<std::size_t>(i * p + j)] = gram[static_cast<std::size_t>(j * p + i)];
      }
      const double mean = col_sum[static_cast<std::size_t>(i)] / static_cast<double>(n);
      variance[static_cast<std::size_t>(i)] =
          gram[static_cast<std::size_t>(i * p + i)] / static_cast<double>(n) - mean * mean;
    }
  }

  double g(std::int64_t i, std::int64_t j) const { return gram[static_cast<std::size_t>(i * p + j)]; }
};

// Least-squares fit of y on [1, X_S] expressed through the Gram cache.
struct Fit {
  std::vector<double> beta;    // intercept first, then one weight per selected
  double residual_ss = 0.0;
  std::vector<double> factor;  // Cholesky factor of the normal matrix
  int dim = 0;
  bool ok = false;
};

Fit fit_subset(const GramCache& cache, const std::vector<int>& selected) {
  const int m = static_cast<int>(selected.size());
  const int dim = m + 1;
  Fit fit;
  fit.dim = dim;

  std::vector<double> normal(static_cast<std::size_t>(dim * dim), 0.0);
  normal[0] = static_cast<double>(cache.n);
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::int64_t>(selected[static_cast<std::size_t>(i)]);
    normal[static_cast<std::size_t>(i + 1)] = cache.col_sum[static_cast<std::size_t>(si)];
    normal[static_cast<std::size_t>((i + 1) * dim)] = cache.col_sum[static_cast<std::size_t>(si)];
    for (int j = 0; j < m; ++j) {
      const auto sj = static_cast<std::int64_t>(selected[static_cast<std::size_t>(j)]);
      normal[static_cast<std::size_t>((i + 1) * dim + (j + 1))] = cache.g(si, sj);
    }
  }

  std::vector<double> rhs(static_cast<std::size_t>(dim), 0.0);
  rhs[0] = cache.y_sum;
  for (int i = 0; i < m; ++i) {
    rhs[static_cast<std::size_t>(i + 1)] =
        cache.col_y[static_cast<std::size_t>(selected[static_cast<std::size_t>(i)])];
  }

  fit.factor = normal;
  if (!cholesky(fit.factor, dim)) return fit;
  fit.beta = rhs;
  cholesky_solve(fit.factor, dim, fit.beta);

  double explained = 0.0;
  for (int i = 0; i < dim; ++i) {
    explained += fit.beta[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
  }
  fit.residual_ss = std::max(cache.y_dot - explained, 0.0);
  fit.ok = true;
  return fit;
}

constexpr double kVarianceFloor = 1e-12;

}  // namespace

SwldaModel train(const Dataset& data, const SwldaOptions& options) {
  data.validate();
  if (!(options.p_enter > 0.0 && options.p_enter <= options.p_remove && options.p_remove < 1.0)) {
    throw std::invalid_argument("train: need 0 < p_enter <= p_remove < 1");
  }
  if (options.max_features < 0) throw std::invalid_argument("train: max_features must be >= 0");

  const GramCache cache(data);
  const std::int64_t n = cache.n;
  const std::int64_t p = cache.p;
  // Keep at least one residual degree of freedom for the entry test.
  const int max_feats = static_cast<int>(
      std::min<std::int64_t>(options.max_features, std::min<std::int64_t>(p, n - 3)));

  std::vector<int> selected;
  Fit current = fit_subset(cache, selected);
  std::set<std::vector<int>> seen;

  const int iteration_cap = static_cast<int>(p) * (max_feats + 1);
  for (int iter = 0; iter < iteration_cap; ++iter) {
    bool changed = false;

    // Forward entry.
    if (static_cast<int>(selected.size()) < max_feats) {
      const int m = static_cast<int>(selected.size());
      const std::int64_t df = n - m - 2;
      int best_j = -1;
      double best_p = 1.0;
      double best_ss = 0.0;
      if (df >= 1) {
        std::vector<double> d(static_cast<std::size_t>(m + 1));
        for (std::int64_t j = 0; j < p; ++j) {
          if (std::find(selected.begin(), selected.end(), static_cast<int>(j)) != selected.end()) continue;
          if (cache.variance[static_cast<std::size_t>(j)] < kVarianceFloor) continue;

          d[0] = cache.col_sum[static_cast<std::size_t>(j)];
          for (int i = 0; i < m; ++i) {
            d[static_cast<std::size_t>(i + 1)] =
                cache.g(selected[static_cast<std::size_t>(i)], j);
          }
          std::vector<double> gamma = d;
          cholesky_solve(current.factor, m + 1, gamma);
          double proj_norm = 0.0, proj_y = 0.0;
          for (int i = 0; i <= m; ++i) {
            proj_norm += gamma[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
          }
          const double denom = cache.g(j, j) - proj_norm;
          // Collinear with the current design: not enterable.
          if (denom <= std::max(kVarianceFloor, 1e-10 * cache.g(j, j))) continue;

          std::vector<double> rhs(static_cast<std::size_t>(m + 1));
          rhs[0] = cache.y_sum;
          for (int i = 0; i < m; ++i) {
            rhs[static_cast<std::size_t>(i + 1)] =
                cache.col_y[static_cast<std::size_t>(selected[static_cast<std::size_t>(i)])];
          }
          for (int i = 0; i <= m; ++i) proj_y += gamma[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
          const double numer = cache.col_y[static_cast<std::size_t>(j)] - proj_y;
          const double delta_ss = std::min(numer * numer / denom, current.residual_ss);
          const double ss_new = current.residual_ss - delta_ss;
          const double pval = partial_f_pvalue(current.residual_ss, ss_new, df);
          if (pval < best_p) {  // strict: ties keep the lowest index
            best_p = pval;
            best_j = static_cast<int>(j);
            best_ss = ss_new;
          }
        }
      }
      if (best_j >= 0 && best_p < options.p_enter) {
        selected.push_back(best_j);
        Fit next = fit_subset(cache, selected);
        if (!next.ok) {
          selected.pop_back();  // degenerate despite the guard; leave it out
        } else {
          (void)best_ss;
          current = std::move(next);
          changed = true;
        }
      }
    }

    // Backward removal, largest offending p-value first.
    while (!selected.empty()) {
      const int m = static_cast<int>(selected.size());
      const std::int64_t df = n - m - 1;
      if (df < 1) break;
      const auto diag = cholesky_inverse_diagonal(current.factor, m + 1);
      const double sigma2 = current.residual_ss / static_cast<double>(df);
      int worst_k = -1;
      double worst_p = options.p_remove;
      for (int k = 0; k < m; ++k) {
        const double beta_k = current.beta[static_cast<std::size_t>(k + 1)];
        const double var_k = diag[static_cast<std::size_t>(k + 1)];
        const double ss_without = current.residual_ss + beta_k * beta_k / var_k;
        const double pval =
            sigma2 <= 0.0 ? 0.0 : partial_f_pvalue(std::max(ss_without, current.residual_ss),
                                                   current.residual_ss, df);
        const bool tie_lower_index =
            worst_k >= 0 && pval == worst_p &&
            selected[static_cast<std::size_t>(k)] < selected[static_cast<std::size_t>(worst_k)];
        if (pval > worst_p || tie_lower_index) {
          worst_p = pval;
          worst_k = k;
        }
      }
      if (worst_k < 0) break;
      selected.erase(selected.begin() + worst_k);
      current = fit_subset(cache, selected);
      changed = true;
    }

    if (!changed) break;
    if (static_cast<int>(selected.size()) >= max_feats) break;
    std::vector<int> canon = selected;
    std::sort(canon.begin(), canon.end());
    if (!seen.insert(canon).second) break;  // selection revisited: stop
  }

  SwldaModel model;
  model.p_enter = options.p_enter;
  model.p_remove = options.p_remove;
  model.max_features = options.max_features;
  model.feature_dim = p;
  model.selected = selected;
  model.intercept = current.beta.empty() ? cache.y_sum / static_cast<double>(n) : current.beta[0];
  model.weights.assign(selected.size(), 0.0);
  for (std::size_t i = 0; i < selected.size(); ++i) model.weights[i] = current.beta[i + 1];
  return model;
}

double score(const SwldaModel& model, const std::vector<double>& values) {
  if (static_cast<std::int64_t>(values.size()) != model.feature_dim) {
    throw std::invalid_argument("score: feature vector length " + std::to_string(values.size()) +
                                " does not match model dimension " +
                                std::to_string(model.feature_dim));
  }
  double s = model.intercept;
  for (std::size_t i = 0; i < model.selected.size(); ++i) {
    s += model.weights[i] * values[static_cast<std::size_t>(model.selected[i])];
  }
  return s;
}

double score(const SwldaModel& model, const FeatureVector& fv) { return score(model, fv.values); }

double training_accuracy(const SwldaModel& model, const Dataset& data) {
  std::int64_t correct = 0;
  std::vector<double> row(static_cast<std::size_t>(data.cols));
  for (std::int64_t r = 0; r < data.rows; ++r) {
    const double* src = data.features.data() + r * data.cols;
    row.assign(src, src + data.cols);
    const int predicted = score(model, row) > 0.0 ? 1 : -1;
    if (predicted == data.labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows);
}

}  // namespace tactbci
