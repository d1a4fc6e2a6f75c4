#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "stepwise_reference.hpp"
#include "tactbci/swlda.hpp"

using namespace tactbci;

namespace {

// Student-t survival function by numerical integration of the density,
// substituting u = x/t to tame the polynomial tail. Independent of the
// incomplete-beta route inside the library.
double t_sf_numeric(double x, double nu) {
  const double logc = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                      0.5 * std::log(nu * M_PI);
  auto pdf = [&](double t) {
    return std::exp(logc - (nu + 1.0) / 2.0 * std::log1p(t * t / nu));
  };
  // integral over (x, inf) = integral over u in (0, 1] of pdf(x/u) x / u^2
  auto g = [&](double u) {
    const double t = x / u;
    return pdf(t) * x / (u * u);
  };
  const int n = 200000;  // Simpson; integrand is smooth on (0, 1]
  const double h = 1.0 / n;
  double acc = g(1.0);  // g(0) -> 0 for the tails in question
  for (int i = 1; i < n; ++i) acc += g(h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("partial F p-values match frozen F-distribution references") {
  // survival values for F(1, df); ss_full = df makes the statistic explicit
  CHECK(partial_f_pvalue(44.0, 40.0, 40) == doctest::Approx(0.05232234321504915).epsilon(1e-12));
  CHECK(partial_f_pvalue(10.1, 10.0, 10) == doctest::Approx(0.7583315357111736).epsilon(1e-12));
  CHECK(partial_f_pvalue(130.3, 123.0, 123) ==
        doctest::Approx(0.007869428204281853).epsilon(1e-12));
  CHECK(partial_f_pvalue(3.5, 3.0, 3) == doctest::Approx(0.5304777709329569).epsilon(1e-12));
  CHECK(partial_f_pvalue(549.0, 537.0, 537) ==
        doctest::Approx(0.0005744927627339784).epsilon(1e-12));
}

TEST_CASE("partial F p-values agree with a numeric Student-t tail") {
  // F(1, df) upper tail equals twice the t_df tail beyond sqrt(F)
  for (const auto& [fstat, df] : std::vector<std::pair<double, int>>{
           {4.0, 40}, {0.5, 3}, {7.3, 123}, {2.2, 17}}) {
    const double via_f = partial_f_pvalue(static_cast<double>(df) + fstat,
                                          static_cast<double>(df), df);
    const double via_t = 2.0 * t_sf_numeric(std::sqrt(fstat), df);
    CHECK(via_f == doctest::Approx(via_t).epsilon(1e-7));
  }
}

TEST_CASE("partial F p-value domain and edges") {
  CHECK(partial_f_pvalue(10.0, 0.0, 5) == 0.0);   // perfect fit
  CHECK(partial_f_pvalue(10.0, 10.0, 5) == 1.0);  // no improvement
  CHECK_THROWS_AS(partial_f_pvalue(10.0, 11.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(partial_f_pvalue(10.0, -1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(partial_f_pvalue(10.0, 5.0, 0), std::invalid_argument);
  // monotone in the statistic
  CHECK(partial_f_pvalue(12.0, 10.0, 20) > partial_f_pvalue(14.0, 10.0, 20));
}

TEST_CASE("training matches a brute-force stepwise reference") {
  int nonempty = 0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    // every fourth dataset is pure noise
    const double signal = (seed % 4 == 0) ? 0.0 : 0.4 + 0.1 * (seed % 5);
    const Dataset d = testref::random_dataset(seed, 40, 6, signal);

    for (const SwldaOptions& opt :
         {SwldaOptions{}, SwldaOptions{0.30, 0.35, 60}, SwldaOptions{0.10, 0.15, 2}}) {
      const SwldaModel lib = train(d, opt);
      const SwldaModel ref = testref::ref_train(d, opt);
      REQUIRE(lib.selected == ref.selected);
      REQUIRE(lib.weights.size() == ref.weights.size());
      CHECK(lib.intercept == doctest::Approx(ref.intercept).epsilon(1e-8));
      for (std::size_t i = 0; i < lib.weights.size(); ++i) {
        CHECK(lib.weights[i] == doctest::Approx(ref.weights[i]).epsilon(1e-8));
      }
      if (!lib.selected.empty()) ++nonempty;
    }
  }
  CHECK(nonempty > 100);  // the comparison actually exercised selections
}

TEST_CASE("separable data trains to perfect accuracy") {
  std::mt19937 gen(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  for (int r = 0; r < 40; ++r) {
    const int label = r % 2 ? 1 : -1;
    FeatureVector fv;
    fv.label = label > 0 ? TargetFlag::kTarget : TargetFlag::kNonTarget;
    fv.values.resize(6);
    for (auto& v : fv.values) v = noise(gen);
    fv.values[2] = 2.0 * label + 0.01 * noise(gen);
    d.push_row(fv);
  }

  const SwldaModel model = train(d);
  REQUIRE(!model.selected.empty());
  CHECK(model.selected.front() == 2);  // the informative feature enters first
  CHECK(training_accuracy(model, d) == 1.0);
  CHECK(model.feature_dim == 6);

  // rescaling a feature leaves the selection and the decisions unchanged
  Dataset scaled = d;
  for (std::int64_t r = 0; r < scaled.rows; ++r) {
    scaled.features[static_cast<std::size_t>(r * scaled.cols + 2)] *= 10.0;
  }
  const SwldaModel ms = train(scaled);
  CHECK(ms.selected == model.selected);
  for (std::int64_t r = 0; r < d.rows; ++r) {
    std::vector<double> row(6), srow(6);
    for (int c = 0; c < 6; ++c) {
      row[static_cast<std::size_t>(c)] = d.at(r, c);
      srow[static_cast<std::size_t>(c)] = scaled.at(r, c);
    }
    CHECK(score(ms, srow) == doctest::Approx(score(model, row)).epsilon(1e-9));
  }
}

TEST_CASE("noise-only data yields an intercept-only majority model") {
  std::mt19937 gen(9);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  for (int r = 0; r < 30; ++r) {
    FeatureVector fv;
    fv.label = r < 18 ? TargetFlag::kTarget : TargetFlag::kNonTarget;
    fv.values.resize(8);
    for (auto& v : fv.values) v = noise(gen);
    d.push_row(fv);
  }

  SwldaOptions strict;
  strict.p_enter = 1e-9;
  strict.p_remove = 1e-8;
  const SwldaModel model = train(d, strict);
  CHECK(model.selected.empty());
  CHECK(model.weights.empty());
  CHECK(model.intercept == doctest::Approx(0.2).epsilon(1e-12));  // (18 - 12) / 30
  CHECK(training_accuracy(model, d) == doctest::Approx(0.6));     // majority class
}

TEST_CASE("constant and duplicate features never enter together") {
  std::mt19937 gen(13);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  for (int r = 0; r < 40; ++r) {
    const int label = r % 2 ? 1 : -1;
    FeatureVector fv;
    fv.label = label > 0 ? TargetFlag::kTarget : TargetFlag::kNonTarget;
    fv.values.resize(6);
    for (auto& v : fv.values) v = noise(gen);
    fv.values[1] += 1.5 * label;
    fv.values[4] = 3.0;            // constant column
    fv.values[5] = fv.values[0];   // exact duplicate of column 0
    d.push_row(fv);
  }

  SwldaOptions loose;
  loose.p_enter = 0.5;
  loose.p_remove = 0.6;
  const SwldaModel model = train(d, loose);
  CHECK(std::find(model.selected.begin(), model.selected.end(), 4) == model.selected.end());
  const bool has0 = std::find(model.selected.begin(), model.selected.end(), 0) !=
                    model.selected.end();
  const bool has5 = std::find(model.selected.begin(), model.selected.end(), 5) !=
                    model.selected.end();
  CHECK(!(has0 && has5));
}

TEST_CASE("max_features caps the selection") {
  const Dataset d = testref::random_dataset(21, 60, 10, 0.8);
  SwldaOptions opt;
  opt.p_enter = 0.5;
  opt.p_remove = 0.6;
  opt.max_features = 3;
  CHECK(train(d, opt).selected.size() <= 3);

  opt.max_features = 0;
  const SwldaModel empty = train(d, opt);
  CHECK(empty.selected.empty());
}

TEST_CASE("dataset construction and validation") {
  FeatureVector fv;
  fv.values = {1.0, 2.0};
  fv.label = TargetFlag::kTarget;
  Dataset d;
  d.push_row(fv);
  CHECK(d.rows == 1);
  CHECK(d.cols == 2);
  CHECK(d.at(0, 1) == 2.0);

  FeatureVector wrong;
  wrong.values = {1.0, 2.0, 3.0};
  wrong.label = TargetFlag::kNonTarget;
  CHECK_THROWS_AS(d.push_row(wrong), std::invalid_argument);

  FeatureVector unlabeled;
  unlabeled.values = {1.0, 2.0};
  CHECK_THROWS_AS(d.push_row(unlabeled), std::invalid_argument);

  CHECK_THROWS_AS(d.validate(), std::invalid_argument);  // too few rows

  const Dataset small = testref::random_dataset(1, 11, 3, 0.0);
  CHECK_THROWS_AS(small.validate(), std::invalid_argument);
  CHECK_THROWS_AS(train(small), std::invalid_argument);

  Dataset fine = testref::random_dataset(1, 12, 3, 0.0);
  fine.validate();

  Dataset single = fine;
  for (auto& l : single.labels) l = 1;
  CHECK_THROWS_AS(single.validate(), std::invalid_argument);

  Dataset bad_label = fine;
  bad_label.labels[0] = 0;
  CHECK_THROWS_AS(bad_label.validate(), std::invalid_argument);

  Dataset inf = fine;
  inf.features[5] = INFINITY;
  CHECK_THROWS_AS(inf.validate(), std::invalid_argument);

  Dataset ragged = fine;
  ragged.features.pop_back();
  CHECK_THROWS_AS(ragged.validate(), std::invalid_argument);
}

TEST_CASE("option validation") {
  const Dataset d = testref::random_dataset(2, 20, 4, 0.5);
  SwldaOptions opt;
  opt.p_enter = 0.0;
  CHECK_THROWS_AS(train(d, opt), std::invalid_argument);
  opt = SwldaOptions{};
  opt.p_enter = 0.2;
  opt.p_remove = 0.1;
  CHECK_THROWS_AS(train(d, opt), std::invalid_argument);
  opt = SwldaOptions{};
  opt.p_remove = 1.0;
  CHECK_THROWS_AS(train(d, opt), std::invalid_argument);
  opt = SwldaOptions{};
  opt.max_features = -1;
  CHECK_THROWS_AS(train(d, opt), std::invalid_argument);
}

TEST_CASE("scoring is affine in the features") {
  const Dataset d = testref::random_dataset(3, 40, 5, 0.7);
  const SwldaModel model = train(d);

  std::mt19937 gen(31);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> v(5), w(5), sum(5);
  for (int i = 0; i < 5; ++i) {
    v[static_cast<std::size_t>(i)] = noise(gen);
    w[static_cast<std::size_t>(i)] = noise(gen);
    sum[static_cast<std::size_t>(i)] =
        v[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(i)];
  }
  CHECK(score(model, sum) ==
        doctest::Approx(score(model, v) + score(model, w) - model.intercept).epsilon(1e-10));

  FeatureVector fv;
  fv.values = v;
  CHECK(score(model, fv) == score(model, v));
}

TEST_CASE("scoring rejects mismatched feature lengths by name") {
  const Dataset d = testref::random_dataset(4, 20, 5, 0.5);
  const SwldaModel model = train(d);
  try {
    score(model, std::vector<double>(7, 0.0));
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find('7') != std::string::npos);
    CHECK(msg.find('5') != std::string::npos);
  }
}
