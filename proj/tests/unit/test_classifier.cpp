#include <cmath>
#include <vector>

#include <doctest.h>

#include "besense/classifier.hpp"
#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "helpers.hpp"

using namespace besense;

namespace {

constexpr auto T = GestureKind::Typing;
constexpr auto M = GestureKind::MouseMove;

LabeledExample ex(double v, double s, double d, GestureKind k) { return {{v, s, d}, k}; }

// Two Gaussian blobs in feature space.
std::vector<LabeledExample> blobs(std::size_t per_class, double separation, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.push_back(ex(10 + n(rng), 2 + 0.3 * n(rng), 0.7 + 0.05 * n(rng), T));
    out.push_back(ex(10 + separation + n(rng), 5 + 0.3 * n(rng), 0.3 + 0.05 * n(rng), M));
  }
  return out;
}

}  // namespace

TEST_CASE("standardizer maps training data to zero mean and unit spread") {
  const auto data = blobs(50, 3.0, 1);
  const auto sc = Standardizer::fit(data);
  FeatureArray mean{};
  FeatureArray sq{};
  for (const auto& e : data) {
    const auto z = sc.apply(e.features);
    for (std::size_t j = 0; j < 3; ++j) {
      mean[j] += z[j];
      sq[j] += z[j] * z[j];
    }
  }
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(mean[j] / data.size() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    CHECK(sq[j] / data.size() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // A constant feature keeps unit scale.
  const auto c = Standardizer::fit({ex(1, 2, 3, T), ex(1, 5, 3, M)});
  CHECK(c.stddev[0] == 1.0);
  CHECK(c.apply({1, 2, 3})[0] == 0.0);
}

TEST_CASE("knn stores every training point") {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 10; ++i) data.push_back(ex(i, 1, 1, i < 5 ? T : M));
  const auto m = fit(ClassifierKind::Knn, data, 3);
  CHECK(m.points.size() == 10);
  CHECK(m.labels.size() == 10);
}

TEST_CASE("knn with k = 1 returns the label of an exact match") {
  const auto data = blobs(20, 0.5, 2);
  const auto m = fit(ClassifierKind::Knn, data, 1);
  for (const auto& e : data) CHECK(predict(m, e.features) == e.label);
}

TEST_CASE("knn tied vote goes to the closer class") {
  // k = 2 with one neighbour from each class; symmetric so standardizing keeps 0 central.
  const std::vector<LabeledExample> data{ex(-1, 0, 0, T), ex(1, 0, 0, M), ex(-5, 0, 0, T),
                                         ex(5, 0, 0, M)};
  const auto m = fit(ClassifierKind::Knn, data, 2);
  CHECK(predict(m, {-0.5, 0, 0}) == T);
  CHECK(predict(m, {0.5, 0, 0}) == M);
  CHECK(predict(m, {0.0, 0, 0}) == T);  // exact tie -> Typing
}

TEST_CASE("knn is unchanged by uniform rescaling of the raw features") {
  const auto data = blobs(40, 1.0, 3);
  const auto queries = blobs(30, 1.0, 4);
  const auto m = fit(ClassifierKind::Knn, data, 3);
  for (double c : {1e-3, 2.0, 1e5}) {
    auto scaled = data;
    for (auto& e : scaled) {
      e.features.variance *= c;
      e.features.slope_ratio *= c;
      e.features.duration *= c;
    }
    const auto ms = fit(ClassifierKind::Knn, scaled, 3);
    for (const auto& q : queries) {
      const FeatureVector qs{q.features.variance * c, q.features.slope_ratio * c,
                             q.features.duration * c};
      CHECK(predict(ms, qs) == predict(m, q.features));
    }
  }
}

TEST_CASE("gaussian naive bayes estimates priors and means") {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 5; ++i) {
    data.push_back(ex(1, 0, 0, T));
    data.push_back(ex(3, 0, 0, M));
  }
  const auto m = fit(ClassifierKind::GaussianNb, data);
  CHECK(m.priors[0] == 0.5);
  CHECK(m.priors[1] == 0.5);
  // Means in raw units after undoing the standardization.
  CHECK(m.means[0][0] * m.scaler.stddev[0] + m.scaler.mean[0] == doctest::Approx(1.0));
  CHECK(m.means[1][0] * m.scaler.stddev[0] + m.scaler.mean[0] == doctest::Approx(3.0));
  for (const auto& v : m.variances) {
    for (double x : v) CHECK(x >= kVarianceFloor);
  }
}

TEST_CASE("gaussian naive bayes falls back to the prior at the midpoint") {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 3; ++i) {
    data.push_back(ex(-1, 0, 0, T));
    data.push_back(ex(1, 0, 0, T));
  }
  data.push_back(ex(3, 0, 0, M));
  data.push_back(ex(5, 0, 0, M));
  const auto m = fit(ClassifierKind::GaussianNb, data);
  CHECK(predict(m, {2.0, 0, 0}) == T);

  for (auto& e : data) e.label = e.label == T ? M : T;
  CHECK(predict(fit(ClassifierKind::GaussianNb, data), {2.0, 0, 0}) == M);
}

TEST_CASE("single-class training is rejected") {
  const std::vector<LabeledExample> data{ex(1, 1, 1, T), ex(2, 2, 2, T)};
  CHECK_THROWS_AS(fit(ClassifierKind::Knn, data), Error);
  CHECK_THROWS_AS(fit(ClassifierKind::GaussianNb, data), Error);
  CHECK_THROWS_AS(fit(ClassifierKind::Knn, blobs(3, 1, 1), 0), Error);
}

TEST_CASE("stratified folds balance the classes") {
  auto data = blobs(37, 3.0, 5);
  data.push_back(ex(1, 1, 1, T));
  const auto folds = stratified_folds(data, 10, 7);
  std::vector<std::array<std::size_t, 2>> count(10);
  for (std::size_t i = 0; i < data.size(); ++i) ++count[folds[i]][static_cast<std::size_t>(data[i].label)];
  for (const auto& c : count) {
    CHECK(c[0] >= 3);
    CHECK(c[0] <= 5);
    CHECK(c[1] >= 3);
    CHECK(c[1] <= 4);
  }
  CHECK(stratified_folds(data, 10, 7) == folds);
}

TEST_CASE("cross-validation on separable data is perfect") {
  const auto data = blobs(50, 40.0, 6);
  for (auto kind : {ClassifierKind::Knn, ClassifierKind::GaussianNb}) {
    const auto r = cross_validate(kind, data, 10, 1);
    CHECK(r.mean_accuracy == 1.0);
    CHECK(r.fold_accuracy.size() == 10);
    CHECK(r.confusion[0][0] == 50);
    CHECK(r.confusion[1][1] == 50);
  }
}

TEST_CASE("cross-validation on shuffled labels is at chance") {
  auto data = blobs(250, 0.0, 8);
  Rng rng(9);
  for (auto& e : data) e.label = (rng() & 1U) ? T : M;
  for (auto kind : {ClassifierKind::Knn, ClassifierKind::GaussianNb}) {
    const auto r = cross_validate(kind, data, 10, 2);
    CHECK(r.mean_accuracy == doctest::Approx(0.5).epsilon(0.2));
  }
}

TEST_CASE("cross-validation is deterministic") {
  const auto data = blobs(30, 1.0, 10);
  const auto a = cross_validate(ClassifierKind::Knn, data, 5, 3);
  const auto b = cross_validate(ClassifierKind::Knn, data, 5, 3);
  CHECK(a.fold_accuracy == b.fold_accuracy);
  CHECK(a.confusion == b.confusion);
  CHECK_THROWS_AS(cross_validate(ClassifierKind::Knn, blobs(2, 1, 1), 10, 3), Error);
}

TEST_CASE("model files round-trip") {
  const auto dir = test::scratch("models");
  const auto data = blobs(25, 1.0, 11);
  const auto queries = blobs(25, 1.0, 12);
  for (auto kind : {ClassifierKind::Knn, ClassifierKind::GaussianNb}) {
    const auto m = fit(kind, data, 3);
    save_model(dir / "m.json", m);
    const auto back = load_model(dir / "m.json");
    CHECK(back.kind == m.kind);
    CHECK(back.scaler.mean == m.scaler.mean);
    CHECK(back.scaler.stddev == m.scaler.stddev);
    CHECK(back.points == m.points);
    CHECK(back.labels == m.labels);
    CHECK(back.priors == m.priors);
    CHECK(back.means == m.means);
    CHECK(back.variances == m.variances);
    for (const auto& q : queries) CHECK(predict(back, q.features) == predict(m, q.features));
  }
  try {
    model_from_json(R"({"kind":"svm"})");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

TEST_CASE("classifier names") {
  CHECK(parse_classifier_kind("knn") == ClassifierKind::Knn);
  CHECK(parse_classifier_kind("gaussian_nb") == ClassifierKind::GaussianNb);
  CHECK(parse_classifier_kind("nb") == ClassifierKind::GaussianNb);
  CHECK_FALSE(parse_classifier_kind("svm").has_value());
}
