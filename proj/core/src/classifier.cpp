#include "besense/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "besense/text_io.hpp"

namespace besense {

using nlohmann::json;

std::string_view to_string(ClassifierKind k) {
  return k == ClassifierKind::Knn ? "knn" : "gaussian_nb";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view s) {
  if (s == "knn") return ClassifierKind::Knn;
  if (s == "gaussian_nb" || s == "nb") return ClassifierKind::GaussianNb;
  return std::nullopt;
}

Standardizer Standardizer::fit(const std::vector<LabeledExample>& data) {
  require(!data.empty(), "cannot standardize an empty training set");
  Standardizer s;
  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double mean = 0.0;
    for (const auto& e : data) mean += e.features.as_array()[j];
    mean /= n;
    double var = 0.0;
    for (const auto& e : data) {
      const double d = e.features.as_array()[j] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    s.mean[j] = mean;
    s.stddev[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

FeatureArray Standardizer::apply(const FeatureVector& f) const {
  const auto raw = f.as_array();
  FeatureArray out{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) out[j] = (raw[j] - mean[j]) / stddev[j];
  return out;
}

ClassifierModel fit(ClassifierKind kind, const std::vector<LabeledExample>& training,
                    std::size_t k) {
  std::array<std::size_t, 2> counts{};
  for (const auto& e : training) ++counts[static_cast<std::size_t>(e.label)];
  require(counts[0] > 0 && counts[1] > 0, "training set must contain both gesture classes");

  ClassifierModel m;
  m.kind = kind;
  m.scaler = Standardizer::fit(training);
  if (kind == ClassifierKind::Knn) {
    require(k >= 1, "KNN needs k >= 1");
    m.k = k;
    for (const auto& e : training) {
      m.points.push_back(m.scaler.apply(e.features));
      m.labels.push_back(e.label);
    }
    return m;
  }

  const double n = static_cast<double>(training.size());
  for (std::size_t c = 0; c < 2; ++c) {
    m.priors[c] = static_cast<double>(counts[c]) / n;
    FeatureArray mean{};
    for (const auto& e : training) {
      if (static_cast<std::size_t>(e.label) != c) continue;
      const auto z = m.scaler.apply(e.features);
      for (std::size_t j = 0; j < kFeatureCount; ++j) mean[j] += z[j];
    }
    for (double& v : mean) v /= static_cast<double>(counts[c]);
    FeatureArray var{};
    for (const auto& e : training) {
      if (static_cast<std::size_t>(e.label) != c) continue;
      const auto z = m.scaler.apply(e.features);
      for (std::size_t j = 0; j < kFeatureCount; ++j) var[j] += (z[j] - mean[j]) * (z[j] - mean[j]);
    }
    for (double& v : var) v = std::max(kVarianceFloor, v / static_cast<double>(counts[c]));
    m.means[c] = mean;
    m.variances[c] = var;
  }
  return m;
}

namespace {

GestureKind predict_knn(const ClassifierModel& m, const FeatureArray& q) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(m.points.size());
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double diff = m.points[i][j] - q[j];
      acc += diff * diff;
    }
    d.emplace_back(std::sqrt(acc), i);
  }
  const std::size_t k = std::min(m.k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::array<std::size_t, 2> votes{};
  std::array<double, 2> weight{};
  std::array<bool, 2> exact{};
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = static_cast<std::size_t>(m.labels[d[i].second]);
    ++votes[c];
    if (d[i].first == 0.0) {
      exact[c] = true;
    } else {
      weight[c] += 1.0 / d[i].first;
    }
  }
  if (votes[0] != votes[1]) return votes[0] > votes[1] ? GestureKind::Typing : GestureKind::MouseMove;
  if (exact[0] != exact[1]) return exact[0] ? GestureKind::Typing : GestureKind::MouseMove;
  return weight[1] > weight[0] ? GestureKind::MouseMove : GestureKind::Typing;
}

double log_posterior(const ClassifierModel& m, std::size_t c, const FeatureArray& q) {
  double lp = std::log(m.priors[c]);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    const double v = m.variances[c][j];
    const double diff = q[j] - m.means[c][j];
    lp -= 0.5 * std::log(2.0 * std::numbers::pi * v) + diff * diff / (2.0 * v);
  }
  return lp;
}

}  // namespace

GestureKind predict(const ClassifierModel& model, const FeatureVector& features) {
  const auto q = model.scaler.apply(features);
  if (model.kind == ClassifierKind::Knn) {
    require(!model.points.empty(), "KNN model has no stored examples");
    return predict_knn(model, q);
  }
  return log_posterior(model, 1, q) > log_posterior(model, 0, q) ? GestureKind::MouseMove
                                                                 : GestureKind::Typing;
}

std::vector<std::size_t> stratified_folds(const std::vector<LabeledExample>& data,
                                          std::size_t folds, std::uint64_t seed) {
  require(folds >= 2, "cross-validation needs at least 2 folds");
  require(folds <= data.size(), "more folds than examples");
  std::vector<std::size_t> fold(data.size());
  Rng rng(seed);
  std::size_t next = 0;
  for (GestureKind c : kGestureKinds) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == c) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) fold[i] = next++ % folds;
  }
  return fold;
}

CvResult cross_validate(ClassifierKind kind, const std::vector<LabeledExample>& data,
                        std::size_t folds, std::uint64_t seed, std::size_t k) {
  const auto fold = stratified_folds(data, folds, seed);
  CvResult r;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    for (std::size_t i = 0; i < data.size(); ++i) (fold[i] == f ? test : train).push_back(data[i]);
    const auto model = fit(kind, train, k);
    std::size_t correct = 0;
    for (const auto& e : test) {
      const GestureKind p = predict(model, e.features);
      ++r.confusion[static_cast<std::size_t>(e.label)][static_cast<std::size_t>(p)];
      if (p == e.label) ++correct;
    }
    r.fold_accuracy.push_back(test.empty() ? 0.0 : static_cast<double>(correct) / test.size());
  }
  r.mean_accuracy = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) /
                    static_cast<double>(folds);
  return r;
}

std::string model_to_json(const ClassifierModel& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  j["standardization"] = {{"mean", m.scaler.mean}, {"std", m.scaler.stddev}};
  if (m.kind == ClassifierKind::Knn) {
    j["k"] = m.k;
    json pts = json::array();
    for (std::size_t i = 0; i < m.points.size(); ++i) {
      pts.push_back({{"x", m.points[i]}, {"label", std::string(to_string(m.labels[i]))}});
    }
    j["points"] = pts;
  } else {
    json classes = json::array();
    for (std::size_t c = 0; c < 2; ++c) {
      classes.push_back({{"label", std::string(to_string(kGestureKinds[c]))},
                         {"prior", m.priors[c]},
                         {"mean", m.means[c]},
                         {"variance", m.variances[c]}});
    }
    j["classes"] = classes;
  }
  return j.dump(2) + "\n";
}

ClassifierModel model_from_json(std::string_view text, std::string_view where) {
  try {
    const json j = json::parse(text);
    ClassifierModel m;
    const auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::Parse, std::string(where) + ": unknown classifier kind");
    m.kind = *kind;
    m.scaler.mean = j.at("standardization").at("mean").get<FeatureArray>();
    m.scaler.stddev = j.at("standardization").at("std").get<FeatureArray>();
    if (m.kind == ClassifierKind::Knn) {
      m.k = j.at("k").get<std::size_t>();
      for (const auto& p : j.at("points")) {
        m.points.push_back(p.at("x").get<FeatureArray>());
        const auto label = parse_gesture_kind(p.at("label").get<std::string>());
        if (!label) fail(ErrorKind::Parse, std::string(where) + ": unknown label");
        m.labels.push_back(*label);
      }
    } else {
      const auto& classes = j.at("classes");
      if (classes.size() != 2) fail(ErrorKind::Parse, std::string(where) + ": need 2 classes");
      for (std::size_t c = 0; c < 2; ++c) {
        m.priors[c] = classes[c].at("prior").get<double>();
        m.means[c] = classes[c].at("mean").get<FeatureArray>();
        m.variances[c] = classes[c].at("variance").get<FeatureArray>();
      }
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string(where) + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model) {
  io::write_file_atomic(path, model_to_json(model));
}

ClassifierModel load_model(const std::filesystem::path& path) {
  return model_from_json(io::read_file(path), path.string());
}

}  // namespace besense
