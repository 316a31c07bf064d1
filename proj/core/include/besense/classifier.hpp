#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "besense/features.hpp"

namespace besense {

enum class ClassifierKind { Knn, GaussianNb };

std::string_view to_string(ClassifierKind k);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view s);

inline constexpr std::size_t kFeatureCount = 3;
using FeatureArray = std::array<double, kFeatureCount>;

/// Per-feature z-scoring fitted on a training set. A constant feature gets std 1.
struct Standardizer {
  FeatureArray mean{};
  FeatureArray stddev{1.0, 1.0, 1.0};

  static Standardizer fit(const std::vector<LabeledExample>& data);
  FeatureArray apply(const FeatureVector& f) const;
};

inline constexpr double kVarianceFloor = 1e-9;

/// 2x2 counts indexed [true][predicted] in GestureKind order.
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::Knn;
  Standardizer scaler;

  // KNN
  std::size_t k = 3;
  std::vector<FeatureArray> points;  // standardized
  std::vector<GestureKind> labels;

  // Gaussian naive Bayes, per class in GestureKind order, standardized space
  std::array<double, 2> priors{};
  std::array<FeatureArray, 2> means{};
  std::array<FeatureArray, 2> variances{};
};

/// Throws unless both classes are present (and k >= 1 for KNN).
ClassifierModel fit(ClassifierKind kind, const std::vector<LabeledExample>& training,
                    std::size_t k = 3);

/// KNN: majority among the k nearest (Euclidean, standardized); a tied vote
/// goes to the class with the larger sum of inverse distances, then Typing.
/// GaussianNB: argmax log-posterior, Typing on exact ties.
GestureKind predict(const ClassifierModel& model, const FeatureVector& features);

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  Confusion confusion{};
};

/// Stratified k-fold assignment from `seed`; the standardizer and model are
/// refit on every training fold.
std::vector<std::size_t> stratified_folds(const std::vector<LabeledExample>& data,
                                          std::size_t folds, std::uint64_t seed);

CvResult cross_validate(ClassifierKind kind, const std::vector<LabeledExample>& data,
                        std::size_t folds, std::uint64_t seed, std::size_t k = 3);

std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(std::string_view text, std::string_view where = "model");
void save_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace besense
