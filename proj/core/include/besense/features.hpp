#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "besense/labels.hpp"
#include "besense/segmentation.hpp"

namespace besense {

/// Largest reported slope ratio; a half with zero slope against a sloped half
/// would otherwise be infinite.
inline constexpr double kSlopeRatioCap = 1000.0;

struct FeatureVector {
  double variance = 0.0;
  double slope_ratio = 1.0;
  double duration = 0.0;  // seconds

  std::array<double, 3> as_array() const { return {variance, slope_ratio, duration}; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LabeledExample {
  FeatureVector features;
  GestureKind label = GestureKind::Typing;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// (v_max - v_min) / ((i_max - i_min) / fs) with first occurrences; 0 when
/// both extrema sit on the same sample.
double half_slope(const double* data, std::size_t n, double fs);

/// Variance, slope-ratio symmetry and duration of one waveform. The waveform
/// is split at ceil(n/2); slope_ratio = max(|s1/s2|, |s2/s1|), 1 when both
/// slopes vanish, capped at kSlopeRatioCap. Throws for n < 4.
FeatureVector extract_features(const std::vector<double>& waveform, double fs);
FeatureVector extract_features(const GestureSegment& segment);

/// Text table with header "variance,slope_ratio,duration,label".
void write_dataset(const std::filesystem::path& path, const std::vector<LabeledExample>& data);
std::vector<LabeledExample> read_dataset(const std::filesystem::path& path);

}  // namespace besense
