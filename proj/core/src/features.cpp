#include "besense/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "besense/error.hpp"
#include "besense/preprocess.hpp"
#include "besense/text_io.hpp"

namespace besense {

double half_slope(const double* data, std::size_t n, double fs) {
  const auto [lo, hi] = std::minmax_element(data, data + n);
  // minmax_element returns the last maximum; the rule wants the first.
  const double* first_hi = std::max_element(data, data + n);
  const auto i_min = static_cast<double>(lo - data);
  const auto i_max = static_cast<double>(first_hi - data);
  if (i_max == i_min) return 0.0;
  return (*hi - *lo) / ((i_max - i_min) / fs);
}

FeatureVector extract_features(const std::vector<double>& waveform, double fs) {
  require(waveform.size() >= 4, "feature extraction needs at least 4 samples");
  require(std::isfinite(fs) && fs > 0.0, "fs must be > 0");
  const std::size_t n = waveform.size();
  const std::size_t split = (n + 1) / 2;
  const double s1 = std::abs(half_slope(waveform.data(), split, fs));
  const double s2 = std::abs(half_slope(waveform.data() + split, n - split, fs));

  FeatureVector f;
  f.variance = population_variance(waveform.data(), n);
  f.duration = static_cast<double>(n) / fs;
  if (s1 == 0.0 && s2 == 0.0) {
    f.slope_ratio = 1.0;
  } else if (s1 == 0.0 || s2 == 0.0) {
    f.slope_ratio = kSlopeRatioCap;
  } else {
    f.slope_ratio = std::min(kSlopeRatioCap, std::max(s1 / s2, s2 / s1));
  }
  return f;
}

FeatureVector extract_features(const GestureSegment& segment) {
  return extract_features(segment.waveform, segment.fs);
}

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledExample>& data) {
  std::string out = "variance,slope_ratio,duration,label\n";
  for (const auto& e : data) {
    out += io::format_double(e.features.variance) + ',' +
           io::format_double(e.features.slope_ratio) + ',' +
           io::format_double(e.features.duration) + ',' + std::string(to_string(e.label)) + '\n';
  }
  io::write_file_atomic(path, out);
}

std::vector<LabeledExample> read_dataset(const std::filesystem::path& path) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  std::vector<LabeledExample> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty() || t.front() == '#' || t.rfind("variance", 0) == 0) continue;
    const auto f = io::split_fields(t);
    const std::string at = where + ":" + std::to_string(k + 1);
    if (f.size() != 4) fail(ErrorKind::Parse, at + ": expected variance,slope_ratio,duration,label");
    LabeledExample e;
    e.features.variance = io::parse_double(f[0], where, k + 1, "variance");
    e.features.slope_ratio = io::parse_double(f[1], where, k + 1, "slope_ratio");
    e.features.duration = io::parse_double(f[2], where, k + 1, "duration");
    const auto label = parse_gesture_kind(f[3]);
    if (!label) fail(ErrorKind::Parse, at + ": field 'label': unknown '" + std::string(f[3]) + "'");
    e.label = *label;
    if (e.features.variance < 0.0 || e.features.slope_ratio < 1.0 || e.features.duration <= 0.0) {
      fail(ErrorKind::Parse, at + ": feature out of range");
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace besense
