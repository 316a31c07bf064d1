#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "besense/preprocess.hpp"

namespace besense {

/// Segmenter parameters. Thresholds given in samples are in samples of the
/// input series.
struct SegmenterParams {
  double window = 0.05;            // seconds
  std::size_t step = 1;            // samples
  double smoothing_gain = 100.0;
  double se_start = 0.1;
  double se_stop = 5.0;
  double se_increment = 0.1;
  std::size_t stability_count = 6;     // consecutive candidates that must agree
  std::size_t spread_samples = 10;     // ... within this many samples
  double min_amplitude_span = 1.84;    // drop segments with max-min below this

  void validate(double fs) const;
  std::size_t window_samples(double fs) const;
  /// se_start, se_start + se_increment, ... <= se_stop (50 values by default).
  std::vector<double> se_values() const;
};

struct GestureSegment {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  std::vector<double> waveform;  // series[start_idx..end_idx]
  double fs = 0.0;
  bool truncated = false;        // no end point before the trace ended

  double duration() const { return static_cast<double>(waveform.size()) / fs; }
};

/// Population variance of windows of w samples starting every `step` samples.
/// Length floor((T - w)/step) + 1. Throws when T < w or w < 2.
std::vector<double> sliding_variance(const std::vector<double>& x, std::size_t w,
                                     std::size_t step);

/// Sums of windows of w samples starting every `step` samples.
std::vector<double> sliding_sum(const std::vector<double>& x, std::size_t w, std::size_t step);

/// gain * sliding_variance(sliding_sum(nor1)).
std::vector<double> smooth_variance(const std::vector<double>& nor1, std::size_t w,
                                    std::size_t step, double gain);

/// nor1 and nor2 on a common index k, left-edge aligned: position(k) is the
/// series sample at the start of the windows behind nor2[k].
struct VarianceTraces {
  std::vector<double> nor1;  // full sliding variance
  std::vector<double> nor2;
  std::size_t step = 1;

  std::size_t size() const { return nor2.size(); }
  // nor2[k] covers sums starting at nor1[k*step^2], which cover the series from k*step^3.
  double nor1_at(std::size_t k) const { return nor1[k * step * step]; }
  std::size_t position(std::size_t k) const { return k * step * step * step; }
};

VarianceTraces variance_traces(const AmplitudeSeries& series, const SegmenterParams& params);

/// First stable start point at or after index `cursor`: for every se the first
/// k with sum_{i=cursor..k}(nor2 - nor1) > se is a candidate; the start is the
/// first candidate j where candidates j..j+stability_count-1 lie within
/// spread_samples. When candidates exist but none are stable the search
/// restarts after the earliest candidate. nullopt when no candidate is left.
std::optional<std::size_t> find_start_point(const VarianceTraces& v, std::size_t cursor,
                                            const SegmenterParams& params);

struct EndPoint {
  std::size_t index = 0;
  bool truncated = false;
};

/// First en > start with nor2[en] <= nor2[start]; the last index, flagged,
/// when there is none.
EndPoint mark_end_point(const std::vector<double>& nor2, std::size_t start);

/// Start/end marking before amplitude validation, in variance-trace indices.
struct Boundary {
  std::size_t start = 0;
  EndPoint end;
};
std::vector<Boundary> mark_boundaries(const VarianceTraces& v, const SegmenterParams& params);

/// Start indices (series samples) of all marked gestures.
std::vector<std::size_t> mark_start_points(const VarianceTraces& v,
                                           const SegmenterParams& params);

/// Boundaries mapped to series samples, with the amplitude-span validation outcome.
struct SegmentCandidate {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  double span = 0.0;
  bool truncated = false;
  bool kept = false;
};

struct SegmentationResult {
  VarianceTraces traces;
  std::vector<SegmentCandidate> candidates;
  std::vector<GestureSegment> segments;  // kept candidates
};

SegmentationResult segment_detailed(const AmplitudeSeries& series, const SegmenterParams& params);

/// Full segmentation of a filtered series.
std::vector<GestureSegment> segment(const AmplitudeSeries& series, const SegmenterParams& params);

/// Plot tables: "<stem>.nor.csv" (k,t,nor1,nor2) and "<stem>.segments.csv"
/// (start_idx,end_idx,start_t,end_t,span,truncated,kept).
void write_segmentation_tables(const std::filesystem::path& stem, const SegmentationResult& r,
                               double fs);

/// Segment boundaries file: "start_idx,end_idx,truncated" per line.
void write_segments(const std::filesystem::path& path, const std::vector<GestureSegment>& segs);
std::vector<GestureSegment> read_segments(const std::filesystem::path& path,
                                          const AmplitudeSeries& series);

}  // namespace besense
