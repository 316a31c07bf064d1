#include "besense/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "besense/error.hpp"
#include "besense/text_io.hpp"

namespace besense {

void SegmenterParams::validate(double fs) const {
  require(std::isfinite(window) && window > 0.0, "segmenter window must be > 0");
  require(std::isfinite(fs) && window * fs >= 2.0, "segmenter window must span >= 2 samples");
  require(step >= 1, "segmenter step must be >= 1 sample");
  require(std::isfinite(smoothing_gain) && smoothing_gain > 0.0, "smoothing gain must be > 0");
  require(std::isfinite(se_start) && se_start > 0.0, "se start must be > 0");
  require(std::isfinite(se_increment) && se_increment > 0.0, "se increment must be > 0");
  require(std::isfinite(se_stop) && se_stop >= se_start, "se stop must be >= se start");
  require(stability_count >= 2, "stability count must be >= 2");
  require(spread_samples >= 1, "spread threshold must be >= 1 sample");
  require(se_values().size() >= stability_count, "se sweep yields fewer values than stability count");
  require(std::isfinite(min_amplitude_span) && min_amplitude_span >= 0.0,
          "min amplitude span must be >= 0");
}

std::size_t SegmenterParams::window_samples(double fs) const {
  return static_cast<std::size_t>(std::llround(window * fs));
}

std::vector<double> SegmenterParams::se_values() const {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double se = se_start + static_cast<double>(i) * se_increment;
    if (se > se_stop + 1e-9 * se_increment) break;
    out.push_back(se);
  }
  return out;
}

std::vector<double> sliding_variance(const std::vector<double>& x, std::size_t w,
                                     std::size_t step) {
  require(w >= 2, "variance window must span >= 2 samples");
  require(step >= 1, "step must be >= 1");
  require(x.size() >= w, "series is shorter than one window");
  const std::size_t n = (x.size() - w) / step + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = population_variance(x.data() + i * step, w);
  return out;
}

std::vector<double> sliding_sum(const std::vector<double>& x, std::size_t w, std::size_t step) {
  require(w >= 1 && step >= 1, "window and step must be >= 1");
  require(x.size() >= w, "series is shorter than one window");
  const std::size_t n = (x.size() - w) / step + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += x[i * step + j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> smooth_variance(const std::vector<double>& nor1, std::size_t w,
                                    std::size_t step, double gain) {
  auto out = sliding_variance(sliding_sum(nor1, w, step), w, step);
  for (double& v : out) v *= gain;
  return out;
}

VarianceTraces variance_traces(const AmplitudeSeries& series, const SegmenterParams& params) {
  params.validate(series.fs);
  const std::size_t w = params.window_samples(series.fs);
  VarianceTraces v;
  v.step = params.step;
  v.nor1 = sliding_variance(series.values, w, params.step);
  v.nor2 = smooth_variance(v.nor1, w, params.step, params.smoothing_gain);
  return v;
}

std::optional<std::size_t> find_start_point(const VarianceTraces& v, std::size_t cursor,
                                            const SegmenterParams& params) {
  const auto se = params.se_values();
  const std::size_t n = v.size();
  while (cursor < n) {
    // First crossings are monotone in se, so one pass finds all of them.
    std::vector<std::size_t> cands;
    double cum = 0.0;
    for (std::size_t k = cursor; k < n && cands.size() < se.size(); ++k) {
      cum += v.nor2[k] - v.nor1_at(k);
      while (cands.size() < se.size() && se[cands.size()] - cum < 0.0) cands.push_back(k);
    }
    if (cands.empty()) return std::nullopt;
    const std::size_t m = params.stability_count;
    for (std::size_t j = 0; j + m <= cands.size(); ++j) {
      if (v.position(cands[j + m - 1]) - v.position(cands[j]) < params.spread_samples) {
        return cands[j];
      }
    }
    cursor = cands.front() + 1;
  }
  return std::nullopt;
}

EndPoint mark_end_point(const std::vector<double>& nor2, std::size_t start) {
  require(start < nor2.size(), "start point outside the variance trace");
  const double ref = nor2[start];
  for (std::size_t k = start + 1; k < nor2.size(); ++k) {
    if (nor2[k] <= ref) return {k, false};
  }
  return {nor2.size() - 1, true};
}

std::vector<Boundary> mark_boundaries(const VarianceTraces& v, const SegmenterParams& params) {
  std::vector<Boundary> out;
  std::size_t cursor = 0;
  while (cursor < v.size()) {
    const auto start = find_start_point(v, cursor, params);
    if (!start) break;
    const EndPoint end = mark_end_point(v.nor2, *start);
    if (end.index <= *start) break;  // start on the last sample: nothing left to mark
    out.push_back({*start, end});
    if (end.truncated) break;
    cursor = end.index + 1;
  }
  return out;
}

std::vector<std::size_t> mark_start_points(const VarianceTraces& v,
                                           const SegmenterParams& params) {
  std::vector<std::size_t> out;
  for (const auto& b : mark_boundaries(v, params)) out.push_back(v.position(b.start));
  return out;
}

SegmentationResult segment_detailed(const AmplitudeSeries& series, const SegmenterParams& params) {
  series.validate();
  SegmentationResult r;
  r.traces = variance_traces(series, params);
  const std::size_t last = series.values.size() - 1;
  for (const auto& b : mark_boundaries(r.traces, params)) {
    SegmentCandidate c;
    c.start_idx = r.traces.position(b.start);
    c.end_idx = b.end.truncated ? last : std::min(last, r.traces.position(b.end.index));
    c.truncated = b.end.truncated;
    const auto first = series.values.begin() + static_cast<std::ptrdiff_t>(c.start_idx);
    const auto stop = series.values.begin() + static_cast<std::ptrdiff_t>(c.end_idx) + 1;
    const auto [lo, hi] = std::minmax_element(first, stop);
    c.span = *hi - *lo;
    c.kept = c.end_idx > c.start_idx && c.span >= params.min_amplitude_span;
    r.candidates.push_back(c);
    if (c.kept) r.segments.push_back({c.start_idx, c.end_idx, {first, stop}, series.fs, c.truncated});
  }
  return r;
}

std::vector<GestureSegment> segment(const AmplitudeSeries& series, const SegmenterParams& params) {
  return segment_detailed(series, params).segments;
}

void write_segmentation_tables(const std::filesystem::path& stem, const SegmentationResult& r,
                               double fs) {
  std::string nor = "k,t,nor1,nor2\n";
  const auto& v = r.traces;
  for (std::size_t k = 0; k < v.size(); ++k) {
    nor += std::to_string(k) + ',' + io::format_double(static_cast<double>(v.position(k)) / fs) +
           ',' + io::format_double(v.nor1_at(k)) + ',' + io::format_double(v.nor2[k]) + '\n';
  }
  io::write_file_atomic(stem.string() + ".nor.csv", nor);

  std::string seg = "start_idx,end_idx,start_t,end_t,span,truncated,kept\n";
  for (const auto& c : r.candidates) {
    seg += std::to_string(c.start_idx) + ',' + std::to_string(c.end_idx) + ',' +
           io::format_double(static_cast<double>(c.start_idx) / fs) + ',' +
           io::format_double(static_cast<double>(c.end_idx) / fs) + ',' +
           io::format_double(c.span) + ',' + (c.truncated ? "1" : "0") + ',' +
           (c.kept ? "1" : "0") + '\n';
  }
  io::write_file_atomic(stem.string() + ".segments.csv", seg);
}

void write_segments(const std::filesystem::path& path, const std::vector<GestureSegment>& segs) {
  std::string out;
  for (const auto& s : segs) {
    out += std::to_string(s.start_idx) + ',' + std::to_string(s.end_idx) + ',' +
           (s.truncated ? "1" : "0") + '\n';
  }
  io::write_file_atomic(path, out);
}

std::vector<GestureSegment> read_segments(const std::filesystem::path& path,
                                          const AmplitudeSeries& series) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  std::vector<GestureSegment> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty() || t.front() == '#') continue;
    const auto f = io::split_fields(t);
    const std::string at = where + ":" + std::to_string(k + 1);
    if (f.size() != 3) fail(ErrorKind::Parse, at + ": expected start_idx,end_idx,truncated");
    const long long s = io::parse_int(f[0], where, k + 1, "start_idx");
    const long long e = io::parse_int(f[1], where, k + 1, "end_idx");
    const long long tr = io::parse_int(f[2], where, k + 1, "truncated");
    if (s < 0 || e <= s || static_cast<std::size_t>(e) >= series.values.size()) {
      fail(ErrorKind::Parse, at + ": segment outside the amplitude series");
    }
    if (!out.empty() && out.back().end_idx >= static_cast<std::size_t>(s)) {
      fail(ErrorKind::Parse, at + ": segments must be sorted and disjoint");
    }
    const auto first = series.values.begin() + s;
    out.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(e),
                   {first, series.values.begin() + e + 1}, series.fs, tr != 0});
  }
  return out;
}

}  // namespace besense
