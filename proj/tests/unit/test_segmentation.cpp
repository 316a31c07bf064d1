#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "besense/config.hpp"
#include "besense/error.hpp"
#include "besense/experiments.hpp"
#include "besense/rng.hpp"
#include "besense/segmentation.hpp"
#include "helpers.hpp"

using namespace besense;

namespace {

AmplitudeSeries filtered_plan(const PipelineConfig& cfg, const GesturePlan& plan,
                              std::uint64_t seed, CsiTrace* keep = nullptr) {
  const auto trace = simulate_plan(cfg, plan, seed);
  if (keep) *keep = trace;
  return preprocess_trace(cfg, trace);
}

// Flat level plus low-passed noise at the desk-scene quiet level.
AmplitudeSeries quiet_series(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> d(0.0, 0.4);
  AmplitudeSeries s{1000.0, std::vector<double>(n), 0};
  for (auto& v : s.values) v = 20.0 + d(rng);
  return butterworth_lowpass(s, {});
}

void add_bump(AmplitudeSeries& s, double start, double duration, double height) {
  const auto i0 = static_cast<std::size_t>(start * s.fs);
  const auto n = static_cast<std::size_t>(duration * s.fs);
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n);
    s.values[i0 + i] += height * (1.0 - std::cos(2.0 * std::numbers::pi * u)) / 2.0;
  }
}

}  // namespace

TEST_CASE("sliding variance") {
  CHECK(sliding_variance(std::vector<double>(20, 3.0), 5, 1) == std::vector<double>(16, 0.0));
  std::vector<double> alt;
  for (int i = 0; i < 12; ++i) alt.push_back(i % 2);
  CHECK(sliding_variance(alt, 2, 1) == std::vector<double>(11, 0.25));
  CHECK(sliding_variance(alt, 4, 3).size() == 3);  // floor((12-4)/3)+1
  CHECK_THROWS_AS(sliding_variance(alt, 13, 1), Error);
  CHECK_THROWS_AS(sliding_variance(alt, 1, 1), Error);
}

TEST_CASE("smoothing") {
  CHECK(smooth_variance(std::vector<double>(100, 0.0), 10, 1, 100.0) ==
        std::vector<double>(82, 0.0));
  // A ramp's moving sum is a ramp, whose sliding variance is constant.
  std::vector<double> ramp;
  for (int i = 0; i < 300; ++i) ramp.push_back(0.01 * i);
  const auto nor2 = smooth_variance(ramp, 50, 1, 100.0);
  for (std::size_t i = 1; i < nor2.size(); ++i) {
    CHECK(nor2[i] == doctest::Approx(nor2[0]).epsilon(1e-9));
  }
  CHECK(nor2[0] > 0.0);
}

TEST_CASE("nor1 and nor2 agree on quiet spans and separate on gestures") {
  const PipelineConfig cfg;
  CsiTrace trace;
  const GesturePlan plan{{{1.5, GestureKind::Typing, 0.02, 0.7}, {4.0, GestureKind::MouseMove, 0.04, 0.3}},
                         6.0};
  const auto filtered = filtered_plan(cfg, plan, 31, &trace);
  const auto v = variance_traces(filtered, cfg.segmenter);
  double quiet = 0.0;
  double active = 0.0;
  std::size_t nq = 0;
  std::size_t na = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t p = v.position(k);
    const double diff = std::abs(v.nor1_at(k) - v.nor2[k]);
    bool in = false;
    bool near = false;
    for (const auto& a : trace.annotations()) {
      in |= p >= a.start_idx && p <= a.end_idx;
      near |= p + 300 >= a.start_idx && p <= a.end_idx + 300;
    }
    if (in) {
      active += diff;
      ++na;
    } else if (!near && p > 300) {
      quiet += diff;
      ++nq;
    }
  }
  REQUIRE(nq > 0);
  REQUIRE(na > 0);
  CHECK(quiet / nq < 0.05 * (active / na));
}

TEST_CASE("end point") {
  const std::vector<double> bump{0, 1, 3, 6, 3, 1, 0, 0};
  CHECK(mark_end_point(bump, 1).index == 5);
  CHECK(mark_end_point(bump, 0).index == 6);
  CHECK_FALSE(mark_end_point(bump, 0).truncated);
  const std::vector<double> rising{0, 1, 2, 3};
  const auto e = mark_end_point(rising, 1);
  CHECK(e.truncated);
  CHECK(e.index == 3);
}

TEST_CASE("flat traces have no gestures") {
  const PipelineConfig cfg;
  AmplitudeSeries flat{1000.0, std::vector<double>(4000, 20.0), 0};
  CHECK(segment(flat, cfg.segmenter).empty());
  CHECK(mark_start_points(variance_traces(flat, cfg.segmenter), cfg.segmenter).empty());
  CHECK(segment(quiet_series(6000, 3), cfg.segmenter).empty());
}

TEST_CASE("two gestures two seconds apart") {
  const PipelineConfig cfg;
  CsiTrace trace;
  const GesturePlan plan{{{1.2, GestureKind::Typing, 0.02, 0.7}, {3.9, GestureKind::Typing, 0.02, 0.7}},
                         5.5};
  const auto filtered = filtered_plan(cfg, plan, 5, &trace);
  const auto starts = mark_start_points(variance_traces(filtered, cfg.segmenter), cfg.segmenter);
  const auto segs = segment(filtered, cfg.segmenter);
  REQUIRE(segs.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = trace.annotations()[i];
    CHECK(std::abs(static_cast<double>(segs[i].start_idx) - static_cast<double>(a.start_idx)) <= 100);
    CHECK(std::abs(static_cast<double>(segs[i].end_idx) - static_cast<double>(a.end_idx)) <= 100);
    CHECK(std::find(starts.begin(), starts.end(), segs[i].start_idx) != starts.end());
  }
}

TEST_CASE("seventeen keystrokes give seventeen segments") {
  const PipelineConfig cfg;
  CHECK(keystroke_train_segments(cfg, stage_seed(cfg, SeedStream::Simulation)) == 17);
  CHECK(keystroke_train_segments(cfg, 12345) == 17);
}

TEST_CASE("a small blip is marked but dropped by the span check") {
  SegmenterParams params;
  auto s = quiet_series(7000, 21);
  add_bump(s, 1.5, 0.7, 8.0);
  add_bump(s, 4.5, 0.7, 1.2);
  const auto r = segment_detailed(s, params);
  REQUIRE(r.segments.size() == 1);
  CHECK(std::abs(static_cast<double>(r.segments[0].start_idx) - 1500.0) <= 150);
  bool dropped = false;
  for (const auto& c : r.candidates) {
    dropped |= !c.kept && c.start_idx > 4300 && c.start_idx < 5300 && c.span < 1.84;
  }
  CHECK(dropped);
}

TEST_CASE("a gesture running off the end is truncated") {
  SegmenterParams params;
  auto s = quiet_series(4000, 22);
  add_bump(s, 2.5, 0.9, 8.0);
  s.values.resize(2850);
  const auto segs = segment(s, params);
  REQUIRE_FALSE(segs.empty());
  CHECK(segs.back().truncated);
  CHECK(segs.back().end_idx == 2849);
}

TEST_CASE("segments are ordered, disjoint and well formed on random sessions") {
  PipelineConfig cfg;
  cfg.corpus.traces = 8;
  cfg.corpus.max_gestures = 5;
  for (const auto& ct : generate_corpus(cfg.corpus, 99)) {
    const auto filtered = filtered_plan(cfg, ct.plan, ct.noise_seed);
    const auto segs = segment(filtered, cfg.segmenter);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start_idx < segs[i].end_idx);
      CHECK(segs[i].end_idx < filtered.values.size());
      CHECK(segs[i].waveform.size() == segs[i].end_idx - segs[i].start_idx + 1);
      if (i > 0) CHECK(segs[i - 1].end_idx < segs[i].start_idx);
    }
  }
}

TEST_CASE("offsets do not move segments") {
  const PipelineConfig cfg;
  const GesturePlan plan{{{1.0, GestureKind::Typing, 0.02, 0.7}, {3.5, GestureKind::MouseMove, 0.04, 0.3}},
                         5.0};
  const auto base = filtered_plan(cfg, plan, 8);
  const auto ref = segment(base, cfg.segmenter);
  REQUIRE(ref.size() == 2);
  for (double c : {-15.0, 0.25, 64.0, 1000.0}) {
    auto shifted = base;
    for (auto& v : shifted.values) v += c;
    const auto segs = segment(shifted, cfg.segmenter);
    REQUIRE(segs.size() == ref.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start_idx == ref[i].start_idx);
      CHECK(segs[i].end_idx == ref[i].end_idx);
    }
  }
}

TEST_CASE("segmentation is deterministic") {
  const PipelineConfig cfg;
  const auto s = filtered_plan(cfg, keystroke_train(4), 2);
  const auto a = segment(s, cfg.segmenter);
  const auto b = segment(s, cfg.segmenter);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].waveform == b[i].waveform);
}

TEST_CASE("coarser steps still find gestures") {
  PipelineConfig cfg;
  cfg.segmenter.step = 2;
  const auto s = filtered_plan(cfg, keystroke_train(3), 4);
  const auto segs = segment(s, cfg.segmenter);
  CHECK(segs.size() == 3);
}

TEST_CASE("parameters") {
  SegmenterParams p;
  CHECK(p.se_values().size() == 50);
  CHECK(p.se_values().front() == doctest::Approx(0.1));
  CHECK(p.se_values().back() == doctest::Approx(5.0));
  CHECK(p.window_samples(1000.0) == 50);
  CHECK_NOTHROW(p.validate(1000.0));
  CHECK_THROWS_AS(p.validate(20.0), Error);
  p.stability_count = 60;
  CHECK_THROWS_AS(p.validate(1000.0), Error);
}

TEST_CASE("segment files round-trip") {
  const auto dir = test::scratch("segments");
  const PipelineConfig cfg;
  const auto s = filtered_plan(cfg, keystroke_train(3), 6);
  const auto segs = segment(s, cfg.segmenter);
  write_segments(dir / "s.csv", segs);
  const auto back = read_segments(dir / "s.csv", s);
  REQUIRE(back.size() == segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(back[i].start_idx == segs[i].start_idx);
    CHECK(back[i].end_idx == segs[i].end_idx);
    CHECK(back[i].truncated == segs[i].truncated);
    CHECK(back[i].waveform == segs[i].waveform);
  }
  write_segmentation_tables(dir / "seg", segment_detailed(s, cfg.segmenter), s.fs);
  CHECK(std::filesystem::exists(dir / "seg.nor.csv"));
  CHECK(std::filesystem::exists(dir / "seg.segments.csv"));
}
