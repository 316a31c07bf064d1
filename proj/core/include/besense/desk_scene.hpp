#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "besense/channel_model.hpp"
#include "besense/segmentation.hpp"

namespace besense {

/// A user at a desk under the link: one finger reflector above the keyboard
/// (path 0) and one hand reflector on the mouse (path 1).
struct DeskScene {
  FresnelGeometry geometry{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 0.125};
  std::complex<double> static_component{20.0, 0.0};
  double noise_std = 0.4;
  Vec3 keyboard{0.5, 0.0, -0.603};  // zone 10 at the defaults
  Vec3 mouse_home{0.89, 0.0, -0.62};
  double finger_amplitude = 6.0;
  double hand_amplitude = 8.0;

  void validate() const;
  ChannelModel channel_model(std::uint64_t noise_seed) const;
};

inline constexpr std::size_t kFingerPath = 0;
inline constexpr std::size_t kHandPath = 1;

/// Scene-independent description of one gesture.
struct PlannedGesture {
  double start = 0.0;     // seconds
  GestureKind kind = GestureKind::Typing;
  double travel = 0.02;   // meters
  double duration = 0.7;  // seconds
};

struct GesturePlan {
  std::vector<PlannedGesture> gestures;
  double duration = 0.0;
};

/// Keystrokes press straight down from the keyboard rest point. Mouse moves
/// slide along the Tx->Rx axis and alternate sides of mouse_home: each move
/// heads to home +- travel/2 on the opposite side from where the hand is.
GestureScript build_script(const DeskScene& scene, const GesturePlan& plan);

/// Plan text file: optional "# duration=<s>" header, then one
/// "start,kind,travel,duration" row per gesture (kind typing|mouse). Without a
/// header the plan lasts until 1 s after the last gesture.
GesturePlan read_plan(const std::filesystem::path& path);
GesturePlan parse_plan(std::string_view text, std::string_view where);
void write_plan(const std::filesystem::path& path, const GesturePlan& plan);

/// Random desk sessions for calibration and evaluation.
struct CorpusSpec {
  std::size_t traces = 100;
  std::size_t min_gestures = 1;
  std::size_t max_gestures = 5;
  std::pair<double, double> first_start{1.0, 1.5};
  std::pair<double, double> gap{1.5, 2.5};  // end of one gesture to start of the next
  double tail = 0.5;
  double p_keystroke = 0.5;
  std::pair<double, double> keystroke_travel{0.015, 0.025};
  std::pair<double, double> keystroke_duration{0.6, 0.8};
  std::pair<double, double> mouse_travel{0.03, 0.05};
  std::pair<double, double> mouse_duration{0.25, 0.35};

  void validate() const;
};

struct CorpusTrace {
  GesturePlan plan;
  std::uint64_t noise_seed = 0;
};

std::vector<CorpusTrace> generate_corpus(const CorpusSpec& spec, std::uint64_t seed);

/// Plan whose gesture kinds follow `kinds`, with the corpus timing and travel ranges.
GesturePlan plan_for_sequence(const CorpusSpec& spec, const std::vector<GestureKind>& kinds,
                              std::uint64_t seed);

/// n keystrokes of 2 cm / 0.7 s, one every `period` seconds from t = 1 s.
GesturePlan keystroke_train(std::size_t n = 17, double period = 2.2);

/// One-to-one matching of detections to annotations: a detection is a hit when
/// both its boundaries are within `tolerance` samples of an unmatched annotation.
struct DetectionScore {
  std::size_t annotations = 0;
  std::size_t detections = 0;
  std::size_t hits = 0;
  double boundary_error_sum = 0.0;  // seconds, over both boundaries of every hit
  double boundary_error_max = 0.0;
  /// For every detection, the index of the matched annotation or -1.
  std::vector<long> matched;

  double recall() const;
  double precision() const;
  double mean_boundary_error() const;
  DetectionScore& operator+=(const DetectionScore& o);
};

DetectionScore score_detections(const std::vector<Annotation>& truth,
                                const std::vector<GestureSegment>& detected, double fs,
                                std::size_t tolerance);

}  // namespace besense
