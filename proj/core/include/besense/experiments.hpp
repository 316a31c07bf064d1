#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "besense/behavior_hmm.hpp"
#include "besense/classifier.hpp"
#include "besense/config.hpp"
#include "besense/desk_scene.hpp"

namespace besense {

/// Desk-scene trace of a plan under the config's scene and sampling.
CsiTrace simulate_plan(const PipelineConfig& config, const GesturePlan& plan,
                       std::uint64_t noise_seed);

/// Subcarrier selection followed by the low-pass filter.
AmplitudeSeries preprocess_trace(const PipelineConfig& config, const CsiTrace& trace);

/// Segmentation quality over a random corpus (config.corpus).
DetectionScore evaluate_segmentation(const PipelineConfig& config, std::uint64_t seed);

/// Segments found on the 17-keystroke train.
std::size_t keystroke_train_segments(const PipelineConfig& config, std::uint64_t noise_seed);

/// Median max-min amplitude over all annotated gestures of a corpus, measured
/// on the filtered selected subcarrier (used to calibrate min_amplitude_span).
double median_gesture_span(const PipelineConfig& config, std::uint64_t seed);

/// `count` labeled examples: corpus traces are segmented and every detection
/// matched to an annotation is labeled with that annotation's gesture kind.
std::vector<LabeledExample> gesture_dataset(const PipelineConfig& config, std::size_t count,
                                            std::uint64_t seed);

/// The same dataset with labels shuffled (permutation null).
std::vector<LabeledExample> permute_labels(std::vector<LabeledExample> data, std::uint64_t seed);

ClassifierModel train_gesture_model(const PipelineConfig& config);

/// Training sequences per target behavior sampled from the default profiles
/// and emitted through B.
std::vector<BehaviorTraining> behavior_training_set(const PipelineConfig& config, const Mat2& B,
                                                    std::uint64_t seed);

using BehaviorConfusion = std::array<std::array<std::size_t, 3>, 3>;  // [true][predicted]

struct BehaviorEval {
  std::vector<BehaviorHmm> models;
  BehaviorConfusion confusion{};
  std::array<double, 3> accuracy{};  // per behavior, kBehaviors order
  double macro_accuracy = 0.0;
  std::size_t ties = 0;
  std::size_t unclassifiable = 0;
};

BehaviorEval evaluate_behavior(const PipelineConfig& config, const Mat2& B);

/// Index of a target behavior in kBehaviors.
std::size_t behavior_index(Behavior b);

}  // namespace besense
