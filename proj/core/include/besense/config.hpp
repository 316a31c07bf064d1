#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "besense/behavior_hmm.hpp"
#include "besense/channel_model.hpp"
#include "besense/classifier.hpp"
#include "besense/desk_scene.hpp"
#include "besense/plate_sweep.hpp"
#include "besense/preprocess.hpp"
#include "besense/segmentation.hpp"

namespace besense {

/// Every tunable of the pipeline and its experiments. All randomness derives
/// from `seed` through derive_seed with the stream ids below.
struct PipelineConfig {
  DeskScene scene;

  double fs = 1000.0;
  std::size_t subcarriers = 30;
  double bandwidth_hz = 20e6;
  double gain_first = 1.0;
  double gain_last = 0.3;

  FilterSpec filter;
  SegmenterParams segmenter;
  double match_tolerance = 0.1;  // seconds, detection vs annotation boundaries

  ClassifierKind classifier = ClassifierKind::Knn;
  std::size_t k = 3;
  std::size_t folds = 10;
  std::size_t gesture_segments = 400;  // size of the labeled gesture corpus

  BehaviorMethod behavior_method = BehaviorMethod::Likelihood;
  BaumWelchOptions baum_welch;
  std::size_t sequence_length = 50;
  std::size_t train_sequences = 50;  // per behavior
  std::size_t test_sequences = 100;  // per behavior
  std::size_t synthetic_length = 1000;

  CorpusSpec corpus;
  PlateSweepSpec plate = default_plate();

  std::uint64_t seed = 20190401;

  /// Full-size trace spec derived from the sampling fields.
  TraceSpec trace_spec() const;
  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  static PlateSweepSpec default_plate();
};

enum class SeedStream : std::uint64_t {
  Simulation = 1,
  SegmentationCorpus = 2,
  GestureCorpus = 3,
  CrossValidation = 4,
  BehaviorTrain = 5,
  BehaviorTest = 6,
  BehaviorClassify = 7,
  Plate = 8,
  Permutation = 9,
};

std::uint64_t stage_seed(const PipelineConfig& config, SeedStream stream);

/// JSON document; every key is optional, unknown keys are rejected.
PipelineConfig config_from_json(std::string_view text, std::string_view where = "config");
std::string config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace besense
