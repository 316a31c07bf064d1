#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "besense/behavior_hmm.hpp"
#include "besense/classifier.hpp"
#include "besense/config.hpp"
#include "besense/csi_trace.hpp"
#include "besense/desk_scene.hpp"

namespace besense {

struct SegmentRecord {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  bool truncated = false;
  FeatureVector features;
  std::optional<GestureKind> predicted;
  std::optional<GestureKind> truth;  // label of the matched annotation
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string trace_name;
  std::uint64_t seed = 0;
  std::string config_json;

  std::size_t samples = 0;
  std::size_t subcarriers = 0;
  double fs = 0.0;

  std::vector<std::string> stages_run;
  std::optional<std::string> failed_stage;
  std::string error;

  std::optional<std::size_t> selected_subcarrier;
  std::size_t candidates = 0;
  std::vector<SegmentRecord> segments;
  std::optional<DetectionScore> detection;  // when the trace is annotated
  std::optional<double> gesture_accuracy;   // over segments matched to annotations

  std::optional<BehaviorDecision> behavior;
  std::optional<Behavior> true_behavior;

  std::vector<StageTiming> timings;

  bool ok() const { return !failed_stage.has_value(); }
};

struct PipelineInputs {
  std::string trace_name = "trace";
  std::optional<ClassifierModel> gesture_model;     // trained from the config when absent
  std::optional<std::vector<BehaviorHmm>> behavior_models;  // behavior stage runs when given
  std::optional<std::filesystem::path> artifacts;   // intermediate files go here
};

/// select_subcarrier -> filter -> segment -> featurize -> classify -> behavior.
/// Stage failures are recorded in the report (failed_stage, error) rather than thrown.
RunReport run_pipeline(const PipelineConfig& config, const CsiTrace& trace,
                       const PipelineInputs& inputs);

/// JSON document; timings are omitted when include_timings is false.
std::string report_to_json(const RunReport& report, bool include_timings = true);

}  // namespace besense
