#include "besense/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "besense/error.hpp"
#include "besense/experiments.hpp"
#include "besense/features.hpp"
#include "besense/preprocess.hpp"
#include "besense/segmentation.hpp"
#include "besense/text_io.hpp"

namespace besense {

using nlohmann::json;

namespace {

// Runs one stage, timing it; returns false (and records the failure) on error.
bool run_stage(RunReport& report, const std::string& name, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  try {
    body();
  } catch (const std::exception& e) {
    report.failed_stage = name;
    report.error = e.what();
    ok = false;
  }
  const auto t1 = std::chrono::steady_clock::now();
  report.timings.push_back({name, std::chrono::duration<double>(t1 - t0).count()});
  if (ok) report.stages_run.push_back(name);
  return ok;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config, const CsiTrace& trace,
                       const PipelineInputs& inputs) {
  RunReport report;
  report.trace_name = inputs.trace_name;
  report.seed = config.seed;
  report.config_json = config_to_json(config);
  report.samples = trace.length();
  report.subcarriers = trace.subcarriers();
  report.fs = trace.fs();
  report.true_behavior = trace.session_behavior();
  const auto& art = inputs.artifacts;

  AmplitudeSeries selected;
  bool flat = false;
  if (!run_stage(report, "select_subcarrier", [&] {
        require(!trace.empty(), "trace is empty");
        const auto var = subcarrier_variances(trace);
        flat = std::all_of(var.begin(), var.end(), [](double v) { return !(v > 0.0); });
        if (flat) return;
        selected = select_subcarrier(trace);
        report.selected_subcarrier = selected.source_subcarrier;
        if (art) write_amplitude(*art / "amplitude.csv", selected);
      })) {
    return report;
  }
  if (flat) return report;  // constant channel: nothing to segment

  AmplitudeSeries filtered;
  if (!run_stage(report, "filter", [&] {
        filtered = butterworth_lowpass(selected, config.filter);
        if (art) write_amplitude(*art / "filtered.csv", filtered);
      })) {
    return report;
  }

  std::vector<GestureSegment> segs;
  if (!run_stage(report, "segment", [&] {
        const auto r = segment_detailed(filtered, config.segmenter);
        segs = r.segments;
        report.candidates = r.candidates.size();
        if (art) {
          write_segmentation_tables(*art / "segmentation", r, filtered.fs);
          write_segments(*art / "segments.csv", segs);
        }
        if (!trace.annotations().empty()) {
          const auto tol = static_cast<std::size_t>(std::llround(config.match_tolerance * trace.fs()));
          report.detection = score_detections(trace.annotations(), segs, trace.fs(), tol);
        }
        for (std::size_t i = 0; i < segs.size(); ++i) {
          SegmentRecord rec;
          rec.start_idx = segs[i].start_idx;
          rec.end_idx = segs[i].end_idx;
          rec.truncated = segs[i].truncated;
          if (report.detection && report.detection->matched[i] >= 0) {
            rec.truth = trace.annotations()[static_cast<std::size_t>(report.detection->matched[i])].label;
          }
          report.segments.push_back(rec);
        }
      })) {
    return report;
  }
  if (segs.empty()) return report;

  if (!run_stage(report, "featurize", [&] {
        for (std::size_t i = 0; i < segs.size(); ++i) {
          report.segments[i].features = extract_features(segs[i]);
        }
      })) {
    return report;
  }

  if (!run_stage(report, "classify", [&] {
        const ClassifierModel model =
            inputs.gesture_model ? *inputs.gesture_model : train_gesture_model(config);
        std::size_t matched = 0;
        std::size_t correct = 0;
        std::vector<LabeledExample> rows;
        for (auto& rec : report.segments) {
          rec.predicted = predict(model, rec.features);
          rows.push_back({rec.features, *rec.predicted});
          if (rec.truth) {
            ++matched;
            if (*rec.truth == *rec.predicted) ++correct;
          }
        }
        if (matched > 0) report.gesture_accuracy = static_cast<double>(correct) / matched;
        if (art) write_dataset(*art / "features.csv", rows);
      })) {
    return report;
  }

  if (inputs.behavior_models) {
    run_stage(report, "behavior", [&] {
      GestureSequence seq;
      for (const auto& rec : report.segments) seq.observations.push_back(*rec.predicted);
      seq.behavior = trace.session_behavior();
      ClassifyOptions opt;
      opt.method = config.behavior_method;
      opt.seed = stage_seed(config, SeedStream::BehaviorClassify);
      opt.synthetic_length = config.synthetic_length;
      opt.baum_welch = config.baum_welch;
      report.behavior = classify_behavior(*inputs.behavior_models, seq.observations, opt);
      if (art) write_sequence(*art / "sequence.txt", seq);
    });
  }
  return report;
}

std::string report_to_json(const RunReport& r, bool include_timings) {
  json j;
  j["trace"] = r.trace_name;
  j["seed"] = r.seed;
  j["config"] = json::parse(r.config_json);
  j["input"] = {{"samples", r.samples}, {"subcarriers", r.subcarriers}, {"fs", r.fs}};
  j["status"] = r.ok() ? "ok" : "failed";
  j["stages_run"] = r.stages_run;
  if (r.failed_stage) {
    j["failed_stage"] = *r.failed_stage;
    j["error"] = r.error;
  }
  j["selected_subcarrier"] =
      r.selected_subcarrier ? json(*r.selected_subcarrier) : json(nullptr);
  j["segments_found"] = r.segments.size();
  j["segment_candidates"] = r.candidates;

  json segs = json::array();
  for (const auto& s : r.segments) {
    json e = {{"start_idx", s.start_idx},
              {"end_idx", s.end_idx},
              {"truncated", s.truncated},
              {"variance", s.features.variance},
              {"slope_ratio", s.features.slope_ratio},
              {"duration", s.features.duration}};
    e["predicted"] = s.predicted ? json(std::string(to_string(*s.predicted))) : json(nullptr);
    e["truth"] = s.truth ? json(std::string(to_string(*s.truth))) : json(nullptr);
    segs.push_back(e);
  }
  j["segments"] = segs;

  if (r.detection) {
    const auto& d = *r.detection;
    j["detection"] = {{"annotations", d.annotations},
                      {"detections", d.detections},
                      {"hits", d.hits},
                      {"recall", d.recall()},
                      {"precision", d.precision()},
                      {"mean_boundary_error_s", d.mean_boundary_error()},
                      {"max_boundary_error_s", d.boundary_error_max}};
  }
  if (r.gesture_accuracy) j["gesture_accuracy"] = *r.gesture_accuracy;
  if (r.behavior) {
    const auto& b = *r.behavior;
    json scores = json::object();
    for (const auto& s : b.scores) scores[std::string(to_string(s.behavior))] = s.score;
    j["behavior"] = {
        {"predicted", b.behavior ? json(std::string(to_string(*b.behavior))) : json(nullptr)},
        {"scores", scores},
        {"tie", b.tie},
        {"unclassifiable", b.unclassifiable}};
    if (r.true_behavior) j["behavior"]["truth"] = std::string(to_string(*r.true_behavior));
  }
  if (include_timings) {
    json t = json::object();
    for (const auto& s : r.timings) t[s.stage] = s.seconds;
    j["timings"] = t;
  }
  return j.dump(2) + "\n";
}

}  // namespace besense
