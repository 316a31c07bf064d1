#include <algorithm>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "besense/config.hpp"
#include "besense/desk_scene.hpp"
#include "besense/experiments.hpp"
#include "besense/pipeline.hpp"
#include "besense/text_io.hpp"
#include "helpers.hpp"

using namespace besense;
using nlohmann::json;

namespace {

PipelineConfig small_config() {
  PipelineConfig c;
  c.gesture_segments = 60;
  return c;
}

const ClassifierModel& small_model() {
  static const ClassifierModel m = train_gesture_model(small_config());
  return m;
}

}  // namespace

TEST_CASE("annotated trace gets a full report") {
  const auto cfg = small_config();
  const GesturePlan plan{{{1.0, GestureKind::Typing, 0.02, 0.7},
                          {3.2, GestureKind::MouseMove, 0.04, 0.3},
                          {5.0, GestureKind::Typing, 0.02, 0.7}},
                         6.5};
  const auto trace = simulate_plan(cfg, plan, 11);
  const auto dir = test::scratch("pipeline_full");
  PipelineInputs in;
  in.gesture_model = small_model();
  in.artifacts = dir;
  const auto r = run_pipeline(cfg, trace, in);
  CHECK(r.ok());
  CHECK(r.stages_run ==
        std::vector<std::string>{"select_subcarrier", "filter", "segment", "featurize", "classify"});
  CHECK(r.segments.size() == 3);
  REQUIRE(r.detection.has_value());
  CHECK(r.detection->recall() == 1.0);
  CHECK(r.detection->precision() == 1.0);
  REQUIRE(r.gesture_accuracy.has_value());
  CHECK(*r.gesture_accuracy == 1.0);
  for (const char* f : {"amplitude.csv", "filtered.csv", "segmentation.nor.csv",
                        "segmentation.segments.csv", "segments.csv", "features.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }

  // Metrics can be recomputed from the persisted artifacts.
  const auto filtered = read_amplitude(dir / "filtered.csv");
  const auto segs = read_segments(dir / "segments.csv", filtered);
  REQUIRE(segs.size() == r.segments.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(extract_features(segs[i]) == r.segments[i].features);
  }
  const auto rows = read_dataset(dir / "features.csv");
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].label == *r.segments[i].predicted);
}

TEST_CASE("flat trace reports zero segments and stops before classification") {
  const auto cfg = small_config();
  CsiTrace flat(1000.0, 30, 3000);
  for (std::size_t s = 0; s < 30; ++s) {
    for (std::size_t i = 0; i < 3000; ++i) flat.at(s, i) = {20.0, 0.0};
  }
  PipelineInputs in;
  in.gesture_model = small_model();
  const auto r = run_pipeline(cfg, flat, in);
  CHECK(r.ok());
  CHECK(r.segments.empty());
  CHECK(std::find(r.stages_run.begin(), r.stages_run.end(), "classify") == r.stages_run.end());

  // A quiet noisy trace gets as far as segmentation.
  const auto quiet = simulate_plan(cfg, {{}, 3.0}, 2);
  const auto q = run_pipeline(cfg, quiet, in);
  CHECK(q.ok());
  CHECK(q.segments.empty());
  CHECK(q.stages_run.back() == "segment");
}

TEST_CASE("stage failures are recorded, not thrown") {
  const auto cfg = small_config();
  const auto trace = simulate_plan(cfg, {{}, 0.03}, 1);  // shorter than one window
  PipelineInputs in;
  in.gesture_model = small_model();
  RunReport r;
  CHECK_NOTHROW(r = run_pipeline(cfg, trace, in));
  CHECK_FALSE(r.ok());
  CHECK(r.failed_stage == "segment");
  CHECK_FALSE(r.error.empty());
  const auto j = json::parse(report_to_json(r));
  CHECK(j.at("failed_stage") == "segment");
}

TEST_CASE("behavior stage runs when models are given") {
  const auto cfg = small_config();
  const Mat2 B{{{0.95, 0.05}, {0.05, 0.95}}};
  const auto eval_models = fit_behavior_models(behavior_training_set(cfg, B, 3), B);
  const auto seq = sample_behavior_sequence(default_profile(Behavior::Gaming), {{{1, 0}, {0, 1}}}, 6, 4);
  auto trace = simulate_plan(cfg, plan_for_sequence(cfg.corpus, seq.hidden, 5), 6);
  trace.set_session_behavior(Behavior::Gaming);
  const auto dir = test::scratch("pipeline_behavior");
  PipelineInputs in;
  in.gesture_model = small_model();
  in.behavior_models = eval_models;
  in.artifacts = dir;
  const auto r = run_pipeline(cfg, trace, in);
  CHECK(r.ok());
  REQUIRE(r.behavior.has_value());
  CHECK(r.behavior->scores.size() == 3);
  CHECK(r.true_behavior == Behavior::Gaming);
  const auto back = read_sequence(dir / "sequence.txt");
  CHECK(back.observations.size() == r.segments.size());
  CHECK(back.behavior == Behavior::Gaming);
}

TEST_CASE("identical inputs give identical reports") {
  const auto cfg = small_config();
  const auto trace = simulate_plan(cfg, keystroke_train(4), 9);
  PipelineInputs in;
  in.gesture_model = small_model();
  const auto a = report_to_json(run_pipeline(cfg, trace, in), false);
  const auto b = report_to_json(run_pipeline(cfg, trace, in), false);
  CHECK(a == b);
  const auto j = json::parse(report_to_json(run_pipeline(cfg, trace, in), true));
  CHECK(j.contains("timings"));
  CHECK_FALSE(json::parse(a).contains("timings"));
  CHECK(j.at("seed") == cfg.seed);
}
