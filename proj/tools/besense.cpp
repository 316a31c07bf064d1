// besense: simulate desk CSI traces, segment and classify micro-gestures,
// and recognize behaviors from gesture sequences.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besense/behavior_hmm.hpp"
#include "besense/classifier.hpp"
#include "besense/config.hpp"
#include "besense/csi_trace.hpp"
#include "besense/desk_scene.hpp"
#include "besense/error.hpp"
#include "besense/experiments.hpp"
#include "besense/features.hpp"
#include "besense/pipeline.hpp"
#include "besense/plate_sweep.hpp"
#include "besense/preprocess.hpp"
#include "besense/rng.hpp"
#include "besense/segmentation.hpp"
#include "besense/text_io.hpp"

namespace fs = std::filesystem;
using namespace besense;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kIo = 4,
  kStage = 5,
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::Parse: return kParse;
    case ErrorKind::Io: return kIo;
    case ErrorKind::Stage: return kStage;
  }
  return kFailure;
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

PipelineConfig load(const Globals& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  c.plate.fs = c.fs;
  c.validate();
  return c;
}

void say(const std::string& line) { std::cout << line << '\n'; }

std::string fmt(double v) { return io::format_double(v); }

CsiTrace load_trace(const std::string& path) {
  CsiTrace trace = read_trace(path);
  const auto ann = annotation_path_for(path);
  if (fs::exists(ann)) read_annotations(ann, trace);
  return trace;
}

json cv_json(const CvResult& r) {
  return {{"fold_accuracy", r.fold_accuracy},
          {"mean_accuracy", r.mean_accuracy},
          {"confusion", r.confusion}};
}

Confusion confusion_from_json(const std::string& path) {
  try {
    const json j = json::parse(io::read_file(path));
    const json& c = j.contains("confusion") ? j.at("confusion") : j.at("cross_validation").at("confusion");
    return c.get<Confusion>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, path + ": expected a cross-validation report with a 'confusion' matrix: " +
                               e.what());
  }
}

std::string behavior_table(const BehaviorConfusion& m) {
  std::string out = "true\\predicted,surfing,working,gaming\n";
  for (std::size_t i = 0; i < 3; ++i) {
    out += std::string(to_string(kBehaviors[i]));
    for (std::size_t j = 0; j < 3; ++j) out += "," + std::to_string(m[i][j]);
    out += "\n";
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

struct SimulateArgs {
  std::string plan;
  std::size_t keystrokes = 0;
  std::string behavior;
  std::size_t gestures = 20;
  std::string name = "trace";
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  const auto cfg = load(g);
  GesturePlan plan;
  std::optional<Behavior> session;
  const int sources = !a.plan.empty() + (a.keystrokes > 0) + !a.behavior.empty();
  if (sources > 1) fail(ErrorKind::InvalidArgument, "give only one of --plan, --keystrokes, --behavior");
  if (!a.plan.empty()) {
    plan = read_plan(a.plan);
  } else if (a.keystrokes > 0) {
    plan = keystroke_train(a.keystrokes);
  } else if (!a.behavior.empty()) {
    session = parse_behavior(a.behavior);
    if (!session) fail(ErrorKind::InvalidArgument, "unknown behavior '" + a.behavior + "'");
    const auto seq = sample_behavior_sequence(default_profile(*session), {{{1.0, 0.0}, {0.0, 1.0}}},
                                              a.gestures, stage_seed(cfg, SeedStream::Simulation));
    plan = plan_for_sequence(cfg.corpus, seq.hidden, stage_seed(cfg, SeedStream::Simulation));
  } else {
    plan.duration = 5.0;  // quiet channel
  }
  CsiTrace trace = simulate_plan(cfg, plan, stage_seed(cfg, SeedStream::Simulation));
  trace.set_session_behavior(session);
  const fs::path out = fs::path(g.out) / (a.name + ".csv");
  write_trace(out, trace);
  write_annotations(annotation_path_for(out), trace);
  write_plan(fs::path(g.out) / (a.name + ".plan"), plan);
  say("wrote " + out.string() + " (" + std::to_string(trace.length()) + " samples, " +
      std::to_string(trace.annotations().size()) + " gestures)");
  return kOk;
}

int cmd_segment(const Globals& g, const std::string& trace_path) {
  const auto cfg = load(g);
  const CsiTrace trace = load_trace(trace_path);
  const auto selected = select_subcarrier(trace);
  const auto filtered = butterworth_lowpass(selected, cfg.filter);
  const auto r = segment_detailed(filtered, cfg.segmenter);
  const fs::path out(g.out);
  write_amplitude(out / "amplitude.csv", selected);
  write_amplitude(out / "filtered.csv", filtered);
  write_segments(out / "segments.csv", r.segments);
  write_segmentation_tables(out / "segmentation", r, filtered.fs);
  say("subcarrier " + std::to_string(selected.source_subcarrier) + ", " +
      std::to_string(r.segments.size()) + " segments (" + std::to_string(r.candidates.size()) +
      " candidates)");
  return kOk;
}

int cmd_featurize(const Globals& g, const std::string& trace_path, std::size_t synthetic) {
  const auto cfg = load(g);
  std::vector<LabeledExample> data;
  if (synthetic > 0) {
    data = gesture_dataset(cfg, synthetic, stage_seed(cfg, SeedStream::GestureCorpus));
  } else {
    if (trace_path.empty()) fail(ErrorKind::InvalidArgument, "give --trace or --synthetic");
    const CsiTrace trace = load_trace(trace_path);
    if (trace.annotations().empty()) {
      fail(ErrorKind::InvalidArgument, "trace has no annotation sidecar; labels are required");
    }
    const auto segs = segment(preprocess_trace(cfg, trace), cfg.segmenter);
    const auto tol = static_cast<std::size_t>(std::llround(cfg.match_tolerance * cfg.fs));
    const auto score = score_detections(trace.annotations(), segs, trace.fs(), tol);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (score.matched[i] < 0) continue;
      data.push_back({extract_features(segs[i]),
                      trace.annotations()[static_cast<std::size_t>(score.matched[i])].label});
    }
  }
  const fs::path out = fs::path(g.out) / "features.csv";
  write_dataset(out, data);
  say("wrote " + out.string() + " (" + std::to_string(data.size()) + " examples)");
  return kOk;
}

int cmd_train_gesture(const Globals& g, const std::string& dataset, const std::string& kind_text) {
  auto cfg = load(g);
  if (!kind_text.empty()) {
    const auto k = parse_classifier_kind(kind_text);
    if (!k) fail(ErrorKind::InvalidArgument, "unknown classifier '" + kind_text + "'");
    cfg.classifier = *k;
  }
  const auto data = dataset.empty()
                        ? gesture_dataset(cfg, cfg.gesture_segments,
                                          stage_seed(cfg, SeedStream::GestureCorpus))
                        : read_dataset(dataset);
  const auto cv = cross_validate(cfg.classifier, data, cfg.folds,
                                 stage_seed(cfg, SeedStream::CrossValidation), cfg.k);
  const auto model = fit(cfg.classifier, data, cfg.k);
  const fs::path out(g.out);
  save_model(out / "gesture_model.json", model);
  json report = {{"classifier", std::string(to_string(cfg.classifier))},
                 {"examples", data.size()},
                 {"folds", cfg.folds},
                 {"cross_validation", cv_json(cv)}};
  io::write_file_atomic(out / "gesture_cv.json", report.dump(2) + "\n");
  say(std::string(to_string(cfg.classifier)) + " " + std::to_string(cfg.folds) +
      "-fold accuracy " + fmt(cv.mean_accuracy));
  return kOk;
}

int cmd_train_behavior(const Globals& g, const std::string& cv_path,
                       const std::vector<std::string>& sequence_files) {
  const auto cfg = load(g);
  Confusion counts{};
  if (!cv_path.empty()) {
    counts = confusion_from_json(cv_path);
  } else {
    const auto data = gesture_dataset(cfg, cfg.gesture_segments,
                                      stage_seed(cfg, SeedStream::GestureCorpus));
    counts = cross_validate(cfg.classifier, data, cfg.folds,
                            stage_seed(cfg, SeedStream::CrossValidation), cfg.k)
                 .confusion;
  }
  const Mat2 B = build_emission(counts);
  std::vector<BehaviorTraining> training;
  if (sequence_files.empty()) {
    training = behavior_training_set(cfg, B, stage_seed(cfg, SeedStream::BehaviorTrain));
  } else {
    for (const auto& f : sequence_files) {
      const auto seq = read_sequence(f);
      if (!seq.behavior) fail(ErrorKind::Parse, f + ": missing '# behavior=<name>' label");
      auto it = std::find_if(training.begin(), training.end(),
                             [&](const auto& t) { return t.behavior == *seq.behavior; });
      if (it == training.end()) {
        training.push_back({*seq.behavior, {}});
        it = std::prev(training.end());
      }
      it->sequences.push_back(seq.observations);
    }
  }
  const auto models = fit_behavior_models(training, B, std::nullopt, cfg.baum_welch);
  const fs::path out = fs::path(g.out) / "behavior_models.json";
  save_hmms(out, models);
  say("wrote " + out.string() + " (" + std::to_string(models.size()) + " behaviors)");
  return kOk;
}

int cmd_evaluate(const Globals& g, const std::string& what) {
  const auto cfg = load(g);
  const bool all = what == "all";
  if (!all && what != "segmentation" && what != "gesture" && what != "behavior") {
    fail(ErrorKind::InvalidArgument, "--what must be segmentation, gesture, behavior or all");
  }
  json report = {{"seed", cfg.seed}};
  const fs::path out(g.out);
  if (all || what == "segmentation") {
    const auto s = evaluate_segmentation(cfg, stage_seed(cfg, SeedStream::SegmentationCorpus));
    const auto train = keystroke_train_segments(cfg, stage_seed(cfg, SeedStream::Simulation));
    report["segmentation"] = {{"traces", cfg.corpus.traces},
                              {"annotations", s.annotations},
                              {"detections", s.detections},
                              {"hits", s.hits},
                              {"recall", s.recall()},
                              {"precision", s.precision()},
                              {"mean_boundary_error_s", s.mean_boundary_error()},
                              {"max_boundary_error_s", s.boundary_error_max},
                              {"keystroke_train_segments", train}};
    say("segmentation: recall " + fmt(s.recall()) + " precision " + fmt(s.precision()) +
        ", 17-keystroke train -> " + std::to_string(train) + " segments");
  }
  std::optional<Confusion> counts;
  if (all || what == "gesture" || what == "behavior") {
    const auto data = gesture_dataset(cfg, cfg.gesture_segments,
                                      stage_seed(cfg, SeedStream::GestureCorpus));
    const auto cv_seed = stage_seed(cfg, SeedStream::CrossValidation);
    const auto knn = cross_validate(ClassifierKind::Knn, data, cfg.folds, cv_seed, cfg.k);
    const auto nb = cross_validate(ClassifierKind::GaussianNb, data, cfg.folds, cv_seed, cfg.k);
    counts = (cfg.classifier == ClassifierKind::Knn ? knn : nb).confusion;
    if (all || what == "gesture") {
      const auto permuted = permute_labels(data, stage_seed(cfg, SeedStream::Permutation));
      const auto null_knn = cross_validate(ClassifierKind::Knn, permuted, cfg.folds, cv_seed, cfg.k);
      const auto null_nb =
          cross_validate(ClassifierKind::GaussianNb, permuted, cfg.folds, cv_seed, cfg.k);
      report["gesture"] = {{"examples", data.size()},
                           {"knn", cv_json(knn)},
                           {"gaussian_nb", cv_json(nb)},
                           {"permutation_null", {{"knn", null_knn.mean_accuracy},
                                                 {"gaussian_nb", null_nb.mean_accuracy}}}};
      write_dataset(out / "gesture_dataset.csv", data);
      say("gesture: knn " + fmt(knn.mean_accuracy) + ", gaussian_nb " + fmt(nb.mean_accuracy) +
          ", permuted knn " + fmt(null_knn.mean_accuracy));
    }
  }
  if (all || what == "behavior") {
    const Mat2 B = build_emission(*counts);
    const auto b = evaluate_behavior(cfg, B);
    report["behavior"] = {{"method", std::string(to_string(cfg.behavior_method))},
                          {"emission", B},
                          {"confusion", b.confusion},
                          {"accuracy", {{"surfing", b.accuracy[0]},
                                        {"working", b.accuracy[1]},
                                        {"gaming", b.accuracy[2]}}},
                          {"macro_accuracy", b.macro_accuracy},
                          {"ties", b.ties},
                          {"unclassifiable", b.unclassifiable}};
    io::write_file_atomic(out / "behavior_confusion.csv", behavior_table(b.confusion));
    save_hmms(out / "behavior_models.json", b.models);
    say("behavior: macro accuracy " + fmt(b.macro_accuracy));
    std::cout << behavior_table(b.confusion);
  }
  io::write_file_atomic(out / "evaluation.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_sweep_plate(const Globals& g) {
  const auto cfg = load(g);
  PlateSweepSpec spec = cfg.plate;
  spec.seed = stage_seed(cfg, SeedStream::Plate);
  const auto rows = simulate_plate_sweep(cfg.scene.geometry, spec);
  std::string table = "side_length_m,peak_to_peak\n";
  for (const auto& r : rows) table += fmt(r.side_length) + "," + fmt(r.peak_to_peak) + "\n";
  const fs::path out = fs::path(g.out) / "plate_sweep.csv";
  io::write_file_atomic(out, table);
  std::cout << table;
  return kOk;
}

int cmd_plotdata(const Globals& g, const std::string& kind, const std::string& input,
                 std::size_t points) {
  const auto cfg = load(g);
  const fs::path out(g.out);
  if (kind == "filter") {
    const auto sos = butterworth_sos(cfg.filter, cfg.fs);
    std::string t = "f_hz,digital,analytic\n";
    // Log-spaced from 0.1 Hz to fs/2.
    const double lo = std::log10(0.1);
    const double hi = std::log10(cfg.fs / 2.0);
    for (std::size_t i = 0; i < points; ++i) {
      const double f = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / (points - 1));
      t += fmt(f) + "," + fmt(sos_magnitude(sos, f, cfg.fs)) + "," +
           fmt(butterworth_magnitude(cfg.filter, f)) + "\n";
    }
    io::write_file_atomic(out / "filter_response.csv", t);
  } else if (kind == "subcarriers") {
    if (input.empty()) fail(ErrorKind::InvalidArgument, "--input trace is required");
    const auto var = subcarrier_variances(load_trace(input));
    std::string t = "subcarrier,amplitude_variance\n";
    for (std::size_t s = 0; s < var.size(); ++s) t += std::to_string(s) + "," + fmt(var[s]) + "\n";
    io::write_file_atomic(out / "subcarrier_variance.csv", t);
  } else if (kind == "segmentation") {
    if (input.empty()) fail(ErrorKind::InvalidArgument, "--input trace is required");
    const auto filtered = preprocess_trace(cfg, load_trace(input));
    write_segmentation_tables(out / "segmentation", segment_detailed(filtered, cfg.segmenter),
                              filtered.fs);
  } else {
    fail(ErrorKind::InvalidArgument, "unknown plot data kind '" + kind +
                                         "' (filter, subcarriers, segmentation)");
  }
  say("wrote " + kind + " tables to " + out.string());
  return kOk;
}

int cmd_pipeline(const Globals& g, const std::string& trace_path, const std::string& model_path,
                 const std::string& hmm_path) {
  const auto cfg = load(g);
  const CsiTrace trace = load_trace(trace_path);
  PipelineInputs in;
  in.trace_name = fs::path(trace_path).filename().string();
  if (!model_path.empty()) in.gesture_model = load_model(model_path);
  if (!hmm_path.empty()) in.behavior_models = load_hmms(hmm_path);
  in.artifacts = fs::path(g.out);
  const auto report = run_pipeline(cfg, trace, in);
  io::write_file_atomic(fs::path(g.out) / "report.json", report_to_json(report));
  if (!report.ok()) {
    std::cerr << "besense: stage '" << *report.failed_stage << "' failed: " << report.error << '\n';
    return kStage;
  }
  std::string line = std::to_string(report.segments.size()) + " segments";
  if (report.detection) {
    line += ", recall " + fmt(report.detection->recall()) + " precision " +
            fmt(report.detection->precision());
  }
  if (report.behavior && report.behavior->behavior) {
    line += ", behavior " + std::string(to_string(*report.behavior->behavior));
  }
  say(line);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WiFi CSI micro-gesture segmentation and behavior recognition"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Base seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a desk-scene CSI trace");
  simulate->add_option("--plan", sim.plan, "Gesture plan file (start,kind,travel,duration)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--keystrokes", sim.keystrokes, "Train of N keystrokes");
  simulate->add_option("--behavior", sim.behavior, "Session drawn from a behavior profile");
  simulate->add_option("--gestures", sim.gestures, "Gestures in a behavior session")
      ->capture_default_str();
  simulate->add_option("--name", sim.name, "Output file stem")->capture_default_str();

  std::string trace_path;
  auto* seg = app.add_subcommand("segment", "Select, filter and segment a trace");
  seg->add_option("--trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);

  std::size_t synthetic = 0;
  auto* feat = app.add_subcommand("featurize", "Build a labeled feature table");
  feat->add_option("--trace", trace_path, "Annotated trace file")->check(CLI::ExistingFile);
  feat->add_option("--synthetic", synthetic, "Collect N labeled segments from simulated traces");

  std::string dataset;
  std::string kind;
  auto* tg = app.add_subcommand("train-gesture", "Cross-validate and fit a gesture classifier");
  tg->add_option("--dataset", dataset, "Feature table (default: simulated corpus)")
      ->check(CLI::ExistingFile);
  tg->add_option("--kind", kind, "knn or gaussian_nb (default: config)");

  std::string cv_path;
  std::vector<std::string> sequences;
  auto* tb = app.add_subcommand("train-behavior", "Fit one HMM per behavior");
  tb->add_option("--cv", cv_path, "gesture_cv.json supplying the emission confusion counts")
      ->check(CLI::ExistingFile);
  tb->add_option("--sequences", sequences, "Labeled sequence files (default: simulated)")
      ->check(CLI::ExistingFile);

  std::string what = "all";
  auto* ev = app.add_subcommand("evaluate", "Run the synthetic evaluation experiments");
  ev->add_option("--what", what, "segmentation, gesture, behavior or all")->capture_default_str();

  auto* sp = app.add_subcommand("sweep-plate", "Peak-to-peak amplitude versus plate size");

  std::string plot_kind;
  std::string plot_input;
  std::size_t points = 200;
  auto* pd = app.add_subcommand("plotdata", "Emit plot-ready tables");
  pd->add_option("kind", plot_kind, "filter, subcarriers or segmentation")->required();
  pd->add_option("--input", plot_input, "Trace file")->check(CLI::ExistingFile);
  pd->add_option("--points", points, "Points of the filter response")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));

  std::string model_path;
  std::string hmm_path;
  auto* pl = app.add_subcommand("pipeline", "Run every stage on one trace and write a report");
  pl->add_option("--trace", trace_path, "Trace file")->required()->check(CLI::ExistingFile);
  pl->add_option("--model", model_path, "Gesture model (default: trained from the config)")
      ->check(CLI::ExistingFile);
  pl->add_option("--hmm", hmm_path, "Behavior models; enables the behavior stage")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    fs::create_directories(g.out);
    if (*simulate) return cmd_simulate(g, sim);
    if (*seg) return cmd_segment(g, trace_path);
    if (*feat) return cmd_featurize(g, trace_path, synthetic);
    if (*tg) return cmd_train_gesture(g, dataset, kind);
    if (*tb) return cmd_train_behavior(g, cv_path, sequences);
    if (*ev) return cmd_evaluate(g, what);
    if (*sp) return cmd_sweep_plate(g);
    if (*pd) return cmd_plotdata(g, plot_kind, plot_input, points);
    if (*pl) return cmd_pipeline(g, trace_path, model_path, hmm_path);
  } catch (const Error& e) {
    std::cerr << "besense: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "besense: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "besense: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
