#include "besense/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "besense/error.hpp"
#include "besense/rng.hpp"

namespace besense {

CsiTrace simulate_plan(const PipelineConfig& config, const GesturePlan& plan,
                       std::uint64_t noise_seed) {
  return simulate_trace(config.scene.channel_model(noise_seed), build_script(config.scene, plan),
                        config.trace_spec());
}

AmplitudeSeries preprocess_trace(const PipelineConfig& config, const CsiTrace& trace) {
  return butterworth_lowpass(select_subcarrier(trace), config.filter);
}

namespace {

std::size_t tolerance_samples(const PipelineConfig& config) {
  return static_cast<std::size_t>(std::llround(config.match_tolerance * config.fs));
}

}  // namespace

DetectionScore evaluate_segmentation(const PipelineConfig& config, std::uint64_t seed) {
  DetectionScore total;
  for (const auto& c : generate_corpus(config.corpus, seed)) {
    const auto trace = simulate_plan(config, c.plan, c.noise_seed);
    const auto segs = segment(preprocess_trace(config, trace), config.segmenter);
    total += score_detections(trace.annotations(), segs, config.fs, tolerance_samples(config));
  }
  return total;
}

std::size_t keystroke_train_segments(const PipelineConfig& config, std::uint64_t noise_seed) {
  const auto trace = simulate_plan(config, keystroke_train(), noise_seed);
  return segment(preprocess_trace(config, trace), config.segmenter).size();
}

double median_gesture_span(const PipelineConfig& config, std::uint64_t seed) {
  std::vector<double> spans;
  for (const auto& c : generate_corpus(config.corpus, seed)) {
    const auto trace = simulate_plan(config, c.plan, c.noise_seed);
    const auto f = preprocess_trace(config, trace);
    for (const auto& a : trace.annotations()) {
      const auto first = f.values.begin() + static_cast<std::ptrdiff_t>(a.start_idx);
      const auto last = f.values.begin() + static_cast<std::ptrdiff_t>(a.end_idx) + 1;
      const auto [lo, hi] = std::minmax_element(first, last);
      spans.push_back(*hi - *lo);
    }
  }
  require(!spans.empty(), "calibration corpus has no gestures");
  std::sort(spans.begin(), spans.end());
  const std::size_t n = spans.size();
  return n % 2 == 1 ? spans[n / 2] : 0.5 * (spans[n / 2 - 1] + spans[n / 2]);
}

std::vector<LabeledExample> gesture_dataset(const PipelineConfig& config, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<LabeledExample> out;
  CorpusSpec spec = config.corpus;
  spec.traces = 25;
  for (std::uint64_t batch = 0; out.size() < count; ++batch) {
    require(batch < 1000, "could not collect enough labeled segments");
    for (const auto& c : generate_corpus(spec, derive_seed(seed, batch))) {
      const auto trace = simulate_plan(config, c.plan, c.noise_seed);
      const auto segs = segment(preprocess_trace(config, trace), config.segmenter);
      const auto score =
          score_detections(trace.annotations(), segs, config.fs, tolerance_samples(config));
      for (std::size_t i = 0; i < segs.size() && out.size() < count; ++i) {
        if (score.matched[i] < 0) continue;
        out.push_back({extract_features(segs[i]),
                       trace.annotations()[static_cast<std::size_t>(score.matched[i])].label});
      }
      if (out.size() >= count) break;
    }
  }
  return out;
}

std::vector<LabeledExample> permute_labels(std::vector<LabeledExample> data, std::uint64_t seed) {
  std::vector<GestureKind> labels;
  for (const auto& e : data) labels.push_back(e.label);
  Rng rng(seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
  return data;
}

ClassifierModel train_gesture_model(const PipelineConfig& config) {
  const auto data = gesture_dataset(config, config.gesture_segments,
                                    stage_seed(config, SeedStream::GestureCorpus));
  return fit(config.classifier, data, config.k);
}

std::vector<BehaviorTraining> behavior_training_set(const PipelineConfig& config, const Mat2& B,
                                                    std::uint64_t seed) {
  std::vector<BehaviorTraining> out;
  for (Behavior b : kBehaviors) {
    BehaviorTraining t{b, {}};
    const auto profile = default_profile(b);
    for (std::size_t i = 0; i < config.train_sequences; ++i) {
      const auto s = derive_seed(seed, behavior_index(b) * 1'000'003 + i);
      t.sequences.push_back(
          sample_behavior_sequence(profile, B, config.sequence_length, s).observations);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::size_t behavior_index(Behavior b) {
  for (std::size_t i = 0; i < kBehaviors.size(); ++i) {
    if (kBehaviors[i] == b) return i;
  }
  fail(ErrorKind::InvalidArgument, "not a target behavior");
}

BehaviorEval evaluate_behavior(const PipelineConfig& config, const Mat2& B) {
  BehaviorEval r;
  r.models = fit_behavior_models(
      behavior_training_set(config, B, stage_seed(config, SeedStream::BehaviorTrain)), B,
      std::nullopt, config.baum_welch);
  const auto test_seed = stage_seed(config, SeedStream::BehaviorTest);
  const auto classify_seed = stage_seed(config, SeedStream::BehaviorClassify);
  ClassifyOptions opt;
  opt.method = config.behavior_method;
  opt.synthetic_length = config.synthetic_length;
  opt.baum_welch = config.baum_welch;
  for (Behavior b : kBehaviors) {
    const std::size_t bi = behavior_index(b);
    const auto profile = default_profile(b);
    for (std::size_t i = 0; i < config.test_sequences; ++i) {
      const auto seq = sample_behavior_sequence(profile, B, config.sequence_length,
                                                derive_seed(test_seed, bi * 1'000'003 + i));
      opt.seed = derive_seed(classify_seed, bi * 1'000'003 + i);
      const auto d = classify_behavior(r.models, seq.observations, opt);
      if (d.tie) ++r.ties;
      if (!d.behavior) {
        ++r.unclassifiable;
        continue;
      }
      ++r.confusion[bi][behavior_index(*d.behavior)];
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    r.accuracy[i] = static_cast<double>(r.confusion[i][i]) / static_cast<double>(config.test_sequences);
    sum += r.accuracy[i];
  }
  r.macro_accuracy = sum / 3.0;
  return r;
}

}  // namespace besense
