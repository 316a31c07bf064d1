#include "besense/desk_scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "besense/text_io.hpp"

namespace besense {

void DeskScene::validate() const {
  require(std::isfinite(noise_std) && noise_std >= 0.0, "scene noise_std must be >= 0");
  require(finger_amplitude >= 0.0 && hand_amplitude >= 0.0,
          "reflection amplitudes must be >= 0");
  require(is_finite(keyboard) && is_finite(mouse_home), "scene positions must be finite");
  require(geometry.between_antennas(keyboard), "keyboard must lie between the antennas");
  require(geometry.between_antennas(mouse_home), "mouse must lie between the antennas");
}

ChannelModel DeskScene::channel_model(std::uint64_t noise_seed) const {
  validate();
  ChannelModel m;
  m.geometry = geometry;
  m.static_component = static_component;
  m.noise_std = noise_std;
  m.rng_seed = noise_seed;
  m.dynamic_paths = {{stationary(keyboard), finger_amplitude}, {stationary(mouse_home), hand_amplitude}};
  return m;
}

GestureScript build_script(const DeskScene& scene, const GesturePlan& plan) {
  GestureScript script;
  script.duration = plan.duration;
  const Vec3 axis = scene.geometry.axis();
  Vec3 hand = scene.mouse_home;
  std::vector<PlannedGesture> order = plan.gestures;
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (const auto& g : order) {
    if (g.kind == GestureKind::Typing) {
      script.gestures.push_back(
          {g.start, GestureModel::keystroke(scene.keyboard, g.travel, g.duration), kFingerPath});
      continue;
    }
    const double offset = dot(hand - scene.mouse_home, axis);
    const double target = offset <= 0.0 ? 0.5 * g.travel : -0.5 * g.travel;
    const double step = target - offset;
    const Vec3 dir = step >= 0.0 ? axis : -1.0 * axis;
    auto move = GestureModel::mouse_move(hand, dir, std::abs(step), g.duration);
    hand = move.end_position();
    script.gestures.push_back({g.start, move, kHandPath});
  }
  return script;
}

GesturePlan parse_plan(std::string_view text, std::string_view where_sv) {
  const std::string where(where_sv);
  const auto lines = io::split_lines(text);
  GesturePlan plan;
  bool have_duration = false;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string d = io::header_value(t, "duration");
      if (!d.empty()) {
        plan.duration = io::parse_double(d, where, k + 1, "duration");
        have_duration = true;
      }
      continue;
    }
    const auto f = io::split_fields(t);
    const std::string at = where + ":" + std::to_string(k + 1);
    if (f.size() != 4) fail(ErrorKind::Parse, at + ": expected start,kind,travel,duration");
    PlannedGesture g;
    g.start = io::parse_double(f[0], where, k + 1, "start");
    const auto kind = parse_gesture_kind(f[1]);
    if (!kind) fail(ErrorKind::Parse, at + ": field 'kind': expected typing or mouse, got '" +
                                          std::string(f[1]) + "'");
    g.kind = *kind;
    g.travel = io::parse_double(f[2], where, k + 1, "travel");
    g.duration = io::parse_double(f[3], where, k + 1, "duration");
    if (g.start < 0.0) fail(ErrorKind::Parse, at + ": field 'start': must be >= 0");
    if (g.travel <= 0.0) fail(ErrorKind::Parse, at + ": field 'travel': must be > 0");
    if (g.duration <= 0.0) fail(ErrorKind::Parse, at + ": field 'duration': must be > 0");
    plan.gestures.push_back(g);
  }
  if (!have_duration) {
    double end = 0.0;
    for (const auto& g : plan.gestures) end = std::max(end, g.start + g.duration);
    plan.duration = end + 1.0;
  }
  if (!(plan.duration > 0.0)) fail(ErrorKind::Parse, where + ": duration must be > 0");
  return plan;
}

GesturePlan read_plan(const std::filesystem::path& path) {
  return parse_plan(io::read_file(path), path.string());
}

void write_plan(const std::filesystem::path& path, const GesturePlan& plan) {
  std::string out = "# duration=" + io::format_double(plan.duration) + "\n";
  for (const auto& g : plan.gestures) {
    out += io::format_double(g.start) + ',' + std::string(to_string(g.kind)) + ',' +
           io::format_double(g.travel) + ',' + io::format_double(g.duration) + '\n';
  }
  io::write_file_atomic(path, out);
}

void CorpusSpec::validate() const {
  require(traces >= 1, "corpus needs at least one trace");
  require(min_gestures >= 1 && min_gestures <= max_gestures, "gesture count range is invalid");
  auto range = [](const std::pair<double, double>& r, const char* what) {
    require(std::isfinite(r.first) && std::isfinite(r.second) && r.first > 0.0 &&
                r.first <= r.second,
            std::string(what) + " range must be positive and ordered");
  };
  range(first_start, "first_start");
  range(gap, "gap");
  range(keystroke_travel, "keystroke_travel");
  range(keystroke_duration, "keystroke_duration");
  range(mouse_travel, "mouse_travel");
  range(mouse_duration, "mouse_duration");
  require(tail >= 0.0, "tail must be >= 0");
  require(p_keystroke >= 0.0 && p_keystroke <= 1.0, "p_keystroke must lie in [0, 1]");
}

namespace {

double uniform(Rng& rng, const std::pair<double, double>& r) {
  return std::uniform_real_distribution<double>(r.first, r.second)(rng);
}

GesturePlan plan_kinds(const CorpusSpec& spec, const std::vector<GestureKind>& kinds, Rng& rng) {
  GesturePlan plan;
  double t = uniform(rng, spec.first_start);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    PlannedGesture g;
    g.start = t;
    g.kind = kinds[i];
    if (g.kind == GestureKind::Typing) {
      g.travel = uniform(rng, spec.keystroke_travel);
      g.duration = uniform(rng, spec.keystroke_duration);
    } else {
      g.travel = uniform(rng, spec.mouse_travel);
      g.duration = uniform(rng, spec.mouse_duration);
    }
    plan.gestures.push_back(g);
    t += g.duration;
    if (i + 1 < kinds.size()) t += uniform(rng, spec.gap);
  }
  plan.duration = t + spec.tail;
  return plan;
}

}  // namespace

std::vector<CorpusTrace> generate_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<CorpusTrace> out;
  for (std::size_t i = 0; i < spec.traces; ++i) {
    const auto n = std::uniform_int_distribution<std::size_t>(spec.min_gestures,
                                                              spec.max_gestures)(rng);
    std::vector<GestureKind> kinds;
    for (std::size_t j = 0; j < n; ++j) {
      kinds.push_back(std::bernoulli_distribution(spec.p_keystroke)(rng) ? GestureKind::Typing
                                                                         : GestureKind::MouseMove);
    }
    CorpusTrace c;
    c.plan = plan_kinds(spec, kinds, rng);
    c.noise_seed = derive_seed(seed, i);
    out.push_back(std::move(c));
  }
  return out;
}

GesturePlan plan_for_sequence(const CorpusSpec& spec, const std::vector<GestureKind>& kinds,
                              std::uint64_t seed) {
  spec.validate();
  require(!kinds.empty(), "gesture sequence must not be empty");
  Rng rng(seed);
  return plan_kinds(spec, kinds, rng);
}

GesturePlan keystroke_train(std::size_t n, double period) {
  require(n >= 1 && period > 0.7, "keystroke train needs n >= 1 and period > 0.7 s");
  GesturePlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    plan.gestures.push_back({1.0 + period * static_cast<double>(i), GestureKind::Typing, 0.02, 0.7});
  }
  plan.duration = 1.0 + period * static_cast<double>(n - 1) + 0.7 + 1.0;
  return plan;
}

double DetectionScore::recall() const {
  return annotations == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(annotations);
}

double DetectionScore::precision() const {
  return detections == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(detections);
}

double DetectionScore::mean_boundary_error() const {
  return hits == 0 ? 0.0 : boundary_error_sum / (2.0 * static_cast<double>(hits));
}

DetectionScore& DetectionScore::operator+=(const DetectionScore& o) {
  annotations += o.annotations;
  detections += o.detections;
  hits += o.hits;
  boundary_error_sum += o.boundary_error_sum;
  boundary_error_max = std::max(boundary_error_max, o.boundary_error_max);
  matched.insert(matched.end(), o.matched.begin(), o.matched.end());
  return *this;
}

DetectionScore score_detections(const std::vector<Annotation>& truth,
                                const std::vector<GestureSegment>& detected, double fs,
                                std::size_t tolerance) {
  DetectionScore s;
  s.annotations = truth.size();
  s.detections = detected.size();
  std::vector<bool> taken(truth.size(), false);
  auto gap = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
  for (const auto& d : detected) {
    long match = -1;
    for (std::size_t a = 0; a < truth.size(); ++a) {
      if (taken[a]) continue;
      if (gap(d.start_idx, truth[a].start_idx) <= tolerance &&
          gap(d.end_idx, truth[a].end_idx) <= tolerance) {
        match = static_cast<long>(a);
        break;
      }
    }
    s.matched.push_back(match);
    if (match < 0) continue;
    taken[static_cast<std::size_t>(match)] = true;
    ++s.hits;
    const double e1 = static_cast<double>(gap(d.start_idx, truth[match].start_idx)) / fs;
    const double e2 = static_cast<double>(gap(d.end_idx, truth[match].end_idx)) / fs;
    s.boundary_error_sum += e1 + e2;
    s.boundary_error_max = std::max({s.boundary_error_max, e1, e2});
  }
  return s;
}

}  // namespace besense
