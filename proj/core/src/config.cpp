#include "besense/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "besense/text_io.hpp"

namespace besense {

using nlohmann::json;

PlateSweepSpec PipelineConfig::default_plate() {
  PlateSweepSpec p;
  for (int cm = 2; cm <= 12; ++cm) p.side_lengths.push_back(cm / 100.0);
  p.reflectivity = 1000.0;
  return p;
}

TraceSpec PipelineConfig::trace_spec() const {
  return {fs, make_subcarrier_plan(scene.geometry.wavelength(), subcarriers, bandwidth_hz,
                                   gain_first, gain_last)};
}

std::uint64_t stage_seed(const PipelineConfig& config, SeedStream stream) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stream));
}

namespace {

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidArgument, "config: " + field + ": " + what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PipelineConfig::validate() const {
  check(positive(fs) && std::floor(fs) == fs, "sampling.fs", "must be a positive integer");
  check(subcarriers >= 1, "sampling.subcarriers", "must be >= 1");
  check(std::isfinite(bandwidth_hz) && bandwidth_hz >= 0.0, "sampling.bandwidth_hz", "must be >= 0");
  check(positive(gain_first), "sampling.gain_first", "must be > 0");
  check(positive(gain_last), "sampling.gain_last", "must be > 0");
  check(std::isfinite(scene.noise_std) && scene.noise_std >= 0.0, "scene.noise_std", "must be >= 0");
  check(scene.finger_amplitude >= 0.0, "scene.finger_amplitude", "must be >= 0");
  check(scene.hand_amplitude >= 0.0, "scene.hand_amplitude", "must be >= 0");
  check(scene.geometry.between_antennas(scene.keyboard), "scene.keyboard",
        "must lie between the antennas");
  check(scene.geometry.between_antennas(scene.mouse_home), "scene.mouse_home",
        "must lie between the antennas");
  check(filter.order >= 2 && filter.order % 2 == 0, "filter.order", "must be even and >= 2");
  check(positive(filter.cutoff_hz) && filter.cutoff_hz < fs / 2.0, "filter.cutoff_hz",
        "must lie in (0, fs/2)");
  check(positive(segmenter.window) && segmenter.window * fs >= 2.0, "segmenter.window",
        "must span at least 2 samples");
  check(segmenter.step >= 1, "segmenter.step", "must be >= 1");
  check(positive(segmenter.smoothing_gain), "segmenter.smoothing_gain", "must be > 0");
  check(positive(segmenter.se_start), "segmenter.se_start", "must be > 0");
  check(positive(segmenter.se_increment), "segmenter.se_increment", "must be > 0");
  check(std::isfinite(segmenter.se_stop) && segmenter.se_stop >= segmenter.se_start,
        "segmenter.se_stop", "must be >= se_start");
  check(segmenter.stability_count >= 2, "segmenter.stability_count", "must be >= 2");
  check(segmenter.se_values().size() >= segmenter.stability_count, "segmenter.stability_count",
        "exceeds the number of se values");
  check(segmenter.spread_samples >= 1, "segmenter.spread_samples", "must be >= 1");
  check(std::isfinite(segmenter.min_amplitude_span) && segmenter.min_amplitude_span >= 0.0,
        "segmenter.min_amplitude_span", "must be >= 0");
  check(positive(match_tolerance), "segmenter.match_tolerance", "must be > 0");
  check(k >= 1, "classifier.k", "must be >= 1");
  check(folds >= 2, "classifier.folds", "must be >= 2");
  check(gesture_segments >= folds, "classifier.gesture_segments", "must be >= folds");
  check(baum_welch.max_iter >= 1, "hmm.max_iter", "must be >= 1");
  check(std::isfinite(baum_welch.tol) && baum_welch.tol >= 0.0, "hmm.tol", "must be >= 0");
  check(sequence_length >= 1, "hmm.sequence_length", "must be >= 1");
  check(train_sequences >= 1, "hmm.train_sequences", "must be >= 1");
  check(test_sequences >= 1, "hmm.test_sequences", "must be >= 1");
  check(synthetic_length >= 1, "hmm.synthetic_length", "must be >= 1");
  try {
    corpus.validate();
  } catch (const Error& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: corpus: ") + e.what());
  }
  try {
    plate.validate();
  } catch (const Error& e) {
    fail(ErrorKind::InvalidArgument, std::string("config: plate: ") + e.what());
  }
}

namespace {

// Reads keys of one JSON object, rejecting any it does not know.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::Parse, "config: " + path_ + ": expected an object");
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(ErrorKind::Parse, "config: " + field(it.key()) + ": unknown key");
      }
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = get(key);
    if (!v) return;
    try {
      if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      fail(ErrorKind::Parse, "config: " + field(key) + ": " + e.what());
    }
  }

  void read_vec3(const std::string& key, Vec3& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 3 || !(*v)[0].is_number() || !(*v)[1].is_number() ||
        !(*v)[2].is_number()) {
      fail(ErrorKind::Parse, "config: " + field(key) + ": expected [x, y, z]");
    }
    out = {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
  }

  void read_range(const std::string& key, std::pair<double, double>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      fail(ErrorKind::Parse, "config: " + field(key) + ": expected [low, high]");
    }
    out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  std::optional<Section> sub(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return std::optional<Section>(std::in_place, *v, field(key));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E, class Parse>
void read_enum(Section& s, const std::string& key, E& out, Parse parse) {
  std::string text;
  s.read(key, text);
  if (text.empty()) return;
  const auto v = parse(text);
  if (!v) fail(ErrorKind::Parse, "config: " + s.field(key) + ": unknown value '" + text + "'");
  out = *v;
}

}  // namespace

PipelineConfig config_from_json(std::string_view text, std::string_view where) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string(where) + ": " + e.what());
  }
  PipelineConfig c;
  {
    Section root(j, "");
    root.read("seed", c.seed);
    if (auto g = root.sub("geometry")) {
      Vec3 tx = c.scene.geometry.tx();
      Vec3 rx = c.scene.geometry.rx();
      double wavelength = c.scene.geometry.wavelength();
      double carrier = 0.0;
      g->read_vec3("tx", tx);
      g->read_vec3("rx", rx);
      g->read("wavelength", wavelength);
      g->read("carrier_hz", carrier);
      if (carrier != 0.0) {
        check(positive(carrier), "geometry.carrier_hz", "must be > 0");
        wavelength = kSpeedOfLight / carrier;
      }
      check(positive(wavelength), "geometry.wavelength", "must be > 0");
      check(distance(tx, rx) > 0.0, "geometry.rx", "must differ from tx");
      c.scene.geometry = FresnelGeometry(tx, rx, wavelength);
      g->finish();
    }
    if (auto s = root.sub("scene")) {
      double re = c.scene.static_component.real();
      double im = c.scene.static_component.imag();
      s->read("static_re", re);
      s->read("static_im", im);
      c.scene.static_component = {re, im};
      s->read("noise_std", c.scene.noise_std);
      s->read_vec3("keyboard", c.scene.keyboard);
      s->read_vec3("mouse_home", c.scene.mouse_home);
      s->read("finger_amplitude", c.scene.finger_amplitude);
      s->read("hand_amplitude", c.scene.hand_amplitude);
      s->finish();
    }
    if (auto s = root.sub("sampling")) {
      s->read("fs", c.fs);
      s->read("subcarriers", c.subcarriers);
      s->read("bandwidth_hz", c.bandwidth_hz);
      s->read("gain_first", c.gain_first);
      s->read("gain_last", c.gain_last);
      s->finish();
    }
    if (auto s = root.sub("filter")) {
      s->read("cutoff_hz", c.filter.cutoff_hz);
      s->read("order", c.filter.order);
      s->finish();
    }
    if (auto s = root.sub("segmenter")) {
      s->read("window", c.segmenter.window);
      s->read("step", c.segmenter.step);
      s->read("smoothing_gain", c.segmenter.smoothing_gain);
      s->read("se_start", c.segmenter.se_start);
      s->read("se_stop", c.segmenter.se_stop);
      s->read("se_increment", c.segmenter.se_increment);
      s->read("stability_count", c.segmenter.stability_count);
      s->read("spread_samples", c.segmenter.spread_samples);
      s->read("min_amplitude_span", c.segmenter.min_amplitude_span);
      s->read("match_tolerance", c.match_tolerance);
      s->finish();
    }
    if (auto s = root.sub("classifier")) {
      read_enum(*s, "kind", c.classifier, parse_classifier_kind);
      s->read("k", c.k);
      s->read("folds", c.folds);
      s->read("gesture_segments", c.gesture_segments);
      s->finish();
    }
    if (auto s = root.sub("hmm")) {
      read_enum(*s, "method", c.behavior_method, parse_behavior_method);
      s->read("max_iter", c.baum_welch.max_iter);
      s->read("tol", c.baum_welch.tol);
      s->read("sequence_length", c.sequence_length);
      s->read("train_sequences", c.train_sequences);
      s->read("test_sequences", c.test_sequences);
      s->read("synthetic_length", c.synthetic_length);
      s->finish();
    }
    if (auto s = root.sub("corpus")) {
      s->read("traces", c.corpus.traces);
      s->read("min_gestures", c.corpus.min_gestures);
      s->read("max_gestures", c.corpus.max_gestures);
      s->read_range("first_start", c.corpus.first_start);
      s->read_range("gap", c.corpus.gap);
      s->read("tail", c.corpus.tail);
      s->read("p_keystroke", c.corpus.p_keystroke);
      s->read_range("keystroke_travel", c.corpus.keystroke_travel);
      s->read_range("keystroke_duration", c.corpus.keystroke_duration);
      s->read_range("mouse_travel", c.corpus.mouse_travel);
      s->read_range("mouse_duration", c.corpus.mouse_duration);
      s->finish();
    }
    if (auto s = root.sub("plate")) {
      s->read("side_lengths", c.plate.side_lengths);
      s->read_vec3("center", c.plate.center);
      s->read("drag_distance", c.plate.drag_distance);
      s->read("drag_speed", c.plate.drag_speed);
      s->read("grid", c.plate.grid);
      s->read("reflectivity", c.plate.reflectivity);
      double re = c.plate.static_component.real();
      double im = c.plate.static_component.imag();
      s->read("static_re", re);
      s->read("static_im", im);
      c.plate.static_component = {re, im};
      s->read("noise_std", c.plate.noise_std);
      s->read("repeats", c.plate.repeats);
      s->finish();
    }
    root.finish();
  }
  c.plate.fs = c.fs;
  c.validate();
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  auto v3 = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  auto rg = [](const std::pair<double, double>& r) { return json::array({r.first, r.second}); };
  const auto& g = c.scene.geometry;
  json j;
  j["seed"] = c.seed;
  j["geometry"] = {{"tx", v3(g.tx())}, {"rx", v3(g.rx())}, {"wavelength", g.wavelength()}};
  j["scene"] = {{"static_re", c.scene.static_component.real()},
                {"static_im", c.scene.static_component.imag()},
                {"noise_std", c.scene.noise_std},
                {"keyboard", v3(c.scene.keyboard)},
                {"mouse_home", v3(c.scene.mouse_home)},
                {"finger_amplitude", c.scene.finger_amplitude},
                {"hand_amplitude", c.scene.hand_amplitude}};
  j["sampling"] = {{"fs", c.fs},
                   {"subcarriers", c.subcarriers},
                   {"bandwidth_hz", c.bandwidth_hz},
                   {"gain_first", c.gain_first},
                   {"gain_last", c.gain_last}};
  j["filter"] = {{"cutoff_hz", c.filter.cutoff_hz}, {"order", c.filter.order}};
  j["segmenter"] = {{"window", c.segmenter.window},
                    {"step", c.segmenter.step},
                    {"smoothing_gain", c.segmenter.smoothing_gain},
                    {"se_start", c.segmenter.se_start},
                    {"se_stop", c.segmenter.se_stop},
                    {"se_increment", c.segmenter.se_increment},
                    {"stability_count", c.segmenter.stability_count},
                    {"spread_samples", c.segmenter.spread_samples},
                    {"min_amplitude_span", c.segmenter.min_amplitude_span},
                    {"match_tolerance", c.match_tolerance}};
  j["classifier"] = {{"kind", std::string(to_string(c.classifier))},
                     {"k", c.k},
                     {"folds", c.folds},
                     {"gesture_segments", c.gesture_segments}};
  j["hmm"] = {{"method", std::string(to_string(c.behavior_method))},
              {"max_iter", c.baum_welch.max_iter},
              {"tol", c.baum_welch.tol},
              {"sequence_length", c.sequence_length},
              {"train_sequences", c.train_sequences},
              {"test_sequences", c.test_sequences},
              {"synthetic_length", c.synthetic_length}};
  j["corpus"] = {{"traces", c.corpus.traces},
                 {"min_gestures", c.corpus.min_gestures},
                 {"max_gestures", c.corpus.max_gestures},
                 {"first_start", rg(c.corpus.first_start)},
                 {"gap", rg(c.corpus.gap)},
                 {"tail", c.corpus.tail},
                 {"p_keystroke", c.corpus.p_keystroke},
                 {"keystroke_travel", rg(c.corpus.keystroke_travel)},
                 {"keystroke_duration", rg(c.corpus.keystroke_duration)},
                 {"mouse_travel", rg(c.corpus.mouse_travel)},
                 {"mouse_duration", rg(c.corpus.mouse_duration)}};
  j["plate"] = {{"side_lengths", c.plate.side_lengths},
                {"center", v3(c.plate.center)},
                {"drag_distance", c.plate.drag_distance},
                {"drag_speed", c.plate.drag_speed},
                {"grid", c.plate.grid},
                {"reflectivity", c.plate.reflectivity},
                {"static_re", c.plate.static_component.real()},
                {"static_im", c.plate.static_component.imag()},
                {"noise_std", c.plate.noise_std},
                {"repeats", c.plate.repeats}};
  return j.dump(2) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_file(path), path.string());
}

}  // namespace besense
