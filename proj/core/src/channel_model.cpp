#include "besense/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "besense/error.hpp"
#include "besense/rng.hpp"

namespace besense {

namespace {

Vec3 unit(const Vec3& v) {
  const double n = norm(v);
  require(std::isfinite(n) && n > 0.0, "gesture direction must be non-zero");
  return (1.0 / n) * v;
}

double shape(const GestureModel& g, double u) {
  if (g.kind == GestureKind::Typing) {
    if (g.profile == SpeedProfile::Sinusoidal) return 1.0 - std::abs(std::cos(std::numbers::pi * u));
    return 1.0 - std::abs(1.0 - 2.0 * u);
  }
  if (g.profile == SpeedProfile::Sinusoidal) return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  return u;
}

}  // namespace

GestureModel GestureModel::keystroke(Vec3 rest, double travel, double duration) {
  GestureModel g;
  g.kind = GestureKind::Typing;
  g.rest_pos = rest;
  g.direction = {0.0, 0.0, -1.0};
  g.travel = travel;
  g.duration = duration;
  g.validate();
  return g;
}

GestureModel GestureModel::mouse_move(Vec3 rest, Vec3 direction, double travel, double duration) {
  GestureModel g;
  g.kind = GestureKind::MouseMove;
  g.rest_pos = rest;
  g.direction = direction;
  g.travel = travel;
  g.duration = duration;
  g.validate();
  return g;
}

void GestureModel::validate() const {
  require(std::isfinite(travel) && travel > 0.0, "gesture travel must be > 0");
  require(std::isfinite(duration) && duration > 0.0, "gesture duration must be > 0");
  require(is_finite(rest_pos), "gesture rest position must be finite");
  require(is_finite(direction) && norm(direction) > 0.0, "gesture direction must be non-zero");
}

Vec3 GestureModel::position(double t_rel) const {
  const double u = std::clamp(t_rel / duration, 0.0, 1.0);
  return rest_pos + (travel * shape(*this, u)) * unit(direction);
}

Vec3 GestureModel::end_position() const {
  if (kind == GestureKind::Typing) return rest_pos;
  return rest_pos + travel * unit(direction);
}

void ChannelModel::validate() const {
  require(std::isfinite(static_component.real()) && std::isfinite(static_component.imag()),
          "static component must be finite");
  require(std::isfinite(noise_std) && noise_std >= 0.0, "noise_std must be >= 0");
  for (const auto& p : dynamic_paths) {
    require(std::isfinite(p.amplitude) && p.amplitude >= 0.0,
            "reflection amplitudes must be >= 0");
    require(static_cast<bool>(p.trajectory), "dynamic path needs a trajectory");
  }
}

Trajectory stationary(Vec3 p) {
  return [p](double) { return p; };
}

std::complex<double> cfr_at(const ChannelModel& model, double t) {
  return cfr_at(model, t, model.geometry.wavelength());
}

std::complex<double> cfr_at(const ChannelModel& model, double t, double wavelength) {
  std::complex<double> h = model.static_component;
  const double k = 2.0 * std::numbers::pi / wavelength;
  for (const auto& path : model.dynamic_paths) {
    const double d = model.geometry.path_length(path.trajectory(t));
    h += std::polar(path.amplitude, -k * d);
  }
  return h;
}

ChannelModel apply_script(const ChannelModel& model, const GestureScript& script) {
  require(std::isfinite(script.duration) && script.duration > 0.0,
          "script duration must be > 0");
  std::vector<ScriptedGesture> order = script.gestures;
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& g = order[i];
    g.gesture.validate();
    require(g.path < model.dynamic_paths.size(), "scripted gesture refers to an unknown path");
    require(std::isfinite(g.start) && g.start >= 0.0, "gesture start must be >= 0");
    require(g.start + g.gesture.duration <= script.duration,
            "gesture runs past the end of the script");
    if (i > 0) {
      const auto& prev = order[i - 1];
      if (!(prev.start + prev.gesture.duration < g.start)) {
        std::ostringstream msg;
        msg << "gestures overlap: one starting at " << prev.start << " s and one at " << g.start
            << " s";
        fail(ErrorKind::InvalidArgument, msg.str());
      }
    }
  }

  ChannelModel out = model;
  for (std::size_t k = 0; k < model.dynamic_paths.size(); ++k) {
    std::vector<ScriptedGesture> mine;
    for (const auto& g : order) {
      if (g.path == k) mine.push_back(g);
    }
    if (mine.empty()) continue;
    for (std::size_t i = 1; i < mine.size(); ++i) {
      const Vec3 gap = mine[i].gesture.rest_pos - mine[i - 1].gesture.end_position();
      require(norm(gap) <= 1e-9, "gesture does not start where the previous one on its path ended");
    }
    out.dynamic_paths[k].trajectory = [mine](double t) {
      // Last gesture with start <= t, if any.
      auto it = std::upper_bound(mine.begin(), mine.end(), t,
                                 [](double v, const ScriptedGesture& g) { return v < g.start; });
      if (it == mine.begin()) return mine.front().gesture.rest_pos;
      const ScriptedGesture& g = *std::prev(it);
      const double rel = t - g.start;
      if (rel >= g.gesture.duration) return g.gesture.end_position();
      return g.gesture.position(rel);
    };
  }
  return out;
}

void SubcarrierPlan::validate() const {
  require(!wavelengths.empty(), "subcarrier plan needs at least one subcarrier");
  require(wavelengths.size() == gains.size(), "subcarrier wavelengths and gains differ in size");
  for (std::size_t s = 0; s < wavelengths.size(); ++s) {
    require(std::isfinite(wavelengths[s]) && wavelengths[s] > 0.0,
            "subcarrier wavelengths must be > 0");
    require(std::isfinite(gains[s]) && gains[s] > 0.0, "subcarrier gains must be > 0");
  }
}

SubcarrierPlan make_subcarrier_plan(double center_wavelength, std::size_t subcarriers,
                                    double bandwidth_hz, double gain_first, double gain_last) {
  require(subcarriers >= 1, "need at least one subcarrier");
  require(std::isfinite(center_wavelength) && center_wavelength > 0.0,
          "center wavelength must be > 0");
  require(std::isfinite(bandwidth_hz) && bandwidth_hz >= 0.0, "bandwidth must be >= 0");
  SubcarrierPlan plan;
  const double fc = kSpeedOfLight / center_wavelength;
  for (std::size_t s = 0; s < subcarriers; ++s) {
    const double u = subcarriers == 1 ? 0.5 : static_cast<double>(s) / (subcarriers - 1);
    const double f = fc + (u - 0.5) * bandwidth_hz;
    plan.wavelengths.push_back(subcarriers == 1 ? center_wavelength : kSpeedOfLight / f);
    plan.gains.push_back(subcarriers == 1 ? gain_first : gain_first + (gain_last - gain_first) * u);
  }
  plan.validate();
  return plan;
}

CsiTrace simulate_trace(const ChannelModel& model, const GestureScript& script,
                        const TraceSpec& spec) {
  model.validate();
  spec.plan.validate();
  const ChannelModel scripted = apply_script(model, script);
  const auto length = static_cast<std::size_t>(std::llround(spec.fs * script.duration));
  CsiTrace trace(spec.fs, spec.plan.size(), length);

  // Reflected path lengths per sample, shared by all subcarriers.
  const std::size_t paths = scripted.dynamic_paths.size();
  std::vector<double> dist(paths * length);
  for (std::size_t k = 0; k < paths; ++k) {
    for (std::size_t i = 0; i < length; ++i) {
      const Vec3 p = scripted.dynamic_paths[k].trajectory(static_cast<double>(i) / spec.fs);
      if (!scripted.geometry.between_antennas(p)) {
        std::ostringstream msg;
        msg << "reflector " << k << " leaves the region between the antennas at t="
            << static_cast<double>(i) / spec.fs << " s";
        fail(ErrorKind::InvalidArgument, msg.str());
      }
      dist[k * length + i] = scripted.geometry.path_length(p);
    }
  }

  Rng rng(model.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t s = 0; s < spec.plan.size(); ++s) {
    const double kw = 2.0 * std::numbers::pi / spec.plan.wavelengths[s];
    const double gain = spec.plan.gains[s];
    auto row = trace.row(s);
    for (std::size_t i = 0; i < length; ++i) {
      std::complex<double> h = scripted.static_component;
      for (std::size_t k = 0; k < paths; ++k) {
        h += std::polar(scripted.dynamic_paths[k].amplitude, -kw * dist[k * length + i]);
      }
      h *= gain;
      if (model.noise_std > 0.0) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        h += std::complex<double>(model.noise_std * re, model.noise_std * im);
      }
      row[i] = h;
    }
  }

  std::vector<Annotation> anns;
  std::vector<ScriptedGesture> order = script.gestures;
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  for (const auto& g : order) {
    const double end = g.start + g.gesture.duration;
    std::size_t first = length;
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = static_cast<std::size_t>(std::max(0.0, std::floor(g.start * spec.fs) - 1));
         i < length; ++i) {
      const double t = static_cast<double>(i) / spec.fs;
      if (t > end) break;
      if (t >= g.start) {
        if (!any) first = i;
        last = i;
        any = true;
      }
    }
    require(any, "gesture is shorter than one sample interval");
    anns.push_back({first, last, g.gesture.kind});
  }
  trace.set_annotations(std::move(anns));
  return trace;
}

}  // namespace besense
