#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "besense/csi_trace.hpp"
#include "besense/fresnel.hpp"
#include "besense/labels.hpp"
#include "besense/vec3.hpp"

namespace besense {

enum class SpeedProfile { Constant, Sinusoidal };

/// One micro-gesture of a single reflector, in time relative to its onset.
///
/// Keystroke: down-then-up along `direction` (default -z), back at rest_pos
/// when it ends. Sinusoidal displacement is travel*(1 - |cos(pi u)|) (speed
/// peaks at the key impact); constant is a triangle.
/// Mouse move: one-directional along `direction`, ending travel away.
/// Sinusoidal displacement is travel*(1 - cos(pi u))/2; constant is travel*u.
struct GestureModel {
  GestureKind kind = GestureKind::Typing;
  Vec3 rest_pos{};
  Vec3 direction{0.0, 0.0, -1.0};
  double travel = 0.02;
  double duration = 0.7;
  SpeedProfile profile = SpeedProfile::Sinusoidal;

  static GestureModel keystroke(Vec3 rest, double travel = 0.02, double duration = 0.7);
  static GestureModel mouse_move(Vec3 rest, Vec3 direction, double travel, double duration);

  /// Throws unless travel > 0, duration > 0 and direction is non-zero and finite.
  void validate() const;
  /// Position at t_rel seconds after onset; clamped to [0, duration].
  Vec3 position(double t_rel) const;
  Vec3 end_position() const;
};

using Trajectory = std::function<Vec3(double)>;

struct DynamicPath {
  Trajectory trajectory;
  double amplitude = 0.0;  // a_k >= 0
};

/// Static + dynamic CFR superposition.
struct ChannelModel {
  FresnelGeometry geometry{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 0.125};
  std::complex<double> static_component{1.0, 0.0};
  std::vector<DynamicPath> dynamic_paths;
  double noise_std = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Reflector that sits still at p.
Trajectory stationary(Vec3 p);

/// H_s + sum_k a_k exp(-j 2 pi d_k(t) / lambda). No noise.
std::complex<double> cfr_at(const ChannelModel& model, double t);
std::complex<double> cfr_at(const ChannelModel& model, double t, double wavelength);

struct ScriptedGesture {
  double start = 0.0;     // seconds
  GestureModel gesture;
  std::size_t path = 0;   // index into ChannelModel::dynamic_paths
};

struct GestureScript {
  std::vector<ScriptedGesture> gestures;
  double duration = 0.0;  // seconds
};

/// Replaces the trajectory of every scripted path with a piecewise one: the
/// reflector waits at the first gesture's rest_pos, performs each gesture and
/// holds the gesture's end position until the next one. Throws when gestures
/// overlap in time, fall outside [0, duration], or when a gesture does not
/// start where the previous gesture of the same path ended.
ChannelModel apply_script(const ChannelModel& model, const GestureScript& script);

/// Per-subcarrier wavelengths and CFR gains.
struct SubcarrierPlan {
  std::vector<double> wavelengths;
  std::vector<double> gains;

  std::size_t size() const { return wavelengths.size(); }
  void validate() const;
};

/// S subcarriers spread uniformly over `bandwidth_hz` centred on the carrier
/// of `center_wavelength`; gains fall linearly from gain_first to gain_last.
SubcarrierPlan make_subcarrier_plan(double center_wavelength, std::size_t subcarriers = 30,
                                    double bandwidth_hz = 20e6, double gain_first = 1.0,
                                    double gain_last = 0.3);

struct TraceSpec {
  double fs = 1000.0;
  SubcarrierPlan plan;
};

/// samples[s][i] = gain_s * cfr_at(model, i/fs, lambda_s) + complex Gaussian
/// noise (re and im each N(0, noise_std^2), drawn from rng_seed). Gestures are
/// recorded as annotations [first sample at or after onset, last sample at or
/// before the end]. Throws when a reflector leaves the slab between the antennas.
CsiTrace simulate_trace(const ChannelModel& model, const GestureScript& script,
                        const TraceSpec& spec);

}  // namespace besense
