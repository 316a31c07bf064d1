#include "besense/plate_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "besense/error.hpp"
#include "besense/rng.hpp"

namespace besense {

void PlateSweepSpec::validate() const {
  require(!side_lengths.empty(), "plate sweep needs at least one side length");
  for (std::size_t i = 0; i < side_lengths.size(); ++i) {
    require(std::isfinite(side_lengths[i]) && side_lengths[i] > 0.0,
            "plate side lengths must be > 0");
    if (i > 0) require(side_lengths[i - 1] < side_lengths[i], "plate side lengths must ascend");
  }
  require(grid >= 2, "plate grid must have at least 2x2 scatterers");
  require(std::isfinite(drag_distance) && drag_distance > 0.0, "drag distance must be > 0");
  require(std::isfinite(drag_speed) && drag_speed > 0.0, "drag speed must be > 0");
  require(std::isfinite(reflectivity) && reflectivity >= 0.0, "reflectivity must be >= 0");
  require(std::isfinite(noise_std) && noise_std >= 0.0, "noise_std must be >= 0");
  require(std::isfinite(fs) && fs > 0.0, "fs must be > 0");
  require(repeats >= 1, "repeats must be >= 1");
  require(is_finite(center), "plate center must be finite");
}

double plate_peak_to_peak(const FresnelGeometry& geometry, const PlateSweepSpec& spec,
                          double side_length, std::uint64_t rng_seed) {
  const Vec3 along = geometry.axis();
  // Vertical direction orthogonal to the link; z unless the link is vertical.
  Vec3 up{0.0, 0.0, 1.0};
  up -= dot(up, along) * along;
  if (norm(up) < 1e-12) up = {0.0, 1.0, 0.0};
  up *= 1.0 / norm(up);

  const std::size_t n = spec.grid;
  const double cell = side_length / static_cast<double>(n);
  const double amp = spec.reflectivity * cell * cell;
  std::vector<Vec3> cells;
  cells.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (static_cast<double>(i) + 0.5) * cell - 0.5 * side_length;
      const double v = (static_cast<double>(j) + 0.5) * cell - 0.5 * side_length;
      cells.push_back(spec.center + u * along + v * up);
    }
  }

  const double k = 2.0 * std::numbers::pi / geometry.wavelength();
  const double duration = spec.drag_distance / spec.drag_speed;
  const auto samples = static_cast<std::size_t>(std::llround(duration * spec.fs)) + 1;
  Rng rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t s = 0; s < samples; ++s) {
    const double shift = spec.drag_distance * static_cast<double>(s) /
                         static_cast<double>(samples - 1);
    std::complex<double> h = spec.static_component;
    for (const Vec3& c : cells) {
      h += std::polar(amp, -k * geometry.path_length(c + shift * along));
    }
    if (spec.noise_std > 0.0) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      h += std::complex<double>(spec.noise_std * re, spec.noise_std * im);
    }
    const double a = std::abs(h);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return hi - lo;
}

std::vector<PlateSweepPoint> simulate_plate_sweep(const FresnelGeometry& geometry,
                                                  const PlateSweepSpec& spec) {
  spec.validate();
  std::vector<PlateSweepPoint> out;
  for (std::size_t i = 0; i < spec.side_lengths.size(); ++i) {
    // Running mean: identical repeats (noise_std = 0) give exactly the single-run value.
    double mean = 0.0;
    for (std::size_t r = 0; r < spec.repeats; ++r) {
      const double v = plate_peak_to_peak(geometry, spec, spec.side_lengths[i],
                                          derive_seed(spec.seed, i * spec.repeats + r));
      mean += (v - mean) / static_cast<double>(r + 1);
    }
    out.push_back({spec.side_lengths[i], mean});
  }
  return out;
}

}  // namespace besense
