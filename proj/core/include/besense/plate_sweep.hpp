#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "besense/fresnel.hpp"
#include "besense/vec3.hpp"

namespace besense {

/// Square metal plate dragged through the zones below the link.
///
/// The plate stands vertically, spanning the Tx->Rx direction and height, and
/// is modeled as grid x grid coherent point scatterers, each with amplitude
/// reflectivity * (side/grid)^2 so the total reflection scales with area.
struct PlateSweepSpec {
  std::vector<double> side_lengths;       // meters, positive ascending
  Vec3 center{0.5, 0.0, -0.5};
  double drag_distance = 0.015;           // meters along Tx->Rx
  double drag_speed = 0.08;               // m/s
  std::size_t grid = 16;
  double reflectivity = 50.0;             // amplitude per square meter
  std::complex<double> static_component{20.0, 0.0};
  double noise_std = 0.0;
  double fs = 1000.0;
  std::size_t repeats = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlateSweepPoint {
  double side_length = 0.0;
  double peak_to_peak = 0.0;  // mean over repeats
};

std::vector<PlateSweepPoint> simulate_plate_sweep(const FresnelGeometry& geometry,
                                                  const PlateSweepSpec& spec);

/// Peak-to-peak |H| of one drag of one plate; rng_seed only matters with noise.
double plate_peak_to_peak(const FresnelGeometry& geometry, const PlateSweepSpec& spec,
                          double side_length, std::uint64_t rng_seed);

}  // namespace besense
