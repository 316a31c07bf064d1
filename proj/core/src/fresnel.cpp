#include "besense/fresnel.hpp"

#include <algorithm>
#include <cmath>

#include "besense/error.hpp"

namespace besense {

FresnelGeometry::FresnelGeometry(Vec3 tx, Vec3 rx, double wavelength)
    : tx_(tx), rx_(rx), wavelength_(wavelength), los_(distance(tx, rx)) {
  require(is_finite(tx) && is_finite(rx), "antenna positions must be finite");
  require(std::isfinite(wavelength) && wavelength > 0.0, "wavelength must be positive");
  require(los_ > 0.0, "transmitter and receiver must not coincide");
}

FresnelGeometry FresnelGeometry::from_carrier(Vec3 tx, Vec3 rx, double carrier_hz) {
  require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "carrier frequency must be positive");
  return FresnelGeometry(tx, rx, kSpeedOfLight / carrier_hz);
}

FresnelGeometry FresnelGeometry::with_wavelength(double wavelength) const {
  return FresnelGeometry(tx_, rx_, wavelength);
}

bool FresnelGeometry::between_antennas(const Vec3& p) const {
  const double along = dot(p - tx_, axis());
  return along >= 0.0 && along <= los_;
}

double excess_path(const FresnelGeometry& geometry, const Vec3& p) {
  // Triangle inequality guarantees >= 0 mathematically; clamp rounding noise.
  return std::max(0.0, geometry.path_length(p) - geometry.los_length());
}

double zone_boundary_radius(const FresnelGeometry& geometry, int n) {
  require(n >= 1, "Fresnel zone index must be >= 1");
  const double lambda = geometry.wavelength();
  const double d = geometry.los_length();
  const double nd = static_cast<double>(n);
  return std::sqrt(nd * lambda * d / 4.0 + nd * nd * lambda * lambda / 16.0);
}

int zone_index(const FresnelGeometry& geometry, const Vec3& p) {
  require(is_finite(p), "point must be finite");
  const double half_wave = geometry.wavelength() / 2.0;
  double q = excess_path(geometry, p) / half_wave;
  // Points constructed on a boundary land within rounding of an integer;
  // snap them so the half-open tie rule applies.
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, nearest)) q = nearest;
  return static_cast<int>(std::floor(q)) + 1;
}

}  // namespace besense
