#pragma once

#include "besense/vec3.hpp"

namespace besense {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Transmitter/receiver pair and carrier wavelength.
///
/// Fresnel zone n is the shell between the ellipsoids on which the excess
/// reflected path equals (n-1)*lambda/2 and n*lambda/2. Zones are half-open:
/// a point exactly on boundary n belongs to zone n+1.
class FresnelGeometry {
 public:
  /// Throws InvalidArgument when wavelength <= 0, tx == rx, or any input is non-finite.
  FresnelGeometry(Vec3 tx, Vec3 rx, double wavelength);

  /// Wavelength from a carrier frequency (lambda = c / f).
  static FresnelGeometry from_carrier(Vec3 tx, Vec3 rx, double carrier_hz);

  const Vec3& tx() const { return tx_; }
  const Vec3& rx() const { return rx_; }
  double wavelength() const { return wavelength_; }
  double los_length() const { return los_; }
  Vec3 midpoint() const { return 0.5 * (tx_ + rx_); }
  /// Unit vector from tx to rx.
  Vec3 axis() const { return (1.0 / los_) * (rx_ - tx_); }

  /// Same antennas, different wavelength (used per subcarrier).
  FresnelGeometry with_wavelength(double wavelength) const;

  /// Reflected path length |Tx,p| + |p,Rx|.
  double path_length(const Vec3& p) const { return distance(tx_, p) + distance(p, rx_); }

  /// Whether p projects onto the Tx->Rx axis within [0, d].
  bool between_antennas(const Vec3& p) const;

 private:
  Vec3 tx_;
  Vec3 rx_;
  double wavelength_;
  double los_;
};

/// |Tx,p| + |p,Rx| - |Tx,Rx|; zero exactly on the line-of-sight segment.
double excess_path(const FresnelGeometry& geometry, const Vec3& p);

/// Perpendicular distance from the Tx-Rx midpoint to the boundary of zone n,
/// sqrt(n*lambda*d/4 + n^2*lambda^2/16). Throws for n < 1.
double zone_boundary_radius(const FresnelGeometry& geometry, int n);

/// floor(excess / (lambda/2)) + 1.
int zone_index(const FresnelGeometry& geometry, const Vec3& p);

}  // namespace besense
