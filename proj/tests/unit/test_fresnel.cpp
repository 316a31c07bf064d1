#include <cmath>

#include <doctest.h>

#include "besense/error.hpp"
#include "besense/fresnel.hpp"
#include "oracles.hpp"

using namespace besense;

namespace {

const FresnelGeometry kLink{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 0.125};

}  // namespace

TEST_CASE("closed-form boundary radius agrees with a numerical root find") {
  for (int n = 1; n <= 20; ++n) {
    CAPTURE(n);
    CHECK(zone_boundary_radius(kLink, n) == doctest::Approx(oracle::boundary_radius(kLink, n)).epsilon(1e-12));
  }
  // Off-centre link and another wavelength.
  const FresnelGeometry g{{0.2, -0.3, 0.1}, {1.7, 0.4, 0.1}, 0.0517};
  for (int n : {1, 3, 7, 15}) {
    const Vec3 dir{0.0, 0.0, 1.0};
    const Vec3 p = g.midpoint() + zone_boundary_radius(g, n) * dir;
    CHECK(std::abs(excess_path(g, p) - n * g.wavelength() / 2.0) < 1e-9);
  }
}

TEST_CASE("boundary radii at the default link") {
  CHECK(zone_boundary_radius(kLink, 1) == doctest::Approx(0.17952).epsilon(1e-4));
  CHECK(zone_boundary_radius(kLink, 9) == doctest::Approx(0.60029).epsilon(1e-4));
  CHECK(zone_boundary_radius(kLink, 10) == doctest::Approx(0.64043).epsilon(1e-4));
  const double t = zone_boundary_radius(kLink, 10) - zone_boundary_radius(kLink, 9);
  CHECK(t == doctest::Approx(0.0401).epsilon(1e-2));
}

TEST_CASE("excess path matches the boundary definition for n up to 20") {
  for (int n = 1; n <= 20; ++n) {
    const Vec3 p = kLink.midpoint() + Vec3{0.0, 0.0, -zone_boundary_radius(kLink, n)};
    CHECK(std::abs(excess_path(kLink, p) - n * 0.0625) < 1e-9);
  }
}

TEST_CASE("shorter wavelength shrinks every zone") {
  const auto half = kLink.with_wavelength(0.0625);
  for (int n = 1; n <= 10; ++n) {
    CHECK(zone_boundary_radius(half, n) < zone_boundary_radius(kLink, n));
  }
}

TEST_CASE("zone index") {
  CHECK(zone_index(kLink, {0.3, 0.0, 0.0}) == 1);
  CHECK(zone_index(kLink, {0.0, 0.0, 0.0}) == 1);
  CHECK(zone_index(kLink, {0.5, 0.0, -0.62}) == 10);
  CHECK(zone_index(kLink, {0.5, 0.0, -0.603}) == 10);

  // A point whose excess path is exactly lambda/2 (representable) is in zone 2.
  const FresnelGeometry g{{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1.0};
  const Vec3 edge{0.0, 0.0, std::sqrt(1.25 * 1.25 - 1.0)};  // 2*1.25 - 2 = 0.5
  REQUIRE(excess_path(g, edge) == 0.5);
  CHECK(zone_index(g, edge) == 2);
}

TEST_CASE("excess path is zero on the line of sight and positive off it") {
  CHECK(excess_path(kLink, {0.25, 0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(excess_path(kLink, {0.5, 0.1, 0.0}) > 0.0);
  CHECK(kLink.los_length() == 1.0);
}

TEST_CASE("slab between the antennas") {
  CHECK(kLink.between_antennas({0.0, 0.0, -1.0}));
  CHECK(kLink.between_antennas({1.0, 5.0, -1.0}));
  CHECK_FALSE(kLink.between_antennas({-0.01, 0.0, -0.5}));
  CHECK_FALSE(kLink.between_antennas({1.01, 0.0, -0.5}));
}

TEST_CASE("invalid geometry is rejected") {
  CHECK_THROWS_AS(FresnelGeometry({0, 0, 0}, {0, 0, 0}, 0.125), Error);
  CHECK_THROWS_AS(FresnelGeometry({0, 0, 0}, {1, 0, 0}, 0.0), Error);
  CHECK_THROWS_AS(FresnelGeometry({0, 0, 0}, {1, 0, 0}, -1.0), Error);
  CHECK_THROWS_AS(FresnelGeometry({NAN, 0, 0}, {1, 0, 0}, 0.125), Error);
  CHECK_THROWS_AS(zone_boundary_radius(kLink, 0), Error);
  CHECK(FresnelGeometry::from_carrier({0, 0, 0}, {1, 0, 0}, 2.4e9).wavelength() ==
        doctest::Approx(kSpeedOfLight / 2.4e9));
}
