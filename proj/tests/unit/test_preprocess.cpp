#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "besense/error.hpp"
#include "besense/preprocess.hpp"
#include "besense/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace besense;

namespace {

AmplitudeSeries series(std::vector<double> v, double fs = 1000.0) { return {fs, std::move(v), 0}; }

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("analytic magnitude values") {
  const FilterSpec spec;
  CHECK(butterworth_magnitude(spec, 7.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(butterworth_magnitude(spec, 60.0) == doctest::Approx(2.44140e-4).epsilon(1e-4));
  CHECK(butterworth_magnitude(spec, 0.0) == 1.0);
}

TEST_CASE("7.5 Hz sine comes out at half power") {
  const double g = oracle::sine_gain({}, 1000.0, 7.5);
  CHECK(g == doctest::Approx(0.707).epsilon(0.01 / 0.707));
}

TEST_CASE("60 Hz sine is attenuated below 3e-4") {
  CHECK(oracle::sine_gain({}, 1000.0, 60.0) <= 3e-4);
}

TEST_CASE("measured response tracks the analytic magnitude from 0.1 to 100 Hz") {
  const FilterSpec spec;
  for (double f : {0.1, 0.5, 1.0, 2.0, 5.0, 7.5, 10.0, 20.0, 40.0, 70.0, 100.0}) {
    CAPTURE(f);
    const double want = butterworth_magnitude(spec, f);
    CHECK(std::abs(oracle::sine_gain(spec, 1000.0, f) / want - 1.0) < 0.01);
  }
}

TEST_CASE("section product reproduces the analog prototype") {
  for (int order : {2, 4, 6}) {
    const FilterSpec spec{7.5, order};
    const auto sos = butterworth_sos(spec, 1000.0);
    CHECK(sos.size() == static_cast<std::size_t>(order / 2));
    for (const auto& b : sos) CHECK((b.b0 + b.b1 + b.b2) / (1.0 + b.a1 + b.a2) == doctest::Approx(1.0));
    // Aliasing of the second-order response reaches a few percent near 100 Hz.
    const double top = order == 2 ? 40.0 : 100.0;
    for (double f = 0.1; f <= top; f *= 1.2) {
      CAPTURE(f);
      CHECK(std::abs(sos_magnitude(sos, f, 1000.0) / butterworth_magnitude(spec, f) - 1.0) < 0.01);
    }
  }
}

TEST_CASE("constant input passes unchanged") {
  const std::vector<double> c(500, 20.37);
  const auto y = butterworth_lowpass(series(c), {});
  CHECK(y.values == c);
  CHECK(y.fs == 1000.0);
}

TEST_CASE("filter is linear") {
  const auto x = noise(3000, 1);
  const auto z = noise(3000, 2);
  std::vector<double> mix(3000);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * x[i] - 0.75 * z[i];
  const auto fx = butterworth_lowpass(series(x), {}).values;
  const auto fz = butterworth_lowpass(series(z), {}).values;
  const auto fm = butterworth_lowpass(series(mix), {}).values;
  double scale = 0.0;
  for (double v : fm) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < fm.size(); ++i) {
    CHECK(std::abs(fm[i] - (2.5 * fx[i] - 0.75 * fz[i])) <= 1e-9 * scale);
  }
}

TEST_CASE("output keeps the input length") {
  for (std::size_t n : {1U, 2U, 7U, 1000U}) {
    CHECK(butterworth_lowpass(series(noise(n, n)), {}).values.size() == n);
  }
}

TEST_CASE("invalid filter specs") {
  CHECK_THROWS_AS(butterworth_sos({500.0, 4}, 1000.0), Error);
  CHECK_THROWS_AS(butterworth_sos({600.0, 4}, 1000.0), Error);
  CHECK_THROWS_AS(butterworth_sos({0.0, 4}, 1000.0), Error);
  CHECK_THROWS_AS(butterworth_sos({7.5, 3}, 1000.0), Error);
  CHECK_THROWS_AS(butterworth_sos({7.5, 0}, 1000.0), Error);
}

TEST_CASE("subcarrier selection") {
  SUBCASE("the only moving subcarrier wins") {
    CsiTrace t(1000.0, 30, 400);
    for (std::size_t s = 0; s < 30; ++s) {
      for (std::size_t i = 0; i < 400; ++i) t.at(s, i) = {5.0, 0.0};
    }
    for (std::size_t i = 0; i < 400; ++i) t.at(17, i) = {5.0 + std::sin(0.05 * i), 0.0};
    const auto a = select_subcarrier(t);
    CHECK(a.source_subcarrier == 17);
    CHECK(a.values.size() == 400);
    CHECK(a.values[10] == doctest::Approx(5.0 + std::sin(0.5)));
  }
  SUBCASE("ties go to the lower index") {
    CsiTrace t(1000.0, 4, 100);
    for (std::size_t i = 0; i < 100; ++i) {
      const std::complex<double> v{1.0 + (i % 2), 0.0};
      t.at(1, i) = v;
      t.at(3, i) = v;
      t.at(0, i) = {1.0, 0.0};
      t.at(2, i) = {1.0 + 0.5 * (i % 2), 0.0};
    }
    CHECK(select_subcarrier(t).source_subcarrier == 1);
  }
  SUBCASE("uniform scaling keeps the choice") {
    CsiTrace t(1000.0, 5, 300);
    Rng rng(4);
    std::normal_distribution<double> d(0.0, 1.0);
    for (std::size_t s = 0; s < 5; ++s) {
      for (std::size_t i = 0; i < 300; ++i) t.at(s, i) = {10.0 + (s + 1) * d(rng), d(rng)};
    }
    const auto base = select_subcarrier(t).source_subcarrier;
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      CsiTrace u = t;
      for (std::size_t s = 0; s < 5; ++s) {
        for (std::size_t i = 0; i < 300; ++i) u.at(s, i) *= c;
      }
      CHECK(select_subcarrier(u).source_subcarrier == base);
    }
  }
  SUBCASE("a flat trace has no informative subcarrier") {
    CsiTrace t(1000.0, 3, 50);
    try {
      select_subcarrier(t);
      FAIL("expected a stage error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Stage);
    }
  }
}

TEST_CASE("population variance") {
  const std::vector<double> v{0.0, 1.0, 0.0, 1.0};
  CHECK(population_variance(v.data(), v.size()) == 0.25);
  CHECK(population_variance(v.data(), 0) == 0.0);
}

TEST_CASE("amplitude series round-trip") {
  const auto dir = test::scratch("amplitude");
  AmplitudeSeries a{250.0, noise(100, 8), 6};
  write_amplitude(dir / "a.csv", a);
  CHECK(read_amplitude(dir / "a.csv") == a);
}
