#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>

#include <doctest.h>

#include "besense/csi_trace.hpp"
#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "besense/text_io.hpp"
#include "helpers.hpp"

using namespace besense;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("doubles survive formatting exactly") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  // stod reports ERANGE on subnormals, strtod still returns the value.
  const std::string tiny = io::format_double(std::numeric_limits<double>::denorm_min());
  CHECK(std::strtod(tiny.c_str(), nullptr) == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("trace and sidecar round-trip at full precision") {
  const auto dir = test::scratch("csi_roundtrip");
  CsiTrace trace(1000.0, 3, 50);
  Rng rng(9);
  std::normal_distribution<double> n(0.0, 7.0);
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < 50; ++i) trace.at(s, i) = {n(rng), n(rng)};
  }
  trace.set_annotations({{3, 10, GestureKind::Typing}, {20, 41, GestureKind::MouseMove}});
  trace.set_session_behavior(Behavior::Gaming);

  const auto path = dir / "t.csv";
  write_trace(path, trace);
  write_annotations(annotation_path_for(path), trace);
  CHECK(annotation_path_for(path) == dir / "t.ann");

  CsiTrace back = read_trace(path);
  read_annotations(annotation_path_for(path), back);
  CHECK(back == trace);
}

TEST_CASE("trace header layout") {
  const auto dir = test::scratch("csi_header");
  CsiTrace trace(500.0, 2, 2);
  trace.at(1, 1) = {1.5, -2.0};
  write_trace(dir / "h.csv", trace);
  const auto lines = io::split_lines(io::read_file(dir / "h.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "# fs=500 subcarriers=2");
  CHECK(lines[2] == "0.002,0,0,1.5,-2");
}

TEST_CASE("malformed trace files name the line and field") {
  const auto dir = test::scratch("csi_bad");
  SUBCASE("missing header") {
    write_text(dir / "a.csv", "0,1,2\n");
    CHECK(kind_of([&] { read_trace(dir / "a.csv"); }) == ErrorKind::Parse);
  }
  SUBCASE("wrong column count") {
    write_text(dir / "b.csv", "# fs=1000 subcarriers=1\n0,1,2\n0.001,1\n");
    try {
      read_trace(dir / "b.csv");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }
  SUBCASE("bad number") {
    write_text(dir / "c.csv", "# fs=1000 subcarriers=1\n0,1,2\n0.001,1,x2\n");
    try {
      read_trace(dir / "c.csv");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("im_1") != std::string::npos);
    }
  }
  SUBCASE("annotation out of range") {
    write_text(dir / "d.csv", "# fs=1000 subcarriers=1\n0,1,2\n0.001,1,2\n");
    write_text(dir / "d.ann", "0,5,typing\n");
    CsiTrace t = read_trace(dir / "d.csv");
    CHECK(kind_of([&] { read_annotations(dir / "d.ann", t); }) == ErrorKind::Parse);
  }
  SUBCASE("unknown label") {
    write_text(dir / "e.csv", "# fs=1000 subcarriers=1\n0,1,2\n0.001,1,2\n");
    write_text(dir / "e.ann", "0,1,jumping\n");
    CsiTrace t = read_trace(dir / "e.csv");
    CHECK(kind_of([&] { read_annotations(dir / "e.ann", t); }) == ErrorKind::Parse);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([&] { read_trace(dir / "nope.csv"); }) == ErrorKind::Io);
  }
}

TEST_CASE("annotation invariants") {
  CsiTrace t(1000.0, 1, 100);
  CHECK_THROWS_AS(t.set_annotations({{10, 5, GestureKind::Typing}}), Error);
  CHECK_THROWS_AS(t.set_annotations({{10, 20, GestureKind::Typing}, {20, 30, GestureKind::Typing}}),
                  Error);
  CHECK_THROWS_AS(t.set_annotations({{90, 100, GestureKind::Typing}}), Error);
  CHECK_NOTHROW(t.set_annotations({{0, 99, GestureKind::MouseMove}}));
  CHECK_THROWS_AS(CsiTrace(0.0, 1, 10), Error);
}

TEST_CASE("label names") {
  CHECK(parse_gesture_kind("typing") == GestureKind::Typing);
  CHECK(parse_gesture_kind("keystroke") == GestureKind::Typing);
  CHECK(parse_gesture_kind("mouse") == GestureKind::MouseMove);
  CHECK_FALSE(parse_gesture_kind("click").has_value());
  CHECK(parse_behavior("working") == Behavior::Working);
  CHECK(parse_behavior("static") == Behavior::Static);
  CHECK_FALSE(parse_behavior("sleeping").has_value());
}
