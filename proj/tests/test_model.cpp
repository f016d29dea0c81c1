#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "paramsens/geometry.hpp"
#include "paramsens/model.hpp"
#include "support.hpp"

using namespace paramsens;
using doctest::Approx;

namespace {

double at(const CharacteristicValues& v, Characteristic c) { return v[index_of(c)]; }

}  // namespace

TEST_CASE("straight axis-aligned fiber") {
  const auto v = derive_characteristics(testing::straight(0, {0, 0, 0}, {0, 0, 10}, 1.0));
  CHECK(at(v, Characteristic::StraightLength) == 10.0);
  CHECK(at(v, Characteristic::CurvedLength) == 10.0);
  CHECK(at(v, Characteristic::Diameter) == 2.0);
  CHECK(at(v, Characteristic::OrientationTheta) == 0.0);
  CHECK(at(v, Characteristic::Volume) == Approx(31.4159).epsilon(1e-5));
  CHECK(at(v, Characteristic::SurfaceArea) == Approx(62.8319).epsilon(1e-5));
}

TEST_CASE("right-angle polyline lengths") {
  const Fiber f{0, {{0, 0, 0}, {3, 0, 0}, {3, 4, 0}}, 0.5};
  const auto v = derive_characteristics(f);
  CHECK(at(v, Characteristic::CurvedLength) == Approx(7.0));
  CHECK(at(v, Characteristic::StraightLength) == Approx(5.0));
  CHECK(at(v, Characteristic::OrientationTheta) == Approx(90.0));
  CHECK(at(v, Characteristic::OrientationPhi) == Approx(std::atan2(4.0, 3.0) * 180.0 / std::numbers::pi));
}

TEST_CASE("orientation ignores the direction of travel") {
  const auto up = derive_characteristics(testing::straight(0, {0, 0, 0}, {1, 2, 3}, 1.0));
  const auto down = derive_characteristics(testing::straight(0, {1, 2, 3}, {0, 0, 0}, 1.0));
  CHECK(at(up, Characteristic::OrientationPhi) == Approx(at(down, Characteristic::OrientationPhi)));
  CHECK(at(up, Characteristic::OrientationTheta) == Approx(at(down, Characteristic::OrientationTheta)));
  CHECK(at(up, Characteristic::OrientationTheta) <= 90.0);
}

TEST_CASE("bounding box is inflated by the radius") {
  const auto box = bounding_box(testing::straight(0, {0, 0, 0}, {0, 0, 10}, 1.0));
  CHECK(box.lo == Vec3{-1, -1, -1});
  CHECK(box.hi == Vec3{1, 1, 11});

  const auto diag = bounding_box(testing::straight(0, {1, 2, 3}, {4, -5, 6}, 0.5));
  CHECK(diag.contains(Vec3{1.5, 2.5, 3.5}));
  CHECK(diag.contains(Vec3{3.5, -5.5, 6.5}));
}

TEST_CASE("degenerate fibers are rejected") {
  CHECK_THROWS_AS(validate_fiber(Fiber{0, {{1, 1, 1}, {1, 1, 1}}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_fiber(Fiber{0, {{0, 0, 0}}, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_fiber(Fiber{0, {{0, 0, 0}, {0, 0, 1}}, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(FiberResult::from_fibers(0, {testing::straight(3, {0, 0, 0}, {0, 0, 1}, 1),
                                               testing::straight(3, {1, 0, 0}, {1, 0, 1}, 1)}),
                  std::invalid_argument);
}

TEST_CASE("descriptor validation") {
  CHECK_THROWS(validate_descriptors(std::vector<ParameterDescriptor>{}));
  CHECK_THROWS(validate_descriptors(std::vector<ParameterDescriptor>{{"a", 1, 1}}));
  CHECK_THROWS(validate_descriptors(std::vector<ParameterDescriptor>{{"a", 0, 1}, {"a", 0, 2}}));
  CHECK_NOTHROW(validate_descriptors(std::vector<ParameterDescriptor>{{"a", 0, 1}, {"b", -3, 2}}));
}

TEST_CASE("characteristic names round trip") {
  for (const auto c : kCharacteristics) {
    const auto parsed = parse_characteristic(characteristic_name(c));
    REQUIRE(parsed);
    CHECK(*parsed == c);
  }
  CHECK_FALSE(parse_characteristic("Colour"));
}

TEST_CASE("fiber file round trip is exact") {
  std::mt19937_64 rng(7);
  const auto result = testing::random_result(rng, 3, 12, 50.0, 10.0, 1.0);
  std::stringstream s;
  write_fiber_csv(s, result);
  const auto back = read_fiber_csv(s, 3);
  REQUIRE(back.fibers.size() == result.fibers.size());
  for (std::size_t i = 0; i < result.fibers.size(); ++i) {
    CHECK(back.fibers[i].id == result.fibers[i].id);
    CHECK(back.fibers[i].radius == result.fibers[i].radius);
    CHECK(back.fibers[i].vertices == result.fibers[i].vertices);
  }
}

TEST_CASE("malformed fiber files are rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_fiber_csv(in, 0);
  };
  const std::string header = "fiber_id,vertex_index,x,y,z,radius\n";
  CHECK_NOTHROW(parse(header));
  CHECK(parse(header).fibers.empty());
  CHECK_THROWS(parse("id,x\n"));
  CHECK_THROWS(parse(header + "0,0,0,0,0,1\n"));                        // one vertex
  CHECK_THROWS(parse(header + "0,0,0,0,0,1\n0,2,0,0,1,1\n"));           // gap in vertex order
  CHECK_THROWS(parse(header + "0,0,0,0,0,1\n0,1,0,0,1,2\n"));           // radius changes
  CHECK_THROWS(parse(header + "0,0,0,0,0,1\n0,1,0,0,x,1\n"));           // not a number
  CHECK_THROWS(parse(header + "0,0,0,0,0,1\n1,0,0,0,1,1\n0,1,0,0,2,1\n"));  // split fiber
}

TEST_CASE("segment distances against brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const Vec3 c{u(rng), u(rng), u(rng)}, d{u(rng), u(rng), u(rng)};
    double brute = 1e300;
    for (int i = 0; i <= 400; ++i) {
      const Vec3 p = a + (b - a) * (i / 400.0);
      for (int j = 0; j <= 400; ++j) {
        const Vec3 q = c + (d - c) * (j / 400.0);
        brute = std::min(brute, dot(p - q, p - q));
      }
    }
    const double exact = segment_segment_distance_sq(a, b, c, d);
    CHECK(exact <= brute + 1e-12);
    CHECK(std::sqrt(brute) - std::sqrt(exact) < 0.01);
  }
}
