#include <doctest.h>

#include <cmath>
#include <numbers>

#include "paramsens/synthgen.hpp"

using namespace paramsens;
using doctest::Approx;

namespace {

double mean_of(const FiberResult& r, Characteristic c) {
  const auto v = r.column(c);
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double polyline_distance_sq(const Fiber& a, const Fiber& b) {
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.vertices.size(); ++j) {
      best = std::min(best, segment_segment_distance_sq(a.vertices[i], a.vertices[i + 1], b.vertices[j], b.vertices[j + 1]));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("tanh model reference values") {
  CHECK(tanh_model(0.5, kReferenceLengthModel) == Approx(215.0));
  CHECK(tanh_model(0.3, kReferenceDiameterModel) == Approx(7.0));
  CHECK(tanh_model(1.0, kReferenceLengthModel) == Approx(229.82).epsilon(1e-4));
  CHECK(tanh_model(1.0, kReferenceLengthModel) == Approx(215.0 + 15.0 * std::tanh(2.5)));
}

TEST_CASE("gaussian and its derivative") {
  const GaussianOracle g{0.0, 1.0};
  CHECK(gaussian(0.0, g) == Approx(0.39894).epsilon(1e-5));
  CHECK(gaussian_derivative(0.0, g) == 0.0);
  CHECK(gaussian_derivative(1.0, g) == Approx(-0.24197).epsilon(1e-5));
  for (double x : {0.3, 1.0, 2.5}) CHECK(gaussian_derivative(-x, g) == Approx(-gaussian_derivative(x, g)));

  // central difference oracle, shifted mean and wider spread
  const GaussianOracle h{0.7, 1.8};
  for (double x : {-2.0, 0.0, 0.7, 1.3, 4.0}) {
    const double e = 1e-5;
    const double fd = (gaussian(x + e, h) - gaussian(x - e, h)) / (2 * e);
    CHECK(gaussian_derivative(x, h) == Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("interval variance") {
  const GaussianOracle g{0.0, 1.0};
  CHECK(interval_variance(g, 8.0, 2000) == Approx(1.0).epsilon(1e-3));
  CHECK(interval_variance(g, 1e-3, 64) < 1e-6);
  CHECK(interval_variance(GaussianOracle{3.0, 2.0}, 40.0, 4000) == Approx(4.0).epsilon(1e-3));
  CHECK_THROWS(interval_variance(g, 0.0, 100));
  CHECK_THROWS(interval_variance(g, 1.0, 8));
}

TEST_CASE("interval variance agrees with a fine Riemann sum") {
  const GaussianOracle g{0.0, 1.0};
  const double t = 1.0;
  const int n = 20000;
  const double h = 2 * t / n;
  double mass = 0, first = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -t + (i + 0.5) * h;
    mass += gaussian(x, g) * h;
    first += x * gaussian(x, g) * h;
  }
  const double mean = first / mass;
  double second = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -t + (i + 0.5) * h;
    second += (x - mean) * (x - mean) * gaussian(x, g) * h;
  }
  CHECK(std::abs(interval_variance(g, t, 2000) - second) < 1e-6);
}

TEST_CASE("synthetic generation is deterministic") {
  SynthConfig cfg;
  cfg.fiber_count = 30;
  const auto a = generate(0.4, 0.6, cfg, 5);
  const auto b = generate(0.4, 0.6, cfg, 5);
  REQUIRE(a.result.fibers.size() == b.result.fibers.size());
  for (std::size_t i = 0; i < a.result.fibers.size(); ++i) {
    CHECK(a.result.fibers[i].vertices == b.result.fibers[i].vertices);
    CHECK(a.result.fibers[i].radius == b.result.fibers[i].radius);
  }
  cfg.seed = 2;
  CHECK(generate(0.4, 0.6, cfg, 5).result.fibers[0].vertices != a.result.fibers[0].vertices);
}

TEST_CASE("placed tubes do not overlap and stay in the volume") {
  SynthConfig cfg;
  for (const auto [p1, p2] : {std::pair{1.0, 0.0}, std::pair{1.0, 1.0}, std::pair{0.2, 0.9}}) {
    const auto out = generate(p1, p2, cfg);
    CHECK(out.complete);
    const auto& fibers = out.result.fibers;
    CHECK(fibers.size() == 80);
    const Box3 volume{{0, 0, 0}, cfg.extent};
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      CHECK(volume.contains(bounding_box(fibers[i])));
      for (std::size_t j = i + 1; j < fibers.size(); ++j) {
        const double reach = fibers[i].radius + fibers[j].radius;
        CHECK(polyline_distance_sq(fibers[i], fibers[j]) >= reach * reach);
      }
    }
  }
}

TEST_CASE("fiber layout does not depend on the parameters") {
  SynthConfig cfg;
  const auto a = generate(0.1, 0.2, cfg);
  const auto b = generate(0.9, 0.7, cfg);
  REQUIRE(a.result.fibers.size() == b.result.fibers.size());
  for (std::size_t i = 0; i < a.result.fibers.size(); ++i) {
    const auto& fa = a.result.fibers[i].vertices;
    const auto& fb = b.result.fibers[i].vertices;
    REQUIRE(fa.size() == fb.size());
    const Vec3 ca = (fa.front() + fa.back()) * 0.5;
    const Vec3 cb = (fb.front() + fb.back()) * 0.5;
    CHECK(norm(ca - cb) < 1e-9);
  }
}

TEST_CASE("length and diameter follow the models") {
  SynthConfig cfg;
  const auto mid = generate(0.5, 0.3, cfg).result;
  CHECK(mean_of(mid, Characteristic::StraightLength) == Approx(215.0).epsilon(0.01));
  for (double d : mid.column(Characteristic::Diameter)) CHECK(d == Approx(7.0));
  for (double s : mid.column(Characteristic::StraightLength)) {
    CHECK(s >= 215.0 * (1 - cfg.length_jitter) - 1e-9);
    CHECK(s <= 215.0 * (1 + cfg.length_jitter) + 1e-9);
  }

  const auto wider = generate(0.5, 0.35, cfg).result;
  const double shift = wider.fibers[0].radius * 2 - mid.fibers[0].radius * 2;
  CHECK(shift == Approx(0.5 * (std::tanh(8 * 0.05) - std::tanh(0.0))));
}

TEST_CASE("exhausted attempts are reported, not fatal") {
  SynthConfig cfg;
  cfg.extent = {60, 60, 300};
  cfg.max_placement_attempts = 500;
  const auto out = generate(0.5, 0.5, cfg);
  CHECK_FALSE(out.complete);
  CHECK(out.attempts == 500);
  CHECK(out.result.fibers.size() < 80);
}

TEST_CASE("out-of-range parameters are rejected") {
  CHECK_THROWS(generate(-0.1, 0.5, SynthConfig{}));
  CHECK_THROWS(generate(0.5, 1.5, SynthConfig{}));
  SynthConfig bad;
  bad.fiber_count = 0;
  CHECK_THROWS(generate(0.5, 0.5, bad));
}
