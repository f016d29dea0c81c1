#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "paramsens/sampling.hpp"

using namespace paramsens;
using doctest::Approx;

namespace {

const std::vector<ParameterDescriptor> kUnitSquare{{"param1", 0, 1}, {"param2", 0, 1}};

std::vector<double> branch_values(const std::vector<BranchPoint>& points, std::size_t param) {
  std::vector<double> out;
  for (const auto& p : points) {
    if (p.param == param) out.push_back(p.vector[param]);
  }
  return out;
}

// Number of branch points a full traversal produces, counted independently.
std::size_t expected_branch_points(double c, const ParameterDescriptor& d, double w) {
  const double step = w * d.range();
  std::size_t n = 0;
  for (int k = 1; c - k * step >= d.min - 1e-9 * d.range(); ++k) ++n;
  for (int k = 1; c + k * step <= d.max + 1e-9 * d.range(); ++k) ++n;
  return n;
}

}  // namespace

TEST_CASE("portable generator matches the standard mt19937_64 stream") {
  std::mt19937_64 reference(42);
  PortableRng rng(42);
  const auto first = reference();
  CHECK(rng.uniform() == static_cast<double>(first >> 11) * 0x1.0p-53);
  // the standard fixes the 10000th output for the default seed
  std::mt19937_64 standard;
  standard.discard(9999);
  CHECK(standard() == 9981545732273789042ULL);
}

TEST_CASE("bounded draws stay in range and cover it") {
  PortableRng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("latin hypercube puts one sample in each stratum") {
  for (const std::size_t n : {4u, 10u, 37u}) {
    const auto centers = latin_hypercube(kUnitSquare, n, 99);
    REQUIRE(centers.size() == n);
    for (std::size_t d = 0; d < 2; ++d) {
      std::vector<int> hits(n, 0);
      for (const auto& c : centers) {
        const auto bin = std::min<std::size_t>(n - 1, static_cast<std::size_t>(c[d] * static_cast<double>(n)));
        ++hits[bin];
      }
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("latin hypercube respects non-unit ranges and is deterministic") {
  const std::vector<ParameterDescriptor> d{{"a", -5, 15}, {"b", 100, 101}};
  const auto x = latin_hypercube(d, 20, 7);
  CHECK(x == latin_hypercube(d, 20, 7));
  CHECK(x != latin_hypercube(d, 20, 8));
  for (const auto& v : x) CHECK(within_ranges(v, d));
  CHECK_THROWS(latin_hypercube(d, 0, 7));
}

TEST_CASE("mid-range star branches") {
  const auto points = star_branches(ParameterVector{{0.5, 0.5}}, kUnitSquare, 0.25);
  CHECK(points.size() == 8);
  const auto v = branch_values(points, 0);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == Approx(0.0));
  CHECK(v[1] == Approx(0.25));
  CHECK(v[2] == Approx(0.75));
  CHECK(v[3] == Approx(1.0));
  for (const auto& p : points) {
    CHECK(p.step_offset != 0);
    CHECK(p.vector[1 - p.param] == 0.5);
  }
}

TEST_CASE("branches are clipped at the range boundary") {
  const std::vector<ParameterDescriptor> one{{"p", 0, 1}};
  const auto v = branch_values(star_branches(ParameterVector{{0.1}}, one, 0.25), 0);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == Approx(0.35));
  CHECK(v[1] == Approx(0.6));
  CHECK(v[2] == Approx(0.85));

  const auto half = branch_values(star_branches(ParameterVector{{0.5}}, one, 0.5), 0);
  REQUIRE(half.size() == 2);
  CHECK(half[0] == Approx(0.0));
  CHECK(half[1] == Approx(1.0));
}

TEST_CASE("max_steps limits each direction") {
  const std::vector<ParameterDescriptor> one{{"p", 0, 1}};
  const auto points = star_branches(ParameterVector{{0.5}}, one, 0.1, 2);
  std::vector<int> offsets;
  for (const auto& p : points) offsets.push_back(p.step_offset);
  CHECK(offsets == std::vector<int>{-2, -1, 1, 2});
}

TEST_CASE("invalid step widths are rejected") {
  CHECK_THROWS(star_branches(ParameterVector{{0.5, 0.5}}, kUnitSquare, 0.0));
  CHECK_THROWS(star_branches(ParameterVector{{0.5, 0.5}}, kUnitSquare, 0.6));
  CHECK_THROWS(star_branches(ParameterVector{{1.5, 0.5}}, kUnitSquare, 0.1));
}

TEST_CASE("plan around a mid-range center has nine samples") {
  const std::vector<ParameterVector> centers{ParameterVector{{0.5, 0.5}}};
  const auto plan = build_plan_from_centers(kUnitSquare, centers, 0.25);
  CHECK(plan.samples.size() == 9);
  CHECK_NOTHROW(validate_plan(plan));
}

TEST_CASE("plan sample count matches an independent enumeration") {
  for (const double w : {0.1, 0.25, 0.5}) {
    for (const std::size_t n : {1u, 2u, 10u}) {
      const auto plan = build_plan(kUnitSquare, n, w, 5);
      std::size_t expected = 0;
      for (std::size_t s = 0; s < n; ++s) {
        const auto& c = plan.samples[plan.center_of(s)].vector;
        expected += 1 + expected_branch_points(c[0], kUnitSquare[0], w) + expected_branch_points(c[1], kUnitSquare[1], w);
      }
      CHECK(plan.samples.size() == expected);
      CHECK(plan.samples.size() <= n * (1 + 2 * static_cast<std::size_t>(std::floor(2.0 / w))));
    }
  }
  CHECK_THROWS(build_plan(kUnitSquare, 0, 0.1, 1));
}

TEST_CASE("every branch sample differs from its center in exactly one parameter") {
  const std::vector<ParameterDescriptor> d{{"a", 0, 1}, {"b", -2, 2}, {"c", 10, 30}};
  const auto plan = build_plan(d, 6, 0.15, 77);
  for (const auto& s : plan.samples) {
    const auto& c = plan.samples[plan.center_of(s.star_id)].vector;
    if (s.is_center()) {
      CHECK(s.step_offset == 0);
      continue;
    }
    const auto p = *s.branch_param;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (k == p) {
        const double expect = std::clamp(c[k] + s.step_offset * 0.15 * d[k].range(), d[k].min, d[k].max);
        CHECK(s.vector[k] == Approx(expect).epsilon(1e-12));
      } else {
        CHECK(s.vector[k] == c[k]);
      }
    }
  }
  for (std::size_t star = 0; star < plan.star_count; ++star) {
    for (std::size_t p = 0; p < d.size(); ++p) {
      const auto members = plan.branch(star, p);
      for (std::size_t i = 1; i < members.size(); ++i) {
        CHECK(plan.samples[members[i]].vector[p] > plan.samples[members[i - 1]].vector[p]);
      }
      CHECK(plan.at_offset(star, p, 0) == plan.center_of(star));
    }
  }
}

TEST_CASE("plan file round trip") {
  const std::vector<ParameterDescriptor> d{{"alpha", 0.1, 0.9}, {"beta", 3, 4}};
  const auto plan = build_plan(d, 4, 0.2, 1234);
  std::stringstream s;
  write_plan_csv(s, plan);
  const auto back = read_plan_csv(s);
  CHECK(back.seed == plan.seed);
  CHECK(back.step == plan.step);
  CHECK(back.star_count == plan.star_count);
  REQUIRE(back.samples.size() == plan.samples.size());
  for (std::size_t i = 0; i < plan.samples.size(); ++i) {
    CHECK(back.samples[i].vector == plan.samples[i].vector);
    CHECK(back.samples[i].branch_param == plan.samples[i].branch_param);
    CHECK(back.samples[i].step_offset == plan.samples[i].step_offset);
  }
}

TEST_CASE("plan files with broken invariants are rejected") {
  const auto plan = build_plan(kUnitSquare, 2, 0.25, 1);
  std::stringstream s;
  write_plan_csv(s, plan);
  std::string text = s.str();
  // move a branch sample off its star's center value
  const auto pos = text.find("\n1,0,");
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos + 1);
  const std::string line = text.substr(pos + 1, end - pos - 1);
  const std::string bad = line.substr(0, line.rfind(',')) + ",0.123456";
  text.replace(pos + 1, line.size(), bad);
  std::istringstream in(text);
  CHECK_THROWS_AS(read_plan_csv(in), std::invalid_argument);
}
