#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "paramsens/histogram.hpp"

using namespace paramsens;
using doctest::Approx;

namespace {

Histogram hist(std::vector<double> f) { return Histogram{0.0, 1.0, std::move(f), false}; }

// Direct-formula Jensen-Shannon distance, base 2.
double jsd_reference(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) d += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) d += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::sqrt(std::max(0.0, d));
}

Histogram random_hist(std::mt19937_64& rng, std::size_t bins) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> f(bins);
  double sum = 0;
  for (auto& x : f) {
    x = u(rng) < 0.25 ? 0.0 : u(rng);
    sum += x;
  }
  if (sum == 0) {
    f[0] = 1;
    sum = 1;
  }
  for (auto& x : f) x /= sum;
  return hist(f);
}

}  // namespace

TEST_CASE("histogram counts") {
  const std::vector<double> v{1, 1, 3};
  const auto h = build_histogram(v, 2, 0, 4);
  CHECK(h.frequencies[0] == Approx(2.0 / 3));
  CHECK(h.frequencies[1] == Approx(1.0 / 3));

  const std::vector<double> at_hi{4};
  CHECK(build_histogram(at_hi, 2, 0, 4).frequencies[1] == 1.0);

  std::vector<double> shuffled{3, 1, 1};
  CHECK(build_histogram(shuffled, 2, 0, 4).frequencies == h.frequencies);
}

TEST_CASE("empty input gives a flagged zero histogram") {
  const auto h = build_histogram(std::vector<double>{}, 5, 0, 1);
  CHECK(h.empty_source);
  CHECK(std::all_of(h.frequencies.begin(), h.frequencies.end(), [](double f) { return f == 0.0; }));
  CHECK_THROWS(build_histogram(std::vector<double>{1}, 1, 0, 1));
}

TEST_CASE("common range over lists") {
  const std::vector<std::vector<double>> lists{{1, 5}, {-2}, {}};
  const auto [lo, hi] = common_range(lists);
  CHECK(lo == -2);
  CHECK(hi == 5);
  const std::vector<std::vector<double>> flat{{3, 3}, {3}};
  const auto [flo, fhi] = common_range(flat);
  CHECK(flo < 3);
  CHECK(fhi > 3);
}

TEST_CASE("euclidean distance") {
  CHECK(hist_euclidean(hist({0.3, 0.7}), hist({0.3, 0.7})) == 0.0);
  CHECK(hist_euclidean(hist({1, 0}), hist({0, 1})) == Approx(1.0));
  CHECK_THROWS(hist_euclidean(hist({1, 0}), hist({1, 0, 0})));
}

TEST_CASE("jensen-shannon reference values") {
  CHECK(jensen_shannon(hist({0.5, 0.5}), hist({0.5, 0.5})) == 0.0);
  CHECK(jensen_shannon(hist({1, 0}), hist({0, 1})) == Approx(1.0));
  CHECK(jensen_shannon(hist({0.5, 0.5}), hist({1, 0})) == Approx(jsd_reference({0.5, 0.5}, {1, 0})).epsilon(1e-12));
  CHECK(jensen_shannon(hist({0.5, 0.5}), hist({1, 0})) == Approx(0.5579).epsilon(1e-4));
  Histogram shifted{0.0, 2.0, {0.5, 0.5}, false};
  CHECK_THROWS(jensen_shannon(hist({0.5, 0.5}), shifted));
}

TEST_CASE("jensen-shannon matches the direct formula on random histograms") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_hist(rng, 12), q = random_hist(rng, 12);
    CHECK(jensen_shannon(p, q) == Approx(jsd_reference(p.frequencies, q.frequencies)).epsilon(1e-10));
    CHECK(hist_euclidean(p, q) >= 0.0);
    CHECK(hist_euclidean(p, q) <= 1.0 + 1e-12);
  }
}

TEST_CASE("both measures are exactly symmetric") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_hist(rng, 17), q = random_hist(rng, 17);
    CHECK(jensen_shannon(p, q) == jensen_shannon(q, p));
    CHECK(hist_euclidean(p, q) == hist_euclidean(q, p));
  }
}

TEST_CASE("empty histograms compare as equal to each other") {
  const auto e = build_histogram(std::vector<double>{}, 4, 0, 1);
  CHECK(jensen_shannon(e, e) == 0.0);
  CHECK(hist_euclidean(e, e) == 0.0);
}

TEST_CASE("per-bin variation") {
  const std::vector<Histogram> same{hist({0.2, 0.8}), hist({0.2, 0.8}), hist({0.2, 0.8})};
  CHECK(per_bin_variation(same) == std::vector<double>{0.0, 0.0});

  const std::vector<Histogram> one{hist({1, 0}), hist({0, 1})};
  const auto v = per_bin_variation(one);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);

  const std::vector<Histogram> two{hist({1, 0}), hist({0, 1}), hist({1, 0})};
  const auto half = per_bin_variation(two);
  CHECK(half[0] == Approx(0.5));
  CHECK(half[1] == Approx(0.5));

  CHECK_THROWS(per_bin_variation(std::vector<Histogram>{hist({1, 0})}));
}
