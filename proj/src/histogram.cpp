#include "paramsens/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace paramsens {

Histogram build_histogram(std::span<const double> values, std::size_t bin_count, double lo, double hi) {
  if (bin_count < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  if (!(lo < hi)) throw std::invalid_argument("histogram range must satisfy lo < hi");
  Histogram h{lo, hi, std::vector<double>(bin_count, 0.0), values.empty()};
  if (values.empty()) return h;

  const double width = (hi - lo) / static_cast<double>(bin_count);
  for (double v : values) {
    const double pos = std::floor((v - lo) / width);
    const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bin_count - 1)));
    h.frequencies[bin] += 1.0;
  }
  const double n = static_cast<double>(values.size());
  for (auto& f : h.frequencies) f /= n;
  return h;
}

std::pair<double, double> common_range(std::span<const std::vector<double>> value_lists) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& list : value_lists) {
    for (double v : list) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

std::string_view measure_name(DistributionMeasure m) {
  return m == DistributionMeasure::Euclidean ? "euclidean" : "jensen_shannon";
}

namespace {

void require_same_binning(const Histogram& a, const Histogram& b) {
  if (!a.same_binning(b)) throw std::invalid_argument("histograms have different binning");
}

}  // namespace

double hist_euclidean(const Histogram& h1, const Histogram& h2) {
  require_same_binning(h1, h2);
  double sum = 0.0;
  for (std::size_t i = 0; i < h1.bin_count(); ++i) {
    const double d = h1.frequencies[i] - h2.frequencies[i];
    sum += d * d;
  }
  return std::min(1.0, std::sqrt(sum / 2.0));
}

double jensen_shannon(const Histogram& h1, const Histogram& h2) {
  require_same_binning(h1, h2);
  // 0.5*KL(P||M) + 0.5*KL(Q||M) with M = (P+Q)/2, 0*log 0 := 0
  double divergence = 0.0;
  for (std::size_t i = 0; i < h1.bin_count(); ++i) {
    const double p = h1.frequencies[i];
    const double q = h2.frequencies[i];
    const double m = 0.5 * (p + q);
    const double tp = p > 0.0 ? 0.5 * p * std::log2(p / m) : 0.0;
    const double tq = q > 0.0 ? 0.5 * q * std::log2(q / m) : 0.0;
    divergence += tp + tq;
  }
  return std::sqrt(std::clamp(divergence, 0.0, 1.0));
}

double distribution_difference(DistributionMeasure m, const Histogram& h1, const Histogram& h2) {
  return m == DistributionMeasure::Euclidean ? hist_euclidean(h1, h2) : jensen_shannon(h1, h2);
}

std::vector<double> per_bin_variation(std::span<const Histogram> center_then_neighbours) {
  if (center_then_neighbours.size() < 2) {
    throw std::invalid_argument("per_bin_variation needs the center and at least one neighbour");
  }
  const auto& center = center_then_neighbours.front();
  std::vector<double> out(center.bin_count(), 0.0);
  for (std::size_t k = 1; k < center_then_neighbours.size(); ++k) {
    const auto& h = center_then_neighbours[k];
    require_same_binning(center, h);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::abs(center.frequencies[i] - h.frequencies[i]);
  }
  const double n = static_cast<double>(center_then_neighbours.size() - 1);
  for (auto& v : out) v /= n;
  return out;
}

}  // namespace paramsens
