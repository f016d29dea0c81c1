#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace paramsens {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> frequencies;  // normalized by value count
  bool empty_source = false;        // built from zero values; all frequencies 0

  std::size_t bin_count() const { return frequencies.size(); }
  bool same_binning(const Histogram& o) const {
    return lo == o.lo && hi == o.hi && bin_count() == o.bin_count();
  }
};

/// Equal-width bins over [lo, hi]; a value equal to hi lands in the last
/// bin, values outside the range are clamped into the end bins.
Histogram build_histogram(std::span<const double> values, std::size_t bin_count, double lo, double hi);

/// Global [lo, hi] for a set of value lists. Degenerate spans are widened to
/// a unit interval centred on the value.
std::pair<double, double> common_range(std::span<const std::vector<double>> value_lists);

enum class DistributionMeasure { Euclidean, JensenShannon };

std::string_view measure_name(DistributionMeasure m);

/// ||h1 - h2||_2 / sqrt(2); 1 for disjoint unit-mass histograms.
double hist_euclidean(const Histogram& h1, const Histogram& h2);

/// Square root of the base-2 Jensen-Shannon divergence, in [0, 1].
double jensen_shannon(const Histogram& h1, const Histogram& h2);

double distribution_difference(DistributionMeasure m, const Histogram& h1, const Histogram& h2);

/// Per bin, the mean absolute frequency difference between the first
/// histogram (star center) and each of the others (branch neighbours).
std::vector<double> per_bin_variation(std::span<const Histogram> center_then_neighbours);

}  // namespace paramsens
