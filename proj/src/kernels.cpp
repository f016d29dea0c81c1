#include "paramsens/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <thread>

namespace paramsens::kernels {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

namespace {

// One row of the matrix: every fiber of `a` is sampled once and matched
// against each result.
void dissimilarity_row(std::span<const PreparedResult> results, std::size_t row, const TubeSampler& sampler,
                       Eigen::MatrixXd& out) {
  const auto& a = results[row];
  std::vector<std::vector<Vec3>> points(a.fibers.size());
  for (std::size_t f = 0; f < a.fibers.size(); ++f) sampler.sample(a.fibers[f], points[f]);
  std::vector<std::size_t> scratch;
  for (std::size_t col = 0; col < results.size(); ++col) {
    const auto& b = results[col];
    if (a.fibers.empty()) {
      out(row, col) = b.fibers.empty() ? 0.0 : 1.0;
      continue;
    }
    double sum = 0.0;
    for (std::size_t f = 0; f < a.fibers.size(); ++f) sum += best_match(a.fibers[f], points[f], b, scratch).s;
    out(row, col) = sum / static_cast<double>(a.fibers.size());
  }
}

}  // namespace

Eigen::MatrixXd dissimilarity_matrix_serial(std::span<const PreparedResult> results, const TubeSampler& sampler) {
  const auto n = static_cast<Eigen::Index>(results.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t row = 0; row < results.size(); ++row) dissimilarity_row(results, row, sampler, out);
  return out;
}

Eigen::MatrixXd dissimilarity_matrix_omp(std::span<const PreparedResult> results, const TubeSampler& sampler,
                                         int workers) {
  const auto n = static_cast<Eigen::Index>(results.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const long rows = static_cast<long>(results.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (long row = 0; row < rows; ++row) {
    dissimilarity_row(results, static_cast<std::size_t>(row), sampler, out);
  }
  return out;
}

void accumulate_coverage(const PreparedResult& result, const GridGeometry& g, std::vector<std::uint32_t>& counts) {
  auto range = [&](double lo, double hi, int axis) {
    const double o = g.origin[axis];
    const double s = g.spacing[axis];
    const int first = std::max(0, static_cast<int>(std::ceil((lo - o) / s - 0.5)));
    const int last = std::min(g.dims[axis] - 1, static_cast<int>(std::floor((hi - o) / s - 0.5)));
    return std::pair{first, last};
  };
  for (const auto& fiber : result.fibers) {
    const auto [i0, i1] = range(fiber.box.lo.x, fiber.box.hi.x, 0);
    const auto [j0, j1] = range(fiber.box.lo.y, fiber.box.hi.y, 1);
    const auto [k0, k1] = range(fiber.box.lo.z, fiber.box.hi.z, 2);
    for (int k = k0; k <= k1; ++k) {
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          if (fiber.contains(g.center(i, j, k))) ++counts[g.index(i, j, k)];
        }
      }
    }
  }
}

std::vector<std::uint32_t> coverage_counts_serial(std::span<const PreparedResult> results, const GridGeometry& geometry) {
  std::vector<std::uint32_t> counts(geometry.voxel_count(), 0);
  for (const auto& r : results) accumulate_coverage(r, geometry, counts);
  return counts;
}

std::vector<std::uint32_t> coverage_counts_omp(std::span<const PreparedResult> results, const GridGeometry& geometry,
                                               int workers) {
  std::vector<std::uint32_t> total(geometry.voxel_count(), 0);
  const long n = static_cast<long>(results.size());
#pragma omp parallel num_threads(resolve_workers(workers))
  {
    std::vector<std::uint32_t> local(geometry.voxel_count(), 0);
#pragma omp for schedule(dynamic, 1) nowait
    for (long r = 0; r < n; ++r) accumulate_coverage(results[static_cast<std::size_t>(r)], geometry, local);
    // integer sums are order independent
#pragma omp critical
    for (std::size_t v = 0; v < total.size(); ++v) total[v] += local[v];
  }
  return total;
}

}  // namespace paramsens::kernels
