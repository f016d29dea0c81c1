#pragma once

// Data-parallel preprocessing kernels. Each has a serial reference version
// kept for testing and an OpenMP version used by the pipeline; both produce
// bit-identical output.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "paramsens/fiber_dissimilarity.hpp"
#include "paramsens/spatial.hpp"

namespace paramsens::kernels {

/// D(i, j) = result_dissimilarity(results[i], results[j]) for all ordered pairs.
Eigen::MatrixXd dissimilarity_matrix_serial(std::span<const PreparedResult> results, const TubeSampler& sampler);
Eigen::MatrixXd dissimilarity_matrix_omp(std::span<const PreparedResult> results, const TubeSampler& sampler,
                                         int workers = 0);

/// Adds, for every fiber of `result`, one count to each voxel whose center lies in the tube.
void accumulate_coverage(const PreparedResult& result, const GridGeometry& geometry, std::vector<std::uint32_t>& counts);

/// Coverage counts summed over all results.
std::vector<std::uint32_t> coverage_counts_serial(std::span<const PreparedResult> results, const GridGeometry& geometry);
std::vector<std::uint32_t> coverage_counts_omp(std::span<const PreparedResult> results, const GridGeometry& geometry,
                                               int workers = 0);

int resolve_workers(int workers);

}  // namespace paramsens::kernels
