#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace paramsens {

struct Embedding2D {
  std::vector<std::array<double, 2>> coordinates;  // one per input row
  double stress = 0.0;                             // Kruskal stress-1
  bool degenerate = false;                         // fewer than three points
};

/// Classical MDS into two dimensions: double centering of the squared
/// distances, top two eigenpairs, negative eigenvalues truncated to zero.
/// Axis signs are fixed so that the first point with a non-zero coordinate
/// on an axis has it positive. Throws std::invalid_argument unless the
/// matrix is square, symmetric, non-negative with a zero diagonal.
Embedding2D mds(const Eigen::MatrixXd& distances);

double kruskal_stress(const Eigen::MatrixXd& distances, const std::vector<std::array<double, 2>>& coordinates);

}  // namespace paramsens
