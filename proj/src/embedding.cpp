#include "paramsens/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace paramsens {

namespace {

void validate_distances(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw std::invalid_argument("mds: distance matrix must be square");
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw std::invalid_argument("mds: diagonal must be zero");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) throw std::invalid_argument("mds: distances must be finite and >= 0");
      if (std::abs(d(i, j) - d(j, i)) > 1e-12 * scale) throw std::invalid_argument("mds: matrix must be symmetric");
    }
  }
}

}  // namespace

double kruskal_stress(const Eigen::MatrixXd& distances, const std::vector<std::array<double, 2>>& coordinates) {
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < distances.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < distances.cols(); ++j) {
      const double du = coordinates[i][0] - coordinates[j][0];
      const double dv = coordinates[i][1] - coordinates[j][1];
      const double diff = std::sqrt(du * du + dv * dv) - distances(i, j);
      num += diff * diff;
      den += distances(i, j) * distances(i, j);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

Embedding2D mds(const Eigen::MatrixXd& distances) {
  validate_distances(distances);
  const Eigen::Index n = distances.rows();
  Embedding2D out;
  out.coordinates.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  if (n < 3) {
    out.degenerate = true;
    if (n == 2) out.coordinates = {{0.5 * distances(0, 1), 0.0}, {-0.5 * distances(0, 1), 0.0}};
    out.stress = kruskal_stress(distances, out.coordinates);
    return out;
  }

  const Eigen::MatrixXd squared = distances.array().square().matrix();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd gram = -0.5 * centering * squared * centering;
  gram = 0.5 * (gram + gram.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw std::runtime_error("mds: eigen decomposition failed");
  // eigenvalues ascending: the top two are the last columns
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index col = n - 1 - axis;
    const double lambda = std::max(0.0, solver.eigenvalues()(col));
    Eigen::VectorXd coord = solver.eigenvectors().col(col) * std::sqrt(lambda);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(coord(i)) > 1e-12) {
        if (coord(i) < 0.0) coord = -coord;
        break;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) out.coordinates[static_cast<std::size_t>(i)][axis] = coord(i);
  }
  out.stress = kruskal_stress(distances, out.coordinates);
  return out;
}

}  // namespace paramsens
