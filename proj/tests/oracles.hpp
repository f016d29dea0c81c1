#pragma once

#include <vector>

#include "paramsens/fiber_dissimilarity.hpp"
#include "paramsens/spatial.hpp"

namespace paramsens::testing {

/// Best match by scanning every fiber of the target, no box pruning.
inline BestMatch exhaustive_best_match(const PreparedFiber& f, const std::vector<Vec3>& points,
                                       const PreparedResult& target) {
  BestMatch best;
  bool any = false;
  for (const auto& candidate : target.fibers) {
    const double s = fiber_dissimilarity(f, points, candidate);
    if (!any || s < best.s || (s == best.s && candidate.id < *best.match)) {
      best = {candidate.id, s};
      any = true;
    }
  }
  if (!any || best.s >= 1.0) return {};
  return best;
}

/// Coverage counts by testing every voxel center against every fiber.
inline std::vector<double> brute_force_voxels(const FiberResult& result, const GridGeometry& g) {
  std::vector<double> out(g.voxel_count(), 0.0);
  for (const auto& fiber : result.fibers) {
    for (int k = 0; k < g.dims[2]; ++k) {
      for (int j = 0; j < g.dims[1]; ++j) {
        for (int i = 0; i < g.dims[0]; ++i) {
          const Vec3 c = g.center(i, j, k);
          bool inside = false;
          for (std::size_t v = 0; v + 1 < fiber.vertices.size(); ++v) {
            if (point_segment_distance_sq(c, fiber.vertices[v], fiber.vertices[v + 1]) <= fiber.radius * fiber.radius) {
              inside = true;
            }
          }
          if (inside) out[g.index(i, j, k)] += 1.0;
        }
      }
    }
  }
  return out;
}

}  // namespace paramsens::testing
