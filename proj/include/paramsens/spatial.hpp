#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "paramsens/model.hpp"

namespace paramsens {

struct GridGeometry {
  std::array<int, 3> dims{64, 64, 64};
  Vec3 origin;
  Vec3 spacing{1.0, 1.0, 1.0};

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  }
  /// x-fastest linear index
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + static_cast<std::size_t>(j)) * dims[0] + static_cast<std::size_t>(i);
  }
  Vec3 center(int i, int j, int k) const {
    return {origin.x + (i + 0.5) * spacing.x, origin.y + (j + 0.5) * spacing.y, origin.z + (k + 0.5) * spacing.z};
  }
  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

void validate_grid(const GridGeometry& g);

/// Grid of `dims` voxels exactly covering `box`.
GridGeometry grid_covering(const Box3& box, std::array<int, 3> dims = {64, 64, 64});

/// Union of all fiber bounding boxes over all results.
Box3 study_bounds(std::span<const FiberResult> results);

struct VoxelGrid {
  GridGeometry geometry;
  std::vector<double> values;  // x-fastest

  double at(int i, int j, int k) const { return values[geometry.index(i, j, k)]; }
};

/// Per voxel, the number of the result's fibers whose tube contains the voxel center.
VoxelGrid voxelize(const FiberResult& result, const GridGeometry& geometry);

/// Sum of per-result coverage counts divided by the result count. Requires
/// at least one result. workers <= 0 uses all hardware threads.
VoxelGrid occupation_ratio(std::span<const FiberResult> results, const GridGeometry& geometry, int workers = 0);

/// Axis-aligned slice as rows of the two remaining axes (axis 0: rows j, cols k;
/// axis 1: rows i, cols k; axis 2: rows j, cols i).
std::vector<std::vector<double>> slice(const VoxelGrid& grid, int axis, int index);

/// Raw 32-bit little-endian floats, x-fastest, plus a text header alongside
/// (`<raw>.hdr`) listing dims, origin, spacing, order and dtype.
void write_volume(const std::filesystem::path& raw_path, const VoxelGrid& grid);
VoxelGrid read_volume(const std::filesystem::path& raw_path);

}  // namespace paramsens
