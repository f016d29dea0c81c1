#include "paramsens/spatial.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "paramsens/kernels.hpp"
#include "text_util.hpp"

namespace paramsens {

void validate_grid(const GridGeometry& g) {
  for (int a = 0; a < 3; ++a) {
    if (g.dims[a] < 1) throw std::invalid_argument("grid dims must be >= 1");
    if (!(g.spacing[a] > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
  }
}

GridGeometry grid_covering(const Box3& box, std::array<int, 3> dims) {
  if (box.empty()) throw std::invalid_argument("grid_covering: empty box");
  GridGeometry g;
  g.dims = dims;
  g.origin = box.lo;
  for (int a = 0; a < 3; ++a) {
    const double extent = box.hi[a] - box.lo[a];
    g.spacing[a] = extent > 0.0 ? extent / dims[a] : 1.0;
  }
  validate_grid(g);
  return g;
}

Box3 study_bounds(std::span<const FiberResult> results) {
  Box3 box;
  for (const auto& r : results) {
    for (const auto& f : r.fibers) box.expand(bounding_box(f));
  }
  return box;
}

VoxelGrid voxelize(const FiberResult& result, const GridGeometry& geometry) {
  validate_grid(geometry);
  std::vector<std::uint32_t> counts(geometry.voxel_count(), 0);
  kernels::accumulate_coverage(PreparedResult::from(result), geometry, counts);
  return {geometry, std::vector<double>(counts.begin(), counts.end())};
}

VoxelGrid occupation_ratio(std::span<const FiberResult> results, const GridGeometry& geometry, int workers) {
  validate_grid(geometry);
  if (results.empty()) throw std::invalid_argument("occupation_ratio needs at least one result");
  std::vector<PreparedResult> prepared;
  prepared.reserve(results.size());
  for (const auto& r : results) prepared.push_back(PreparedResult::from(r));
  const auto counts = kernels::coverage_counts_omp(prepared, geometry, workers);
  VoxelGrid out{geometry, std::vector<double>(counts.size())};
  const double n = static_cast<double>(results.size());
  for (std::size_t v = 0; v < counts.size(); ++v) out.values[v] = counts[v] / n;
  return out;
}

std::vector<std::vector<double>> slice(const VoxelGrid& grid, int axis, int index) {
  const auto& d = grid.geometry.dims;
  if (axis < 0 || axis > 2) throw std::out_of_range("slice axis must be 0, 1 or 2");
  if (index < 0 || index >= d[axis]) throw std::out_of_range("slice index out of range");
  std::vector<std::vector<double>> out;
  if (axis == 0) {
    out.assign(d[1], std::vector<double>(d[2]));
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) out[j][k] = grid.at(index, j, k);
  } else if (axis == 1) {
    out.assign(d[0], std::vector<double>(d[2]));
    for (int i = 0; i < d[0]; ++i)
      for (int k = 0; k < d[2]; ++k) out[i][k] = grid.at(i, index, k);
  } else {
    out.assign(d[1], std::vector<double>(d[0]));
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i) out[j][i] = grid.at(i, j, index);
  }
  return out;
}

namespace {

std::filesystem::path header_path(const std::filesystem::path& raw) {
  auto p = raw;
  p += ".hdr";
  return p;
}

}  // namespace

void write_volume(const std::filesystem::path& raw_path, const VoxelGrid& grid) {
  std::ofstream raw(raw_path, std::ios::binary);
  if (!raw) throw std::runtime_error("cannot write " + raw_path.string());
  for (double v : grid.values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                           static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    raw.write(bytes, 4);
  }
  const auto& g = grid.geometry;
  std::ofstream hdr(header_path(raw_path), std::ios::binary);
  hdr << "dims=" << g.dims[0] << ' ' << g.dims[1] << ' ' << g.dims[2] << '\n'
      << "origin=" << format_real(g.origin.x) << ' ' << format_real(g.origin.y) << ' ' << format_real(g.origin.z) << '\n'
      << "spacing=" << format_real(g.spacing.x) << ' ' << format_real(g.spacing.y) << ' ' << format_real(g.spacing.z)
      << '\n'
      << "order=x-fastest\n"
      << "dtype=f32le\n";
}

VoxelGrid read_volume(const std::filesystem::path& raw_path) {
  std::ifstream hdr(header_path(raw_path));
  if (!hdr) throw std::runtime_error("cannot read " + header_path(raw_path).string());
  VoxelGrid grid;
  std::string line;
  while (std::getline(hdr, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = line.substr(0, eq);
    std::istringstream values(line.substr(eq + 1));
    if (key == "dims") {
      values >> grid.geometry.dims[0] >> grid.geometry.dims[1] >> grid.geometry.dims[2];
    } else if (key == "origin") {
      values >> grid.geometry.origin.x >> grid.geometry.origin.y >> grid.geometry.origin.z;
    } else if (key == "spacing") {
      values >> grid.geometry.spacing.x >> grid.geometry.spacing.y >> grid.geometry.spacing.z;
    } else if ((key == "order" && detail::trim(line.substr(eq + 1)) != "x-fastest") ||
               (key == "dtype" && detail::trim(line.substr(eq + 1)) != "f32le")) {
      throw std::runtime_error("unsupported volume layout: " + line);
    }
  }
  validate_grid(grid.geometry);
  std::ifstream raw(raw_path, std::ios::binary);
  grid.values.resize(grid.geometry.voxel_count());
  for (auto& v : grid.values) {
    unsigned char b[4];
    if (!raw.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("volume file too short");
    const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    v = std::bit_cast<float>(bits);
  }
  return grid;
}

}  // namespace paramsens
