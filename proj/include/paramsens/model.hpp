#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paramsens/geometry.hpp"

namespace paramsens {

// Parameters ---------------------------------------------------------------

struct ParameterDescriptor {
  std::string name;
  double min = 0.0;
  double max = 1.0;

  double range() const { return max - min; }
  bool contains(double v) const { return v >= min && v <= max; }
};

/// Throws std::invalid_argument on an empty list, min >= max, or duplicate names.
void validate_descriptors(std::span<const ParameterDescriptor> descriptors);

std::optional<std::size_t> find_parameter(std::span<const ParameterDescriptor> descriptors,
                                          std::string_view name);

/// One point in parameter space, ordered like the study's descriptors.
struct ParameterVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

bool within_ranges(const ParameterVector& v, std::span<const ParameterDescriptor> descriptors);

// Characteristics ----------------------------------------------------------

enum class Characteristic {
  StraightLength,
  CurvedLength,
  Diameter,
  Volume,
  SurfaceArea,
  OrientationPhi,
  OrientationTheta,
};

inline constexpr std::size_t kCharacteristicCount = 7;

inline constexpr std::array<Characteristic, kCharacteristicCount> kCharacteristics = {
    Characteristic::StraightLength, Characteristic::CurvedLength,   Characteristic::Diameter,
    Characteristic::Volume,         Characteristic::SurfaceArea,    Characteristic::OrientationPhi,
    Characteristic::OrientationTheta,
};

std::string_view characteristic_name(Characteristic c);
std::string_view characteristic_units(Characteristic c);
std::optional<Characteristic> parse_characteristic(std::string_view name);
constexpr std::size_t index_of(Characteristic c) { return static_cast<std::size_t>(c); }

using CharacteristicValues = std::array<double, kCharacteristicCount>;

// Fibers -------------------------------------------------------------------

/// A tube of constant radius around a polyline.
struct Fiber {
  int id = 0;
  std::vector<Vec3> vertices;
  double radius = 1.0;
};

/// Throws std::invalid_argument when the fiber has fewer than two vertices,
/// repeated consecutive vertices, or a non-positive radius.
void validate_fiber(const Fiber& fiber);

double curved_length(const Fiber& fiber);

/// StraightLength, CurvedLength, Diameter, Volume, SurfaceArea and the
/// end-to-end axis orientation. The axis is unsigned: it is flipped into the
/// upper hemisphere, so Theta is in [0, 90] degrees and Phi in (-180, 180].
CharacteristicValues derive_characteristics(const Fiber& fiber);

/// Vertex extents inflated by the radius on all sides.
Box3 bounding_box(const Fiber& fiber);

/// All fibers output by one algorithm run.
struct FiberResult {
  int result_id = 0;
  std::vector<Fiber> fibers;
  std::vector<CharacteristicValues> characteristics;  // one row per fiber

  /// Validates every fiber and derives its characteristics.
  static FiberResult from_fibers(int result_id, std::vector<Fiber> fibers);

  const Fiber* find_fiber(int fiber_id) const;
  std::vector<double> column(Characteristic c) const;
};

// Long-format fiber file: fiber_id,vertex_index,x,y,z,radius
inline constexpr std::string_view kFiberCsvHeader = "fiber_id,vertex_index,x,y,z,radius";

void write_fiber_csv(std::ostream& out, const FiberResult& result);
void write_fiber_csv(const std::filesystem::path& path, const FiberResult& result);
FiberResult read_fiber_csv(std::istream& in, int result_id);
FiberResult read_fiber_csv(const std::filesystem::path& path, int result_id);

/// %.17g rendering used by every text format.
std::string format_real(double v);

}  // namespace paramsens
