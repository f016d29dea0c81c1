#include "paramsens/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "text_util.hpp"

namespace paramsens {

void validate_descriptors(std::span<const ParameterDescriptor> descriptors) {
  if (descriptors.empty()) throw std::invalid_argument("at least one parameter is required");
  std::set<std::string> names;
  for (const auto& d : descriptors) {
    if (d.name.empty()) throw std::invalid_argument("parameter name must not be empty");
    if (!(d.min < d.max) || !std::isfinite(d.min) || !std::isfinite(d.max)) {
      throw std::invalid_argument("parameter '" + d.name + "': min must be < max");
    }
    if (!names.insert(d.name).second) {
      throw std::invalid_argument("duplicate parameter name '" + d.name + "'");
    }
  }
}

std::optional<std::size_t> find_parameter(std::span<const ParameterDescriptor> descriptors,
                                          std::string_view name) {
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    if (descriptors[i].name == name) return i;
  }
  return std::nullopt;
}

bool within_ranges(const ParameterVector& v, std::span<const ParameterDescriptor> descriptors) {
  if (v.size() != descriptors.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!descriptors[i].contains(v[i])) return false;
  }
  return true;
}

std::string_view characteristic_name(Characteristic c) {
  switch (c) {
    case Characteristic::StraightLength: return "StraightLength";
    case Characteristic::CurvedLength: return "CurvedLength";
    case Characteristic::Diameter: return "Diameter";
    case Characteristic::Volume: return "Volume";
    case Characteristic::SurfaceArea: return "SurfaceArea";
    case Characteristic::OrientationPhi: return "OrientationPhi";
    case Characteristic::OrientationTheta: return "OrientationTheta";
  }
  return "?";
}

std::string_view characteristic_units(Characteristic c) {
  switch (c) {
    case Characteristic::OrientationPhi:
    case Characteristic::OrientationTheta: return "degrees";
    case Characteristic::Volume: return "world units^3";
    case Characteristic::SurfaceArea: return "world units^2";
    default: return "world units";
  }
}

std::optional<Characteristic> parse_characteristic(std::string_view name) {
  for (auto c : kCharacteristics) {
    if (characteristic_name(c) == name) return c;
  }
  return std::nullopt;
}

void validate_fiber(const Fiber& fiber) {
  const std::string tag = "fiber " + std::to_string(fiber.id);
  if (fiber.vertices.size() < 2) throw std::invalid_argument(tag + ": needs at least two vertices");
  if (!(fiber.radius > 0.0) || !std::isfinite(fiber.radius)) {
    throw std::invalid_argument(tag + ": radius must be positive");
  }
  for (std::size_t i = 0; i < fiber.vertices.size(); ++i) {
    const auto& v = fiber.vertices[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw std::invalid_argument(tag + ": non-finite vertex");
    }
    if (i > 0 && v == fiber.vertices[i - 1]) {
      throw std::invalid_argument(tag + ": repeated consecutive vertex (degenerate fiber)");
    }
  }
}

double curved_length(const Fiber& fiber) {
  double len = 0.0;
  for (std::size_t i = 1; i < fiber.vertices.size(); ++i) {
    len += norm(fiber.vertices[i] - fiber.vertices[i - 1]);
  }
  return len;
}

CharacteristicValues derive_characteristics(const Fiber& fiber) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kDeg = 180.0 / kPi;

  Vec3 axis = fiber.vertices.back() - fiber.vertices.front();
  const double straight = norm(axis);
  const double curved = curved_length(fiber);
  const double r = fiber.radius;

  // fold the unsigned axis into the upper hemisphere
  if (axis.z < 0.0 || (axis.z == 0.0 && (axis.y < 0.0 || (axis.y == 0.0 && axis.x < 0.0)))) {
    axis = axis * -1.0;
  }
  double theta = 0.0;
  double phi = 0.0;
  if (straight > 0.0) {
    theta = std::acos(std::clamp(axis.z / straight, -1.0, 1.0)) * kDeg;
    phi = (axis.x == 0.0 && axis.y == 0.0) ? 0.0 : std::atan2(axis.y, axis.x) * kDeg;
  }

  CharacteristicValues out{};
  out[index_of(Characteristic::StraightLength)] = straight;
  out[index_of(Characteristic::CurvedLength)] = curved;
  out[index_of(Characteristic::Diameter)] = 2.0 * r;
  out[index_of(Characteristic::Volume)] = kPi * r * r * curved;
  out[index_of(Characteristic::SurfaceArea)] = 2.0 * kPi * r * curved;
  out[index_of(Characteristic::OrientationPhi)] = phi;
  out[index_of(Characteristic::OrientationTheta)] = theta;
  return out;
}

Box3 bounding_box(const Fiber& fiber) {
  Box3 box;
  for (const auto& v : fiber.vertices) box.expand(v);
  return box.inflated(fiber.radius);
}

FiberResult FiberResult::from_fibers(int result_id, std::vector<Fiber> fibers) {
  FiberResult result;
  result.result_id = result_id;
  result.characteristics.reserve(fibers.size());
  std::set<int> ids;
  for (const auto& f : fibers) {
    validate_fiber(f);
    if (!ids.insert(f.id).second) {
      throw std::invalid_argument("duplicate fiber id " + std::to_string(f.id));
    }
    result.characteristics.push_back(derive_characteristics(f));
  }
  result.fibers = std::move(fibers);
  return result;
}

const Fiber* FiberResult::find_fiber(int fiber_id) const {
  for (const auto& f : fibers) {
    if (f.id == fiber_id) return &f;
  }
  return nullptr;
}

std::vector<double> FiberResult::column(Characteristic c) const {
  std::vector<double> out;
  out.reserve(characteristics.size());
  for (const auto& row : characteristics) out.push_back(row[index_of(c)]);
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_fiber_csv(std::ostream& out, const FiberResult& result) {
  out << kFiberCsvHeader << '\n';
  for (const auto& f : result.fibers) {
    for (std::size_t i = 0; i < f.vertices.size(); ++i) {
      const auto& v = f.vertices[i];
      out << f.id << ',' << i << ',' << format_real(v.x) << ',' << format_real(v.y) << ','
          << format_real(v.z) << ',' << format_real(f.radius) << '\n';
    }
  }
}

void write_fiber_csv(const std::filesystem::path& path, const FiberResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_fiber_csv(out, result);
}

FiberResult read_fiber_csv(std::istream& in, int result_id) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kFiberCsvHeader) {
    throw std::invalid_argument("fiber file: expected header '" + std::string(kFiberCsvHeader) + "'");
  }
  std::vector<Fiber> fibers;
  std::set<int> finished;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split(trimmed, ',');
    const std::string where = "fiber file line " + std::to_string(line_no);
    if (fields.size() != 6) throw std::invalid_argument(where + ": expected 6 fields");
    const int id = detail::parse_int(fields[0], where);
    const int vertex = detail::parse_int(fields[1], where);
    const Vec3 p{detail::parse_real(fields[2], where), detail::parse_real(fields[3], where),
                 detail::parse_real(fields[4], where)};
    const double radius = detail::parse_real(fields[5], where);

    if (fibers.empty() || fibers.back().id != id) {
      if (!fibers.empty()) finished.insert(fibers.back().id);
      if (finished.count(id)) throw std::invalid_argument(where + ": vertices of a fiber must be contiguous");
      if (vertex != 0) throw std::invalid_argument(where + ": vertex_index must start at 0");
      fibers.push_back(Fiber{id, {p}, radius});
      continue;
    }
    auto& f = fibers.back();
    if (vertex != static_cast<int>(f.vertices.size())) {
      throw std::invalid_argument(where + ": vertex_index out of order");
    }
    if (radius != f.radius) throw std::invalid_argument(where + ": radius must be constant per fiber");
    f.vertices.push_back(p);
  }
  return FiberResult::from_fibers(result_id, std::move(fibers));
}

FiberResult read_fiber_csv(const std::filesystem::path& path, int result_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_fiber_csv(in, result_id);
}

}  // namespace paramsens
