#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "paramsens/model.hpp"

namespace paramsens::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("paramsens-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Fiber straight(int id, Vec3 a, Vec3 b, double radius) { return Fiber{id, {a, b}, radius}; }

/// Random result of `count` short fibers in a cube of side `side`.
inline FiberResult random_result(std::mt19937_64& rng, int result_id, int count, double side, double length,
                                 double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Fiber> fibers;
  for (int i = 0; i < count; ++i) {
    const Vec3 c{u(rng) * side, u(rng) * side, u(rng) * side};
    const Vec3 dir = normalized(Vec3{u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5});
    const Vec3 bend{u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
    const double r = radius * (0.6 + 0.8 * u(rng));
    fibers.push_back(Fiber{i, {c - dir * (0.5 * length), c + bend * (0.2 * length), c + dir * (0.5 * length)}, r});
  }
  return FiberResult::from_fibers(result_id, std::move(fibers));
}

}  // namespace paramsens::testing
