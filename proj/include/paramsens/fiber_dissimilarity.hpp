#pragma once

#include <optional>
#include <span>
#include <vector>

#include "paramsens/model.hpp"

namespace paramsens {

inline constexpr int kDefaultSamplePoints = 500;

/// A fiber with the per-segment data the containment and sampling code needs.
struct PreparedFiber {
  struct Segment {
    Vec3 a, b;
    Vec3 dir;       // unit
    Vec3 u, v;      // cross-section frame
    double start;   // arclength at a
    double length;
  };

  int id = 0;
  double radius = 0.0;
  double length = 0.0;  // arclength
  double volume = 0.0;
  Box3 box;
  std::vector<Segment> segments;

  /// Distance from p to the polyline is at most the radius.
  bool contains(const Vec3& p) const;
};

PreparedFiber prepare_fiber(const Fiber& fiber);

/// Deterministic interior sampling pattern: stations stratified along the
/// arclength, radial positions stratified by cross-section area and angles
/// from a fixed low-discrepancy sequence. Every radial fraction is < 1.
class TubeSampler {
 public:
  explicit TubeSampler(int n_points = kDefaultSamplePoints);

  int size() const { return static_cast<int>(station_.size()); }
  void sample(const PreparedFiber& fiber, std::vector<Vec3>& out) const;
  std::vector<Vec3> sample(const PreparedFiber& fiber) const;

 private:
  std::vector<double> station_;
  std::vector<double> rho_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Overlap-based dissimilarity in [0, 1]: 1 - (fraction of f_x's sample
/// points inside f_y) * min(V_x, V_y) / max(V_x, V_y).
double fiber_dissimilarity(const PreparedFiber& fx, const PreparedFiber& fy, const TubeSampler& sampler);
/// Variant with f_x's sample points precomputed by `sampler`.
double fiber_dissimilarity(const PreparedFiber& fx, std::span<const Vec3> fx_points, const PreparedFiber& fy);
double fiber_dissimilarity(const Fiber& fx, const Fiber& fy, int n_points = kDefaultSamplePoints);

/// Bounding boxes of a result's fibers, sorted along x.
class BoxIndex {
 public:
  BoxIndex() = default;
  explicit BoxIndex(std::span<const PreparedFiber> fibers);

  /// Positions (into the indexed span) of fibers whose box overlaps `box`.
  void query(const Box3& box, std::vector<std::size_t>& out) const;

 private:
  std::vector<std::pair<Box3, std::size_t>> entries_;
};

struct PreparedResult {
  int result_id = 0;
  std::vector<PreparedFiber> fibers;
  BoxIndex index;

  static PreparedResult from(const FiberResult& result);
};

struct BestMatch {
  std::optional<int> match;  // fiber id in the target result
  double s = 1.0;

  friend bool operator==(const BestMatch&, const BestMatch&) = default;
};

/// Lowest-dissimilarity fiber of `target`, evaluating only fibers whose boxes
/// overlap f's. No candidate, or a best value of 1, yields (none, 1). Ties
/// go to the lowest fiber id.
BestMatch best_match(const PreparedFiber& f, std::span<const Vec3> f_points, const PreparedResult& target,
                     std::vector<std::size_t>& scratch);
BestMatch best_match(const PreparedFiber& f, const PreparedResult& target, const TubeSampler& sampler);

std::vector<BestMatch> best_matches(const PreparedResult& a, const PreparedResult& b, const TubeSampler& sampler);

/// Mean best-match dissimilarity of a's fibers against b. An empty `a` gives
/// 1, or 0 when `b` is empty as well.
double result_dissimilarity(const PreparedResult& a, const PreparedResult& b, const TubeSampler& sampler);
double result_dissimilarity(const FiberResult& a, const FiberResult& b, int n_points = kDefaultSamplePoints);

struct CoverageDifference {
  std::vector<Vec3> only_first;   // points of the first fiber outside the second
  std::vector<Vec3> only_second;  // points of the second fiber outside the first
};

CoverageDifference coverage_difference(const PreparedFiber& first, const PreparedFiber& second,
                                       const TubeSampler& sampler);

}  // namespace paramsens
