#include "paramsens/fiber_dissimilarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace paramsens {

bool PreparedFiber::contains(const Vec3& p) const {
  if (!box.contains(p)) return false;
  const double r2 = radius * radius;
  for (const auto& s : segments) {
    if (point_segment_distance_sq(p, s.a, s.b) <= r2) return true;
  }
  return false;
}

PreparedFiber prepare_fiber(const Fiber& fiber) {
  validate_fiber(fiber);
  PreparedFiber out;
  out.id = fiber.id;
  out.radius = fiber.radius;
  out.box = bounding_box(fiber);
  double start = 0.0;
  for (std::size_t i = 1; i < fiber.vertices.size(); ++i) {
    PreparedFiber::Segment s;
    s.a = fiber.vertices[i - 1];
    s.b = fiber.vertices[i];
    s.length = norm(s.b - s.a);
    s.dir = (s.b - s.a) * (1.0 / s.length);
    s.u = any_perpendicular(s.dir);
    s.v = cross(s.dir, s.u);
    s.start = start;
    start += s.length;
    out.segments.push_back(s);
  }
  out.length = start;
  out.volume = std::numbers::pi * fiber.radius * fiber.radius * out.length;
  return out;
}

TubeSampler::TubeSampler(int n_points) {
  if (n_points < 1) throw std::invalid_argument("TubeSampler needs at least one point");
  const auto n = static_cast<std::size_t>(n_points);
  // radial stride coprime to n so the area strata form a permutation
  std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * 0.6180339887498949)));
  while (std::gcd(stride, n) != 1) ++stride;

  constexpr double kAngleStep = 0.7548776662466927;
  station_.resize(n);
  rho_.resize(n);
  cos_.resize(n);
  sin_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    station_[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const auto stratum = (i * stride) % n;
    rho_[i] = std::sqrt((static_cast<double>(stratum) + 0.5) / static_cast<double>(n));
    const double frac = std::fmod(static_cast<double>(i) * kAngleStep, 1.0);
    cos_[i] = std::cos(2.0 * std::numbers::pi * frac);
    sin_[i] = std::sin(2.0 * std::numbers::pi * frac);
  }
}

void TubeSampler::sample(const PreparedFiber& fiber, std::vector<Vec3>& out) const {
  out.clear();
  out.reserve(station_.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < station_.size(); ++i) {
    const double s = station_[i] * fiber.length;
    while (seg + 1 < fiber.segments.size() && s > fiber.segments[seg].start + fiber.segments[seg].length) ++seg;
    const auto& sg = fiber.segments[seg];
    const double along = std::clamp(s - sg.start, 0.0, sg.length);
    const double r = rho_[i] * fiber.radius;
    out.push_back(sg.a + sg.dir * along + sg.u * (r * cos_[i]) + sg.v * (r * sin_[i]));
  }
}

std::vector<Vec3> TubeSampler::sample(const PreparedFiber& fiber) const {
  std::vector<Vec3> out;
  sample(fiber, out);
  return out;
}

namespace {

// Axes further apart than the radii sum: no point of one tube lies in the other.
bool tubes_disjoint(const PreparedFiber& fx, const PreparedFiber& fy) {
  const double reach = fx.radius + fy.radius;
  const double reach2 = reach * reach;
  for (const auto& a : fx.segments) {
    for (const auto& b : fy.segments) {
      if (segment_segment_distance_sq(a.a, a.b, b.a, b.b) <= reach2) return false;
    }
  }
  return true;
}

}  // namespace

double fiber_dissimilarity(const PreparedFiber& fx, std::span<const Vec3> fx_points, const PreparedFiber& fy) {
  if (fx_points.empty() || !fx.box.overlaps(fy.box) || tubes_disjoint(fx, fy)) return 1.0;
  std::size_t contained = 0;
  for (const auto& p : fx_points) {
    if (fy.contains(p)) ++contained;
  }
  const double overlap = static_cast<double>(contained) / static_cast<double>(fx_points.size());
  const double ratio = std::min(fx.volume, fy.volume) / std::max(fx.volume, fy.volume);
  return std::clamp(1.0 - overlap * ratio, 0.0, 1.0);
}

double fiber_dissimilarity(const PreparedFiber& fx, const PreparedFiber& fy, const TubeSampler& sampler) {
  const auto points = sampler.sample(fx);
  return fiber_dissimilarity(fx, points, fy);
}

double fiber_dissimilarity(const Fiber& fx, const Fiber& fy, int n_points) {
  if (n_points < 1) throw std::invalid_argument("n_points must be positive");
  return fiber_dissimilarity(prepare_fiber(fx), prepare_fiber(fy), TubeSampler(n_points));
}

BoxIndex::BoxIndex(std::span<const PreparedFiber> fibers) {
  entries_.reserve(fibers.size());
  for (std::size_t i = 0; i < fibers.size(); ++i) entries_.emplace_back(fibers[i].box, i);
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& l, const auto& r) { return l.first.lo.x < r.first.lo.x || (l.first.lo.x == r.first.lo.x && l.second < r.second); });
}

void BoxIndex::query(const Box3& box, std::vector<std::size_t>& out) const {
  out.clear();
  for (const auto& [b, i] : entries_) {
    if (b.lo.x > box.hi.x) break;
    if (b.overlaps(box)) out.push_back(i);
  }
}

PreparedResult PreparedResult::from(const FiberResult& result) {
  PreparedResult out;
  out.result_id = result.result_id;
  out.fibers.reserve(result.fibers.size());
  for (const auto& f : result.fibers) out.fibers.push_back(prepare_fiber(f));
  out.index = BoxIndex(out.fibers);
  return out;
}

BestMatch best_match(const PreparedFiber& f, std::span<const Vec3> f_points, const PreparedResult& target,
                     std::vector<std::size_t>& scratch) {
  target.index.query(f.box, scratch);
  BestMatch best;
  for (auto i : scratch) {
    const auto& candidate = target.fibers[i];
    const double s = fiber_dissimilarity(f, f_points, candidate);
    if (!best.match || s < best.s || (s == best.s && candidate.id < *best.match)) {
      best = {candidate.id, s};
    }
  }
  if (!best.match || best.s >= 1.0) return {};
  return best;
}

BestMatch best_match(const PreparedFiber& f, const PreparedResult& target, const TubeSampler& sampler) {
  const auto points = sampler.sample(f);
  std::vector<std::size_t> scratch;
  return best_match(f, points, target, scratch);
}

std::vector<BestMatch> best_matches(const PreparedResult& a, const PreparedResult& b, const TubeSampler& sampler) {
  std::vector<BestMatch> out;
  out.reserve(a.fibers.size());
  std::vector<Vec3> points;
  std::vector<std::size_t> scratch;
  for (const auto& f : a.fibers) {
    sampler.sample(f, points);
    out.push_back(best_match(f, points, b, scratch));
  }
  return out;
}

double result_dissimilarity(const PreparedResult& a, const PreparedResult& b, const TubeSampler& sampler) {
  if (a.fibers.empty()) return b.fibers.empty() ? 0.0 : 1.0;
  double sum = 0.0;
  for (const auto& m : best_matches(a, b, sampler)) sum += m.s;
  return sum / static_cast<double>(a.fibers.size());
}

double result_dissimilarity(const FiberResult& a, const FiberResult& b, int n_points) {
  return result_dissimilarity(PreparedResult::from(a), PreparedResult::from(b), TubeSampler(n_points));
}

CoverageDifference coverage_difference(const PreparedFiber& first, const PreparedFiber& second,
                                       const TubeSampler& sampler) {
  CoverageDifference out;
  for (const auto& p : sampler.sample(first)) {
    if (!second.contains(p)) out.only_first.push_back(p);
  }
  for (const auto& p : sampler.sample(second)) {
    if (!first.contains(p)) out.only_second.push_back(p);
  }
  return out;
}

}  // namespace paramsens
