#include "paramsens/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "paramsens/sampling.hpp"

namespace paramsens {

double tanh_model(double x, const TanhModel& m) { return m.a + m.b * std::tanh(m.c * (x + m.d)); }

double gaussian(double x, const GaussianOracle& o) {
  const double z = (x - o.mu) / o.sigma;
  return std::exp(-0.5 * z * z) / (o.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gaussian_derivative(double x, const GaussianOracle& o) {
  return -(x - o.mu) / (o.sigma * o.sigma) * gaussian(x, o);
}

double interval_variance(const GaussianOracle& o, double t, int n_quad) {
  if (!(t > 0.0)) throw std::invalid_argument("interval_variance: t must be > 0");
  if (n_quad < 16) throw std::invalid_argument("interval_variance: n_quad must be >= 16");
  if (!(o.sigma > 0.0)) throw std::invalid_argument("interval_variance: sigma must be > 0");
  const int n = n_quad + (n_quad % 2);
  const double h = 2.0 * t / n;

  auto simpson = [&](auto&& g) {
    double sum = g(-t) + g(t);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(-t + i * h);
    return sum * h / 3.0;
  };
  const double mass = simpson([&](double x) { return gaussian(x, o); });
  const double mean = simpson([&](double x) { return x * gaussian(x, o); }) / mass;
  return simpson([&](double x) { return (x - mean) * (x - mean) * gaussian(x, o); });
}

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.fiber_count < 1) throw std::invalid_argument("synth: fiber_count must be >= 1");
  if (!(cfg.extent.x > 0 && cfg.extent.y > 0 && cfg.extent.z > 0)) {
    throw std::invalid_argument("synth: extent must be positive in all axes");
  }
  if (cfg.length_model.b == 0 || cfg.length_model.c == 0 || cfg.diameter_model.b == 0 ||
      cfg.diameter_model.c == 0) {
    throw std::invalid_argument("synth: tanh models need b != 0 and c != 0");
  }
  if (cfg.max_placement_attempts < 1) throw std::invalid_argument("synth: max_placement_attempts must be >= 1");
  if (cfg.length_jitter < 0 || cfg.length_jitter >= 1) throw std::invalid_argument("synth: length_jitter in [0,1)");
}

namespace {

struct Proposal {
  Vec3 center;
  Vec3 axis;      // unit
  Vec3 lateral;   // unit, perpendicular to axis
  double bow = 0.0;     // fraction of length
  double jitter = 0.0;  // relative length change
  int vertex_count = 3;
};

// Vertices of a bowed fiber of straight length `length` centred on `center`.
// The end points lie on the axis, so StraightLength equals `length`.
std::vector<Vec3> bowed_polyline(const Proposal& p, double length) {
  std::vector<Vec3> out;
  out.reserve(p.vertex_count);
  for (int j = 0; j < p.vertex_count; ++j) {
    const double t = static_cast<double>(j) / (p.vertex_count - 1);
    const double lateral = (j == 0 || j == p.vertex_count - 1) ? 0.0 : p.bow * length * std::sin(std::numbers::pi * t);
    out.push_back(p.center + p.axis * ((t - 0.5) * length) + p.lateral * lateral);
  }
  return out;
}

struct Capsule {
  Vec3 a, b;
  double radius;
  Box3 box;
};

}  // namespace

SynthOutcome generate(double param1, double param2, const SynthConfig& cfg, int result_id) {
  validate_synth_config(cfg);
  if (!(param1 >= 0 && param1 <= 1 && param2 >= 0 && param2 <= 1)) {
    throw std::invalid_argument("synth: param1 and param2 must lie in [0, 1]");
  }

  const double length = tanh_model(param1, cfg.length_model);
  const double radius = tanh_model(param2, cfg.diameter_model) / 2.0;
  if (!(length > 0 && radius > 0)) throw std::invalid_argument("synth: models produce non-positive sizes");

  // Envelope of every fiber the models can produce for params in [0, 1].
  const double max_length = std::max(tanh_model(0.0, cfg.length_model), tanh_model(1.0, cfg.length_model));
  const double max_radius = std::max(tanh_model(0.0, cfg.diameter_model), tanh_model(1.0, cfg.diameter_model)) / 2.0;
  const double max_tilt = cfg.max_tilt_degrees * std::numbers::pi / 180.0;
  const Box3 volume{{0, 0, 0}, cfg.extent};

  PortableRng rng(cfg.seed);
  std::vector<Capsule> accepted;
  std::vector<Fiber> fibers;
  int attempts = 0;
  while (static_cast<int>(fibers.size()) < cfg.fiber_count && attempts < cfg.max_placement_attempts) {
    ++attempts;
    Proposal p;
    p.center = {rng.uniform(0, cfg.extent.x), rng.uniform(0, cfg.extent.y), rng.uniform(0, cfg.extent.z)};
    const double tilt = max_tilt * std::sqrt(rng.uniform());
    const double azimuth = rng.uniform(0, 2 * std::numbers::pi);
    p.axis = {std::sin(tilt) * std::cos(azimuth), std::sin(tilt) * std::sin(azimuth), std::cos(tilt)};
    const Vec3 u = any_perpendicular(p.axis);
    const Vec3 v = cross(p.axis, u);
    const double roll = rng.uniform(0, 2 * std::numbers::pi);
    p.lateral = u * std::cos(roll) + v * std::sin(roll);
    p.bow = rng.uniform(-cfg.max_bow, cfg.max_bow);
    p.jitter = rng.uniform(-cfg.length_jitter, cfg.length_jitter);
    p.vertex_count = 3 + static_cast<int>(rng.below(3));

    const double envelope_length = max_length * (1.0 + p.jitter);
    const Vec3 half = p.axis * (0.5 * envelope_length);
    Capsule cap{p.center - half, p.center + half, max_radius + std::abs(p.bow) * envelope_length, {}};
    cap.box.expand(cap.a);
    cap.box.expand(cap.b);
    cap.box = cap.box.inflated(cap.radius);
    if (!volume.contains(cap.box)) continue;

    bool overlaps = false;
    for (const auto& other : accepted) {
      if (!cap.box.overlaps(other.box)) continue;
      const double reach = cap.radius + other.radius;
      if (segment_segment_distance_sq(cap.a, cap.b, other.a, other.b) < reach * reach) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;

    accepted.push_back(cap);
    fibers.push_back(Fiber{static_cast<int>(fibers.size()), bowed_polyline(p, length * (1.0 + p.jitter)), radius});
  }

  SynthOutcome out;
  out.complete = static_cast<int>(fibers.size()) == cfg.fiber_count;
  out.attempts = attempts;
  out.result = FiberResult::from_fibers(result_id, std::move(fibers));
  return out;
}

}  // namespace paramsens
