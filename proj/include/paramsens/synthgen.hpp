#pragma once

#include <cstdint>

#include "paramsens/geometry.hpp"
#include "paramsens/model.hpp"

namespace paramsens {

/// a + b * tanh(c * (x + d))
struct TanhModel {
  double a = 0.0;
  double b = 1.0;
  double c = 1.0;
  double d = 0.0;
};

double tanh_model(double x, const TanhModel& m);

/// Length and diameter models of the reference synthetic study.
inline constexpr TanhModel kReferenceLengthModel{215.0, 15.0, 5.0, -0.5};
inline constexpr TanhModel kReferenceDiameterModel{7.0, 0.5, 8.0, -0.3};

struct GaussianOracle {
  double mu = 0.0;
  double sigma = 1.0;
};

double gaussian(double x, const GaussianOracle& o);
double gaussian_derivative(double x, const GaussianOracle& o);

/// Spread of the Gaussian over [-t, t]: integral of (x - E)^2 f(x), with E the
/// f-weighted mean over the interval. Composite Simpson on n_quad panels
/// (rounded up to even). Requires t > 0 and n_quad >= 16.
double interval_variance(const GaussianOracle& o, double t, int n_quad);

struct SynthConfig {
  Vec3 extent{400.0, 400.0, 300.0};
  int fiber_count = 80;
  std::uint64_t seed = 1;
  TanhModel length_model = kReferenceLengthModel;
  TanhModel diameter_model = kReferenceDiameterModel;
  int max_placement_attempts = 20000;
  double length_jitter = 0.05;     // per-fiber relative length jitter, uniform +-
  double max_tilt_degrees = 6.0;   // axis tilt away from +z
  double max_bow = 0.015;          // lateral bow as a fraction of length
};

void validate_synth_config(const SynthConfig& cfg);

struct SynthOutcome {
  FiberResult result;
  bool complete = true;  // false when attempts ran out before fiber_count
  int attempts = 0;
};

/// Random sequential adsorption of gently bowed tubes. Placement only depends
/// on the configuration: every proposal is tested as the capsule enclosing
/// the largest fiber the models can produce, so identical seeds give the same
/// fiber layout for every (param1, param2), and the realised tubes (length
/// from param1, diameter from param2) never overlap and stay in the volume.
SynthOutcome generate(double param1, double param2, const SynthConfig& cfg, int result_id = 0);

}  // namespace paramsens
