#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "paramsens/model.hpp"

namespace paramsens {

/// Portable pseudo-random stream. std::mt19937_64's output sequence is fixed
/// by the standard; the uniform and bounded-integer transforms below are
/// spelled out so plans reproduce across standard libraries.
class PortableRng {
 public:
  static constexpr std::string_view kName = "mt19937_64/v1";

  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Latin hypercube design: per dimension a Fisher-Yates permutation of the
/// strata, then one jittered value per stratum. Dimensions are drawn in
/// descriptor order, the permutation before the jitters.
std::vector<ParameterVector> latin_hypercube(std::span<const ParameterDescriptor> descriptors,
                                             std::size_t n, std::uint64_t seed);

struct BranchPoint {
  std::size_t param = 0;
  int step_offset = 0;
  ParameterVector vector;
};

/// One-at-a-time variation of each parameter around `center` at step
/// w * range, traversing the full range (or at most `max_steps` steps per
/// direction when max_steps > 0). Ordered by parameter, then offset.
std::vector<BranchPoint> star_branches(const ParameterVector& center,
                                       std::span<const ParameterDescriptor> descriptors, double w,
                                       int max_steps = 0);

struct SampleRecord {
  std::size_t sample_id = 0;
  std::size_t star_id = 0;
  std::optional<std::size_t> branch_param;  // empty for star centers
  int step_offset = 0;
  ParameterVector vector;

  bool is_center() const { return !branch_param.has_value(); }
};

struct SamplePlan {
  std::vector<ParameterDescriptor> descriptors;
  std::size_t star_count = 0;
  double step = 0.0;
  std::uint64_t seed = 0;
  int max_steps = 0;
  std::vector<SampleRecord> samples;

  std::size_t center_of(std::size_t star) const;
  /// Sample ids along the branch of `param` in `star`, ordered by offset,
  /// including the center at offset 0.
  std::vector<std::size_t> branch(std::size_t star, std::size_t param) const;
  /// Id of the sample at `offset` on the branch, or the center for offset 0.
  std::optional<std::size_t> at_offset(std::size_t star, std::size_t param, int offset) const;
};

/// Throws std::invalid_argument for n == 0, w outside (0, 0.5], or invalid descriptors.
SamplePlan build_plan(std::span<const ParameterDescriptor> descriptors, std::size_t n, double w,
                      std::uint64_t seed, int max_steps = 0);

/// Plan around caller-supplied star centers.
SamplePlan build_plan_from_centers(std::span<const ParameterDescriptor> descriptors,
                                   std::span<const ParameterVector> centers, double w,
                                   int max_steps = 0);

/// Checks every plan invariant; throws std::invalid_argument describing the first violation.
void validate_plan(const SamplePlan& plan);

void write_plan_csv(std::ostream& out, const SamplePlan& plan);
SamplePlan read_plan_csv(std::istream& in);

}  // namespace paramsens
