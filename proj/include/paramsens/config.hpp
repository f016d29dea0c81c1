#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paramsens/histogram.hpp"
#include "paramsens/model.hpp"
#include "paramsens/synthgen.hpp"

namespace paramsens {

enum class TargetKind { Synthetic, External };

/// External pipeline invoked once per sample through /bin/sh.
///   command  - template; `{<parameter>}` is replaced by the value (17
///              significant digits), `{out}` by the quoted output path and
///              `{sample_id}` by the sample id.
///   workdir  - working directory of the command.
///   output   - optional path template (may use `{sample_id}`) the command
///              writes to, relative to workdir; empty means the command
///              writes straight to `{out}` inside the collection.
struct ExternalTarget {
  std::string command;
  std::filesystem::path workdir = ".";
  std::string output;
};

struct StudyConfig {
  std::string name = "study";
  std::vector<ParameterDescriptor> parameters;

  std::size_t stars = 10;
  double step = 0.1;
  std::uint64_t seed = 1;
  int max_steps = 0;

  TargetKind target = TargetKind::Synthetic;
  SynthConfig synth;
  ExternalTarget external;

  std::size_t histogram_bins = 20;
  DistributionMeasure matrix_measure = DistributionMeasure::JensenShannon;
  int sample_points = 500;
  std::array<int, 3> grid_dims{64, 64, 64};
  std::size_t regional_bins = 10;
  std::optional<Box3> roi;  // keep only fibers whose box center lies inside

  std::filesystem::path cache_dir;  // empty: <collection>/cache
  int workers = 0;                  // preprocessing threads, 0 = hardware
  int concurrency = 0;              // concurrent sample runs, 0 = hardware
};

/// Parses the INI-style study file. Relative paths resolve against base_dir.
/// Throws std::invalid_argument on unknown sections/keys or invalid values.
StudyConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
StudyConfig load_config(const std::filesystem::path& path);
void validate_config(const StudyConfig& cfg);

/// `x0, y0, z0, x1, y1, z1` with lo <= hi on every axis.
Box3 parse_box(std::string_view text, const std::string& where = "roi");

/// Reads `name = min, max` lines, either bare or under a [parameters] section.
std::vector<ParameterDescriptor> load_parameter_file(const std::filesystem::path& path);

/// Validates placeholders: every parameter exactly once, only known names.
void validate_command_template(const std::string& command, std::span<const ParameterDescriptor> parameters,
                               bool output_template_given);

std::string render_template(const std::string& tmpl, std::span<const ParameterDescriptor> parameters,
                            const ParameterVector& values, const std::string& out_path, std::size_t sample_id);

/// Canonical description of what produces a sample's output (for cache keys).
std::string canonical_target(const StudyConfig& cfg);

/// Cache directory after applying the PARAMSENS_CACHE override.
std::filesystem::path resolve_cache_dir(const StudyConfig& cfg, const std::filesystem::path& collection);

}  // namespace paramsens
