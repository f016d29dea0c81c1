#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "paramsens/config.hpp"
#include "paramsens/sampling.hpp"

namespace paramsens {

struct SampleStatus {
  std::size_t sample_id = 0;
  bool ok = false;
  int exit_code = 0;
  int fiber_count = 0;
  bool complete = true;  // synthetic target reached the requested fiber count
  std::string file;      // relative to the collection
  std::string input_key;
  std::string sha256;
  std::string message;

  friend bool operator==(const SampleStatus&, const SampleStatus&) = default;
};

struct Manifest {
  std::vector<SampleStatus> samples;
};

void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

/// Layout of a collection directory.
struct CollectionPaths {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "study.ini"; }
  std::filesystem::path plan() const { return root / "plan.csv"; }
  std::filesystem::path manifest() const { return root / "manifest.csv"; }
  std::filesystem::path results() const { return root / "results"; }
  std::filesystem::path result(std::size_t sample_id) const;
  std::string result_relative(std::size_t sample_id) const;
};

struct RunSummary {
  Manifest manifest;
  std::size_t executed = 0;
  std::size_t reused = 0;
  std::size_t failed = 0;
};

class StudyAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Samples the parameter space, runs the target for every sample not
/// already present with a matching input key, and writes plan, results and
/// manifest. Failed runs are recorded; more than half failing throws
/// StudyAborted (after the manifest is written).
RunSummary run_study(const StudyConfig& cfg, std::string_view config_text, const std::filesystem::path& collection);

}  // namespace paramsens
