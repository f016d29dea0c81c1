#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paramsens/config.hpp"
#include "paramsens/embedding.hpp"
#include "paramsens/histogram.hpp"
#include "paramsens/runner.hpp"
#include "paramsens/sampling.hpp"
#include "paramsens/sensitivity.hpp"
#include "paramsens/spatial.hpp"

namespace paramsens {

inline constexpr std::string_view kAnalysisVersion = "paramsens-analysis/1";

/// Artifact kinds, in computation order.
inline constexpr std::array<std::string_view, 5> kArtifactKinds = {"histograms", "dissimilarity", "sensitivity",
                                                                   "embedding", "occupation"};

/// Measure id for the distribution difference of one characteristic.
std::string distribution_measure_id(Characteristic c, DistributionMeasure m);
inline constexpr std::string_view kBestMatchMeasure = "best_match";

struct PreprocessOptions {
  std::optional<int> workers;                   // overrides the study setting
  std::optional<std::filesystem::path> cache_dir;  // overrides config and PARAMSENS_CACHE
  std::optional<Box3> roi;                         // overrides the study setting
};

/// Everything derived from a collection. Matrices and embeddings are indexed
/// by position in `ok_ids`, histograms by sample id.
struct Analysis {
  std::filesystem::path collection;
  StudyConfig config;
  SamplePlan plan;
  Manifest manifest;

  std::vector<std::size_t> ok_ids;
  std::vector<std::optional<std::size_t>> position;  // sample id -> index into ok_ids
  std::vector<std::optional<FiberResult>> results;   // by sample id

  std::array<std::pair<double, double>, kCharacteristicCount> ranges{};
  std::vector<std::array<Histogram, kCharacteristicCount>> histograms;  // by sample id (empty for failed)

  Eigen::MatrixXd directed;   // d(a, b), row a
  Eigen::MatrixXd symmetric;  // (d(a,b) + d(b,a)) / 2

  SensitivityField field;
  Embedding2D embedding;
  VoxelGrid occupation;

  std::map<std::string, std::string> digests;  // artifact kind -> payload sha256
  std::vector<std::string> recomputed;         // artifact kinds computed in this call

  bool ok(std::size_t sample_id) const { return sample_id < position.size() && position[sample_id].has_value(); }
  const FiberResult& result(std::size_t sample_id) const;
  /// Variation function of a measure id over sample ids.
  VariationFn variation(std::string_view measure_id) const;
  std::vector<std::string> measure_ids() const;
};

/// In-out matrix over the characteristics under the study's matrix measure,
/// rows ordered by descending influence on `sort_by`.
InOutMatrix study_matrix(const Analysis& analysis, Characteristic sort_by = Characteristic::StraightLength);

/// Mean of the usable results' histograms of one characteristic.
Histogram average_histogram(const Analysis& analysis, Characteristic c);

/// Per-bin variation between star centers and their +-1 neighbours along
/// `param`, averaged over stars; nullopt when no star has a usable neighbour.
std::optional<std::vector<double>> mean_per_bin_variation(const Analysis& analysis, std::size_t param,
                                                          Characteristic c);

/// Fibers whose bounding-box center lies in `roi`, with their ids kept.
FiberResult filter_fibers(const FiberResult& result, const Box3& roi);

/// Loads the collection, computes or loads from cache every artifact and
/// returns the full analysis. Failed samples are excluded with a warning.
Analysis preprocess(const std::filesystem::path& collection, const PreprocessOptions& options = {});

/// Writes sensitivity.csv (long format) and occupation.raw/.hdr into the collection.
void write_analysis_outputs(const Analysis& analysis);

}  // namespace paramsens
