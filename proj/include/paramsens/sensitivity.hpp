#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paramsens/sampling.hpp"

namespace paramsens {

/// Variation between the outputs of two samples; nullopt when either output
/// is unavailable (failed run).
using VariationFn = std::function<std::optional<double>(std::size_t sample_a, std::size_t sample_b)>;

struct NamedVariation {
  std::string id;
  VariationFn fn;
};

/// Mean variation between the star center and its +-1 step neighbours on the
/// parameter's branch. nullopt when no neighbour output exists.
std::optional<double> local_sensitivity(const SamplePlan& plan, std::size_t star, std::size_t param,
                                        const VariationFn& variation);

struct RegionalBin {
  double center = 0.0;
  std::optional<double> value;  // absent for empty bins
  std::size_t count = 0;
};
using RegionalCurve = std::vector<RegionalBin>;

/// Variation between adjacent samples of every branch of `param`, divided by
/// the step width and attributed to the midpoint parameter value, averaged in
/// `bins` equal-width bins over the parameter range.
RegionalCurve regional_curve(const SamplePlan& plan, std::size_t param, const VariationFn& variation,
                             std::size_t bins);

/// Mean of the defined local values; nullopt when none is defined.
std::optional<double> global_sensitivity(std::span<const std::optional<double>> locals);

struct SensitivityField {
  std::vector<std::string> measures;
  std::vector<std::string> parameters;
  std::size_t star_count = 0;
  std::vector<std::vector<std::vector<std::optional<double>>>> local;  // [measure][param][star]
  std::vector<std::vector<RegionalCurve>> regional;                   // [measure][param]
  std::vector<std::vector<std::optional<double>>> global;             // [measure][param]

  std::optional<std::size_t> measure_index(std::string_view id) const;
  std::optional<std::size_t> parameter_index(std::string_view name) const;
  /// Global value with undefined treated as 0.
  double global_or_zero(std::size_t measure, std::size_t param) const;
};

SensitivityField compute_sensitivity(const SamplePlan& plan, std::span<const NamedVariation> measures,
                                     std::size_t regional_bins);

struct InOutMatrix {
  std::vector<std::string> parameters;
  std::vector<std::string> columns;
  Eigen::MatrixXd raw;         // global sensitivities, parameters x columns
  Eigen::MatrixXd normalized;  // each column divided by its maximum
  std::vector<std::size_t> row_order;  // descending raw value in the sort column
};

/// Parameters x columns matrix from the global sensitivities of the given
/// measures, one measure per column, labelled by `labels`.
InOutMatrix in_out_matrix(const SensitivityField& field, std::span<const std::string> column_measures,
                          std::span<const std::string> labels, std::size_t sort_column);

}  // namespace paramsens
