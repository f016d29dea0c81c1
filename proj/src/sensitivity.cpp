#include "paramsens/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace paramsens {

std::optional<double> local_sensitivity(const SamplePlan& plan, std::size_t star, std::size_t param,
                                        const VariationFn& variation) {
  const std::size_t center = plan.center_of(star);
  double sum = 0.0;
  std::size_t count = 0;
  for (int offset : {-1, 1}) {
    const auto neighbour = plan.at_offset(star, param, offset);
    if (!neighbour) continue;
    if (const auto v = variation(center, *neighbour)) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

RegionalCurve regional_curve(const SamplePlan& plan, std::size_t param, const VariationFn& variation,
                             std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("regional curve needs at least one bin");
  const auto& desc = plan.descriptors.at(param);
  const double width = desc.range() / static_cast<double>(bins);
  std::vector<double> sums(bins, 0.0);
  std::vector<std::size_t> counts(bins, 0);

  for (std::size_t star = 0; star < plan.star_count; ++star) {
    const auto members = plan.branch(star, param);
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      const auto v = variation(members[i], members[i + 1]);
      if (!v) continue;
      const double mid = 0.5 * (plan.samples[members[i]].vector[param] + plan.samples[members[i + 1]].vector[param]);
      const double pos = std::floor((mid - desc.min) / width);
      const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
      sums[bin] += *v / plan.step;
      ++counts[bin];
    }
  }

  RegionalCurve curve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    curve[b].center = desc.min + (static_cast<double>(b) + 0.5) * width;
    curve[b].count = counts[b];
    if (counts[b] > 0) curve[b].value = sums[b] / static_cast<double>(counts[b]);
  }
  return curve;
}

std::optional<double> global_sensitivity(std::span<const std::optional<double>> locals) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : locals) {
    if (!v) continue;
    sum += *v;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::optional<std::size_t> SensitivityField::measure_index(std::string_view id) const {
  const auto it = std::find(measures.begin(), measures.end(), id);
  if (it == measures.end()) return std::nullopt;
  return static_cast<std::size_t>(it - measures.begin());
}

std::optional<std::size_t> SensitivityField::parameter_index(std::string_view name) const {
  const auto it = std::find(parameters.begin(), parameters.end(), name);
  if (it == parameters.end()) return std::nullopt;
  return static_cast<std::size_t>(it - parameters.begin());
}

double SensitivityField::global_or_zero(std::size_t measure, std::size_t param) const {
  return global.at(measure).at(param).value_or(0.0);
}

SensitivityField compute_sensitivity(const SamplePlan& plan, std::span<const NamedVariation> measures,
                                     std::size_t regional_bins) {
  SensitivityField field;
  field.star_count = plan.star_count;
  for (const auto& d : plan.descriptors) field.parameters.push_back(d.name);
  const std::size_t params = plan.descriptors.size();
  for (const auto& m : measures) {
    field.measures.push_back(m.id);
    auto& local = field.local.emplace_back(params, std::vector<std::optional<double>>(plan.star_count));
    auto& regional = field.regional.emplace_back();
    auto& global = field.global.emplace_back();
    for (std::size_t p = 0; p < params; ++p) {
      for (std::size_t s = 0; s < plan.star_count; ++s) local[p][s] = local_sensitivity(plan, s, p, m.fn);
      regional.push_back(regional_curve(plan, p, m.fn, regional_bins));
      global.push_back(global_sensitivity(local[p]));
    }
  }
  return field;
}

InOutMatrix in_out_matrix(const SensitivityField& field, std::span<const std::string> column_measures,
                          std::span<const std::string> labels, std::size_t sort_column) {
  if (labels.size() != column_measures.size()) throw std::invalid_argument("one label per column required");
  InOutMatrix m;
  m.parameters = field.parameters;
  m.columns.assign(labels.begin(), labels.end());
  const auto rows = static_cast<Eigen::Index>(field.parameters.size());
  const auto cols = static_cast<Eigen::Index>(column_measures.size());
  m.raw = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto measure = field.measure_index(column_measures[c]);
    if (!measure) throw std::invalid_argument("unknown measure " + column_measures[c]);
    for (Eigen::Index r = 0; r < rows; ++r) m.raw(r, c) = field.global_or_zero(*measure, r);
  }
  m.normalized = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double peak = rows > 0 ? m.raw.col(c).maxCoeff() : 0.0;
    if (peak > 0.0) m.normalized.col(c) = m.raw.col(c) / peak;
  }
  m.row_order.resize(field.parameters.size());
  std::iota(m.row_order.begin(), m.row_order.end(), std::size_t{0});
  if (sort_column < column_measures.size()) {
    std::stable_sort(m.row_order.begin(), m.row_order.end(), [&](std::size_t a, std::size_t b) {
      return m.raw(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(sort_column)) >
             m.raw(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(sort_column));
    });
  }
  return m;
}

}  // namespace paramsens
