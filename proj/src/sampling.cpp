#include "paramsens/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace paramsens {

std::uint64_t PortableRng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::vector<ParameterVector> latin_hypercube(std::span<const ParameterDescriptor> descriptors,
                                             std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("latin_hypercube: n must be >= 1");
  PortableRng rng(seed);
  std::vector<ParameterVector> out(n, ParameterVector{std::vector<double>(descriptors.size())});
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < descriptors.size(); ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(strata[i], strata[rng.below(i + 1)]);
    }
    const auto& desc = descriptors[d];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      const double v = desc.min + (static_cast<double>(strata[i]) + u) / static_cast<double>(n) * desc.range();
      out[i][d] = std::min(v, desc.max);
    }
  }
  return out;
}

std::vector<BranchPoint> star_branches(const ParameterVector& center,
                                       std::span<const ParameterDescriptor> descriptors, double w,
                                       int max_steps) {
  if (!(w > 0.0 && w <= 0.5)) throw std::invalid_argument("step width must be in (0, 0.5]");
  if (!within_ranges(center, descriptors)) throw std::invalid_argument("star center outside parameter ranges");

  std::vector<BranchPoint> out;
  for (std::size_t p = 0; p < descriptors.size(); ++p) {
    const auto& desc = descriptors[p];
    const double step = w * desc.range();
    const double slack = 1e-9 * desc.range();
    auto value_at = [&](int k) { return center[p] + k * step; };
    auto inside = [&](double v) { return v >= desc.min - slack && v <= desc.max + slack; };
    auto emit = [&](int k) {
      BranchPoint bp{p, k, center};
      bp.vector[p] = std::clamp(value_at(k), desc.min, desc.max);
      out.push_back(std::move(bp));
    };

    int lowest = 0;
    while ((max_steps <= 0 || -lowest < max_steps) && inside(value_at(lowest - 1))) --lowest;
    for (int k = lowest; k < 0; ++k) emit(k);
    for (int k = 1; (max_steps <= 0 || k <= max_steps) && inside(value_at(k)); ++k) emit(k);
  }
  return out;
}

std::size_t SamplePlan::center_of(std::size_t star) const {
  for (const auto& s : samples) {
    if (s.star_id == star && s.is_center()) return s.sample_id;
  }
  throw std::out_of_range("no star " + std::to_string(star));
}

std::vector<std::size_t> SamplePlan::branch(std::size_t star, std::size_t param) const {
  std::vector<std::pair<int, std::size_t>> members;
  for (const auto& s : samples) {
    if (s.star_id != star) continue;
    if (s.is_center() || *s.branch_param == param) members.emplace_back(s.step_offset, s.sample_id);
  }
  std::sort(members.begin(), members.end());
  std::vector<std::size_t> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.second);
  return out;
}

std::optional<std::size_t> SamplePlan::at_offset(std::size_t star, std::size_t param, int offset) const {
  for (const auto& s : samples) {
    if (s.star_id != star) continue;
    if (offset == 0 && s.is_center()) return s.sample_id;
    if (offset != 0 && !s.is_center() && *s.branch_param == param && s.step_offset == offset) {
      return s.sample_id;
    }
  }
  return std::nullopt;
}

SamplePlan build_plan_from_centers(std::span<const ParameterDescriptor> descriptors,
                                   std::span<const ParameterVector> centers, double w, int max_steps) {
  validate_descriptors(descriptors);
  if (centers.empty()) throw std::invalid_argument("sample plan needs at least one star");
  if (!(w > 0.0 && w <= 0.5)) throw std::invalid_argument("step width must be in (0, 0.5]");

  SamplePlan plan;
  plan.descriptors.assign(descriptors.begin(), descriptors.end());
  plan.star_count = centers.size();
  plan.step = w;
  plan.max_steps = max_steps;
  std::size_t next_id = 0;
  for (std::size_t star = 0; star < centers.size(); ++star) {
    plan.samples.push_back(SampleRecord{next_id++, star, std::nullopt, 0, centers[star]});
    for (auto& bp : star_branches(centers[star], descriptors, w, max_steps)) {
      plan.samples.push_back(SampleRecord{next_id++, star, bp.param, bp.step_offset, std::move(bp.vector)});
    }
  }
  return plan;
}

SamplePlan build_plan(std::span<const ParameterDescriptor> descriptors, std::size_t n, double w,
                      std::uint64_t seed, int max_steps) {
  if (n == 0) throw std::invalid_argument("star count N must be >= 1");
  validate_descriptors(descriptors);
  const auto centers = latin_hypercube(descriptors, n, seed);
  auto plan = build_plan_from_centers(descriptors, centers, w, max_steps);
  plan.seed = seed;
  return plan;
}

void validate_plan(const SamplePlan& plan) {
  validate_descriptors(plan.descriptors);
  std::size_t centers = 0;
  std::map<std::size_t, const SampleRecord*> center_by_star;
  for (std::size_t i = 0; i < plan.samples.size(); ++i) {
    const auto& s = plan.samples[i];
    const std::string where = "sample " + std::to_string(s.sample_id);
    if (s.sample_id != i) throw std::invalid_argument(where + ": sample ids must be dense and ordered");
    if (!within_ranges(s.vector, plan.descriptors)) throw std::invalid_argument(where + ": value outside range");
    if (s.star_id >= plan.star_count) throw std::invalid_argument(where + ": star id out of range");
    if (s.is_center()) {
      ++centers;
      if (!center_by_star.emplace(s.star_id, &s).second) throw std::invalid_argument(where + ": second center");
    }
  }
  if (centers != plan.star_count) throw std::invalid_argument("plan must contain exactly N star centers");
  for (const auto& s : plan.samples) {
    if (s.is_center()) continue;
    const std::string where = "sample " + std::to_string(s.sample_id);
    const auto& c = center_by_star.at(s.star_id)->vector;
    const std::size_t p = *s.branch_param;
    if (p >= plan.descriptors.size() || s.step_offset == 0) throw std::invalid_argument(where + ": bad branch");
    for (std::size_t d = 0; d < c.size(); ++d) {
      if (d != p && s.vector[d] != c[d]) throw std::invalid_argument(where + ": differs off-branch");
    }
    const double expected = s.step_offset * plan.step * plan.descriptors[p].range();
    if (std::abs((s.vector[p] - c[p]) - expected) > 1e-8 * plan.descriptors[p].range()) {
      throw std::invalid_argument(where + ": branch offset mismatch");
    }
  }
}

void write_plan_csv(std::ostream& out, const SamplePlan& plan) {
  out << "# paramsens-plan v1\n";
  out << "# generator=" << PortableRng::kName << " seed=" << plan.seed << '\n';
  out << "# stars=" << plan.star_count << " step=" << format_real(plan.step) << " max_steps=" << plan.max_steps
      << '\n';
  for (const auto& d : plan.descriptors) {
    out << "# parameter=" << d.name << ',' << format_real(d.min) << ',' << format_real(d.max) << '\n';
  }
  out << "sample_id,star_id,branch_param,step_offset";
  for (const auto& d : plan.descriptors) out << ',' << d.name;
  out << '\n';
  for (const auto& s : plan.samples) {
    out << s.sample_id << ',' << s.star_id << ',';
    if (s.branch_param) out << plan.descriptors[*s.branch_param].name;
    out << ',' << s.step_offset;
    for (double v : s.vector.values) out << ',' << format_real(v);
    out << '\n';
  }
}

namespace {

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  for (auto token : detail::split(text, ' ')) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    kv[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
  }
  return kv;
}

}  // namespace

SamplePlan read_plan_csv(std::istream& in) {
  SamplePlan plan;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::vector<std::string> columns;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    const std::string where = "plan line " + std::to_string(line_no);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = detail::trim(t.substr(1));
      if (body.starts_with("parameter=")) {
        const auto f = detail::split(body.substr(10), ',');
        if (f.size() != 3) throw std::invalid_argument(where + ": bad parameter line");
        plan.descriptors.push_back({std::string(f[0]), detail::parse_real(f[1], where), detail::parse_real(f[2], where)});
      } else {
        const auto kv = parse_key_values(body);
        if (auto it = kv.find("seed"); it != kv.end()) plan.seed = detail::parse_u64(it->second, where);
        if (auto it = kv.find("stars"); it != kv.end()) plan.star_count = detail::parse_u64(it->second, where);
        if (auto it = kv.find("step"); it != kv.end()) plan.step = detail::parse_real(it->second, where);
        if (auto it = kv.find("max_steps"); it != kv.end()) plan.max_steps = detail::parse_int(it->second, where);
      }
      continue;
    }
    const auto fields = detail::split(t, ',');
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 4 || fields[0] != "sample_id" || fields[1] != "star_id" || fields[2] != "branch_param" ||
          fields[3] != "step_offset") {
        throw std::invalid_argument(where + ": expected plan header");
      }
      if (fields.size() - 4 != plan.descriptors.size()) {
        throw std::invalid_argument(where + ": header does not match parameter metadata");
      }
      for (std::size_t i = 4; i < fields.size(); ++i) {
        if (fields[i] != plan.descriptors[i - 4].name) throw std::invalid_argument(where + ": parameter order mismatch");
      }
      continue;
    }
    if (fields.size() != 4 + plan.descriptors.size()) throw std::invalid_argument(where + ": wrong field count");
    SampleRecord s;
    s.sample_id = detail::parse_u64(fields[0], where);
    s.star_id = detail::parse_u64(fields[1], where);
    if (!fields[2].empty()) {
      const auto p = find_parameter(plan.descriptors, fields[2]);
      if (!p) throw std::invalid_argument(where + ": unknown branch parameter");
      s.branch_param = *p;
    }
    s.step_offset = detail::parse_int(fields[3], where);
    for (std::size_t i = 4; i < fields.size(); ++i) s.vector.values.push_back(detail::parse_real(fields[i], where));
    plan.samples.push_back(std::move(s));
  }
  if (!header_seen) throw std::invalid_argument("plan file has no header");
  validate_plan(plan);
  return plan;
}

}  // namespace paramsens
