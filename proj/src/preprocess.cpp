#include "paramsens/preprocess.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "paramsens/cache.hpp"
#include "paramsens/digest.hpp"
#include "paramsens/fiber_dissimilarity.hpp"
#include "paramsens/kernels.hpp"
#include "paramsens/log.hpp"

namespace paramsens {

namespace {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

// Histograms ---------------------------------------------------------------

std::string histograms_payload(const Analysis& a) {
  json ranges = json::array();
  for (const auto& [lo, hi] : a.ranges) ranges.push_back({lo, hi});
  json rows = json::array();
  for (const auto id : a.ok_ids) {
    json freq = json::array();
    for (const auto& h : a.histograms[id]) freq.push_back(h.frequencies);
    rows.push_back({{"sample_id", id}, {"frequencies", freq}, {"empty", a.histograms[id][0].empty_source}});
  }
  return json{{"bins", a.config.histogram_bins}, {"ranges", ranges}, {"results", rows}}.dump();
}

void load_histograms(Analysis& a, const std::string& payload) {
  const auto j = json::parse(payload);
  for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
    a.ranges[c] = {j["ranges"][c][0].get<double>(), j["ranges"][c][1].get<double>()};
  }
  const auto& rows = j["results"];
  if (rows.size() != a.ok_ids.size()) throw std::runtime_error("histogram artifact does not match the collection");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto id = rows[r]["sample_id"].get<std::size_t>();
    if (id != a.ok_ids[r]) throw std::runtime_error("histogram artifact does not match the collection");
    for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
      auto& h = a.histograms[id][c];
      h.lo = a.ranges[c].first;
      h.hi = a.ranges[c].second;
      h.frequencies = rows[r]["frequencies"][c].get<std::vector<double>>();
      h.empty_source = rows[r]["empty"].get<bool>();
    }
  }
}

void compute_histograms(Analysis& a) {
  for (std::size_t c = 0; c < kCharacteristicCount; ++c) {
    std::vector<std::vector<double>> columns;
    for (const auto id : a.ok_ids) columns.push_back(a.results[id]->column(kCharacteristics[c]));
    a.ranges[c] = common_range(columns);
    for (std::size_t r = 0; r < a.ok_ids.size(); ++r) {
      a.histograms[a.ok_ids[r]][c] =
          build_histogram(columns[r], a.config.histogram_bins, a.ranges[c].first, a.ranges[c].second);
    }
  }
}

// Dissimilarity --------------------------------------------------------------

std::string matrix_payload(const Analysis& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.directed.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(a.directed.cols()));
    for (Eigen::Index k = 0; k < a.directed.cols(); ++k) row[static_cast<std::size_t>(k)] = a.directed(i, k);
    rows.push_back(row);
  }
  return json{{"sample_ids", a.ok_ids}, {"sample_points", a.config.sample_points}, {"directed", rows}}.dump();
}

void load_matrix(Analysis& a, const std::string& payload) {
  const auto j = json::parse(payload);
  if (j["sample_ids"].get<std::vector<std::size_t>>() != a.ok_ids) {
    throw std::runtime_error("dissimilarity artifact does not match the collection");
  }
  const auto n = static_cast<Eigen::Index>(a.ok_ids.size());
  a.directed.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j["directed"][static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) a.directed(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
}

void compute_matrix(Analysis& a, int workers) {
  std::vector<PreparedResult> prepared;
  prepared.reserve(a.ok_ids.size());
  for (const auto id : a.ok_ids) prepared.push_back(PreparedResult::from(*a.results[id]));
  const TubeSampler sampler(a.config.sample_points);
  a.directed = kernels::dissimilarity_matrix_omp(prepared, sampler, workers);
}

// Sensitivity ----------------------------------------------------------------

json curve_to_json(const RegionalCurve& curve) {
  json out = json::array();
  for (const auto& b : curve) out.push_back({{"center", b.center}, {"value", optional_to_json(b.value)}, {"count", b.count}});
  return out;
}

std::string sensitivity_payload(const SensitivityField& f) {
  json local = json::array(), regional = json::array(), global = json::array();
  for (std::size_t m = 0; m < f.measures.size(); ++m) {
    json lm = json::array(), rm = json::array(), gm = json::array();
    for (std::size_t p = 0; p < f.parameters.size(); ++p) {
      json lp = json::array();
      for (const auto& v : f.local[m][p]) lp.push_back(optional_to_json(v));
      lm.push_back(lp);
      rm.push_back(curve_to_json(f.regional[m][p]));
      gm.push_back(optional_to_json(f.global[m][p]));
    }
    local.push_back(lm);
    regional.push_back(rm);
    global.push_back(gm);
  }
  return json{{"measures", f.measures}, {"parameters", f.parameters}, {"star_count", f.star_count},
              {"local", local},         {"regional", regional},       {"global", global}}
      .dump();
}

SensitivityField load_sensitivity(const std::string& payload) {
  const auto j = json::parse(payload);
  SensitivityField f;
  f.measures = j["measures"].get<std::vector<std::string>>();
  f.parameters = j["parameters"].get<std::vector<std::string>>();
  f.star_count = j["star_count"].get<std::size_t>();
  f.local.resize(f.measures.size());
  f.regional.resize(f.measures.size());
  f.global.resize(f.measures.size());
  for (std::size_t m = 0; m < f.measures.size(); ++m) {
    for (std::size_t p = 0; p < f.parameters.size(); ++p) {
      std::vector<std::optional<double>> locals;
      for (const auto& v : j["local"][m][p]) locals.push_back(optional_from_json(v));
      f.local[m].push_back(std::move(locals));
      RegionalCurve curve;
      for (const auto& b : j["regional"][m][p]) {
        curve.push_back({b["center"].get<double>(), optional_from_json(b["value"]), b["count"].get<std::size_t>()});
      }
      f.regional[m].push_back(std::move(curve));
      f.global[m].push_back(optional_from_json(j["global"][m][p]));
    }
  }
  return f;
}

// Embedding ------------------------------------------------------------------

std::string embedding_payload(const Analysis& a) {
  json coords = json::array();
  for (const auto& c : a.embedding.coordinates) coords.push_back({c[0], c[1]});
  return json{{"sample_ids", a.ok_ids},
              {"coordinates", coords},
              {"stress", a.embedding.stress},
              {"degenerate", a.embedding.degenerate}}
      .dump();
}

void load_embedding(Analysis& a, const std::string& payload) {
  const auto j = json::parse(payload);
  if (j["sample_ids"].get<std::vector<std::size_t>>() != a.ok_ids) {
    throw std::runtime_error("embedding artifact does not match the collection");
  }
  a.embedding.coordinates.clear();
  for (const auto& c : j["coordinates"]) a.embedding.coordinates.push_back({c[0].get<double>(), c[1].get<double>()});
  a.embedding.stress = j["stress"].get<double>();
  a.embedding.degenerate = j["degenerate"].get<bool>();
}

// Occupation -----------------------------------------------------------------

json geometry_json(const GridGeometry& g) {
  return {{"dims", g.dims},
          {"origin", {g.origin.x, g.origin.y, g.origin.z}},
          {"spacing", {g.spacing.x, g.spacing.y, g.spacing.z}}};
}

GridGeometry geometry_from_json(const json& j) {
  GridGeometry g;
  g.dims = j["dims"].get<std::array<int, 3>>();
  const auto o = j["origin"].get<std::array<double, 3>>();
  const auto s = j["spacing"].get<std::array<double, 3>>();
  g.origin = {o[0], o[1], o[2]};
  g.spacing = {s[0], s[1], s[2]};
  return g;
}

struct Occupation {
  GridGeometry geometry;
  std::vector<std::uint32_t> counts;
};

std::string occupation_payload(const Occupation& o, std::size_t result_count) {
  return json{{"geometry", geometry_json(o.geometry)}, {"results", result_count}, {"counts", o.counts}}.dump();
}

VoxelGrid occupation_grid(const Occupation& o, std::size_t result_count) {
  VoxelGrid grid{o.geometry, std::vector<double>(o.counts.size(), 0.0)};
  if (result_count == 0) return grid;
  for (std::size_t i = 0; i < o.counts.size(); ++i) {
    grid.values[i] = static_cast<double>(o.counts[i]) / static_cast<double>(result_count);
  }
  return grid;
}

Occupation load_occupation(const std::string& payload, std::size_t result_count) {
  const auto j = json::parse(payload);
  if (j["results"].get<std::size_t>() != result_count) {
    throw std::runtime_error("occupation artifact does not match the collection");
  }
  Occupation o{geometry_from_json(j["geometry"]), j["counts"].get<std::vector<std::uint32_t>>()};
  if (o.counts.size() != o.geometry.voxel_count()) throw std::runtime_error("occupation artifact is truncated");
  return o;
}

Occupation compute_occupation(const Analysis& a, int workers) {
  std::vector<FiberResult> results;
  for (const auto id : a.ok_ids) results.push_back(*a.results[id]);
  Box3 bounds = study_bounds(results);
  if (bounds.empty()) bounds = Box3{{0, 0, 0}, {1, 1, 1}};
  Occupation o{grid_covering(bounds, a.config.grid_dims), {}};
  std::vector<PreparedResult> prepared;
  for (const auto& r : results) prepared.push_back(PreparedResult::from(r));
  o.counts = kernels::coverage_counts_omp(prepared, o.geometry, workers);
  return o;
}

// Cached stage driver ---------------------------------------------------------

class Stage {
 public:
  Stage(const ArtifactCache& cache, Analysis& analysis) : cache_(cache), analysis_(analysis) {}

  /// Loads `kind` for `key` or computes it; returns the payload digest.
  template <class Compute, class Load>
  std::string run(std::string_view kind, const std::string& key, Compute compute, Load load) {
    if (auto payload = cache_.load(kind, key)) {
      try {
        load(*payload);
        return record(kind, *payload, false);
      } catch (const std::exception& e) {
        log_warning(std::string(kind) + " cache entry unusable (" + e.what() + "); recomputing");
      }
    }
    log_info("computing " + std::string(kind));
    const std::string payload = compute();
    cache_.store(kind, key, payload);
    return record(kind, payload, true);
  }

 private:
  std::string record(std::string_view kind, const std::string& payload, bool computed) {
    auto digest = sha256_hex(payload);
    analysis_.digests[std::string(kind)] = digest;
    if (computed) analysis_.recomputed.emplace_back(kind);
    return digest;
  }

  const ArtifactCache& cache_;
  Analysis& analysis_;
};

std::string stage_key(std::string_view kind, std::initializer_list<std::string_view> parts) {
  Sha256 h;
  h.field(kAnalysisVersion).field(kind);
  for (auto p : parts) h.field(p);
  return h.hex();
}

}  // namespace

std::string distribution_measure_id(Characteristic c, DistributionMeasure m) {
  return std::string(characteristic_name(c)) + "/" + std::string(measure_name(m));
}

const FiberResult& Analysis::result(std::size_t sample_id) const {
  if (!ok(sample_id)) throw std::out_of_range("no result for sample " + std::to_string(sample_id));
  return *results[sample_id];
}

std::vector<std::string> Analysis::measure_ids() const {
  std::vector<std::string> ids;
  for (const auto c : kCharacteristics) {
    ids.push_back(distribution_measure_id(c, DistributionMeasure::JensenShannon));
    ids.push_back(distribution_measure_id(c, DistributionMeasure::Euclidean));
  }
  ids.emplace_back(kBestMatchMeasure);
  return ids;
}

VariationFn Analysis::variation(std::string_view measure_id) const {
  if (measure_id == kBestMatchMeasure) {
    return [this](std::size_t x, std::size_t y) -> std::optional<double> {
      if (!ok(x) || !ok(y)) return std::nullopt;
      return symmetric(static_cast<Eigen::Index>(*position[x]), static_cast<Eigen::Index>(*position[y]));
    };
  }
  for (const auto c : kCharacteristics) {
    for (const auto m : {DistributionMeasure::JensenShannon, DistributionMeasure::Euclidean}) {
      if (distribution_measure_id(c, m) != measure_id) continue;
      const auto ci = index_of(c);
      return [this, ci, m](std::size_t x, std::size_t y) -> std::optional<double> {
        if (!ok(x) || !ok(y)) return std::nullopt;
        return distribution_difference(m, histograms[x][ci], histograms[y][ci]);
      };
    }
  }
  throw std::invalid_argument("unknown measure " + std::string(measure_id));
}

FiberResult filter_fibers(const FiberResult& result, const Box3& roi) {
  std::vector<Fiber> kept;
  for (const auto& f : result.fibers) {
    Box3 box;
    for (const auto& v : f.vertices) box.expand(v);
    if (roi.contains((box.lo + box.hi) * 0.5)) kept.push_back(f);
  }
  return FiberResult::from_fibers(result.result_id, std::move(kept));
}

Analysis preprocess(const std::filesystem::path& collection, const PreprocessOptions& options) {
  Analysis a;
  a.collection = collection;
  const CollectionPaths paths{collection};
  a.config = load_config(paths.config());
  const std::string plan_text = read_text(paths.plan());
  {
    std::istringstream in(plan_text);
    a.plan = read_plan_csv(in);
  }
  const std::string manifest_text = read_text(paths.manifest());
  {
    std::istringstream in(manifest_text);
    a.manifest = read_manifest(in);
  }
  const int workers = options.workers.value_or(a.config.workers);
  if (options.roi) a.config.roi = options.roi;

  const auto n_samples = a.plan.samples.size();
  a.position.assign(n_samples, std::nullopt);
  a.results.resize(n_samples);
  a.histograms.resize(n_samples);

  Sha256 inputs;
  inputs.field(kAnalysisVersion).field(plan_text);
  if (const auto& r = a.config.roi) {
    inputs.field("roi");
    for (const double v : {r->lo.x, r->lo.y, r->lo.z, r->hi.x, r->hi.y, r->hi.z}) inputs.field(format_real(v));
  }
  for (const auto& s : a.manifest.samples) {
    if (s.sample_id >= n_samples) {
      log_warning("manifest entry for unknown sample " + std::to_string(s.sample_id) + " ignored");
      continue;
    }
    if (!s.ok) {
      log_warning("sample " + std::to_string(s.sample_id) + " failed (" + s.message + "); excluded");
      continue;
    }
    try {
      const auto file = collection / s.file;
      const auto digest = sha256_file(file);
      if (digest != s.sha256) throw std::runtime_error("checksum differs from manifest");
      a.results[s.sample_id] = read_fiber_csv(file, static_cast<int>(s.sample_id));
      if (a.config.roi) a.results[s.sample_id] = filter_fibers(*a.results[s.sample_id], *a.config.roi);
      inputs.field(std::to_string(s.sample_id)).field(digest);
    } catch (const std::exception& e) {
      log_warning("sample " + std::to_string(s.sample_id) + " unreadable (" + e.what() + "); excluded");
      a.results[s.sample_id].reset();
    }
  }
  for (std::size_t id = 0; id < n_samples; ++id) {
    if (!a.results[id]) continue;
    a.position[id] = a.ok_ids.size();
    a.ok_ids.push_back(id);
  }
  if (a.ok_ids.empty()) throw std::runtime_error("no usable results in " + collection.string());
  const std::string inputs_digest = inputs.hex();

  const ArtifactCache cache(options.cache_dir.value_or(resolve_cache_dir(a.config, collection)));
  Stage stage(cache, a);

  const auto bins = std::to_string(a.config.histogram_bins);
  const auto hist_digest = stage.run(
      "histograms", stage_key("histograms", {inputs_digest, bins}),
      [&] {
        compute_histograms(a);
        return histograms_payload(a);
      },
      [&](const std::string& p) { load_histograms(a, p); });

  const auto points = std::to_string(a.config.sample_points);
  const auto matrix_digest = stage.run(
      "dissimilarity", stage_key("dissimilarity", {inputs_digest, points}),
      [&] {
        compute_matrix(a, workers);
        return matrix_payload(a);
      },
      [&](const std::string& p) { load_matrix(a, p); });
  a.symmetric = 0.5 * (a.directed + a.directed.transpose());

  const auto regional_bins = std::to_string(a.config.regional_bins);
  stage.run(
      "sensitivity", stage_key("sensitivity", {hist_digest, matrix_digest, regional_bins}),
      [&] {
        std::vector<NamedVariation> measures;
        for (const auto& id : a.measure_ids()) measures.push_back({id, a.variation(id)});
        a.field = compute_sensitivity(a.plan, measures, a.config.regional_bins);
        return sensitivity_payload(a.field);
      },
      [&](const std::string& p) { a.field = load_sensitivity(p); });

  stage.run(
      "embedding", stage_key("embedding", {matrix_digest}),
      [&] {
        a.embedding = mds(a.symmetric);
        return embedding_payload(a);
      },
      [&](const std::string& p) { load_embedding(a, p); });

  const auto grid = std::to_string(a.config.grid_dims[0]) + "x" + std::to_string(a.config.grid_dims[1]) + "x" +
                    std::to_string(a.config.grid_dims[2]);
  Occupation occupation;
  stage.run(
      "occupation", stage_key("occupation", {inputs_digest, grid}),
      [&] {
        occupation = compute_occupation(a, workers);
        return occupation_payload(occupation, a.ok_ids.size());
      },
      [&](const std::string& p) { occupation = load_occupation(p, a.ok_ids.size()); });
  a.occupation = occupation_grid(occupation, a.ok_ids.size());

  return a;
}

InOutMatrix study_matrix(const Analysis& a, Characteristic sort_by) {
  std::vector<std::string> measures, labels;
  for (const auto c : kCharacteristics) {
    measures.push_back(distribution_measure_id(c, a.config.matrix_measure));
    labels.emplace_back(characteristic_name(c));
  }
  return in_out_matrix(a.field, measures, labels, index_of(sort_by));
}

Histogram average_histogram(const Analysis& a, Characteristic c) {
  const auto ci = index_of(c);
  Histogram avg{a.ranges[ci].first, a.ranges[ci].second, std::vector<double>(a.config.histogram_bins, 0.0), false};
  for (const auto id : a.ok_ids) {
    const auto& h = a.histograms[id][ci];
    for (std::size_t b = 0; b < avg.bin_count(); ++b) avg.frequencies[b] += h.frequencies[b];
  }
  for (auto& f : avg.frequencies) f /= static_cast<double>(a.ok_ids.size());
  return avg;
}

std::optional<std::vector<double>> mean_per_bin_variation(const Analysis& a, std::size_t param, Characteristic c) {
  const auto ci = index_of(c);
  std::vector<double> sum(a.config.histogram_bins, 0.0);
  std::size_t stars = 0;
  for (std::size_t star = 0; star < a.plan.star_count; ++star) {
    const auto center = a.plan.center_of(star);
    if (!a.ok(center)) continue;
    std::vector<Histogram> hs{a.histograms[center][ci]};
    for (int offset : {-1, 1}) {
      const auto n = a.plan.at_offset(star, param, offset);
      if (n && a.ok(*n)) hs.push_back(a.histograms[*n][ci]);
    }
    if (hs.size() < 2) continue;
    const auto v = per_bin_variation(hs);
    for (std::size_t b = 0; b < sum.size(); ++b) sum[b] += v[b];
    ++stars;
  }
  if (stars == 0) return std::nullopt;
  for (auto& v : sum) v /= static_cast<double>(stars);
  return sum;
}

void write_analysis_outputs(const Analysis& a) {
  std::ofstream out(a.collection / "sensitivity.csv", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write sensitivity.csv");
  out << "parameter,measure,scope,key,value,count\n";
  const auto& f = a.field;
  for (std::size_t p = 0; p < f.parameters.size(); ++p) {
    for (std::size_t m = 0; m < f.measures.size(); ++m) {
      const auto prefix = f.parameters[p] + "," + f.measures[m] + ",";
      for (std::size_t s = 0; s < f.star_count; ++s) {
        const auto& v = f.local[m][p][s];
        out << prefix << "local," << s << ',' << (v ? format_real(*v) : "") << ",\n";
      }
      const auto& g = f.global[m][p];
      out << prefix << "global,GLOBAL," << (g ? format_real(*g) : "") << ",\n";
      for (const auto& b : f.regional[m][p]) {
        out << prefix << "regional," << format_real(b.center) << ',' << (b.value ? format_real(*b.value) : "") << ','
            << b.count << '\n';
      }
    }
  }
  write_volume(a.collection / "occupation.raw", a.occupation);
}

}  // namespace paramsens
