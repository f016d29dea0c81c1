#include "paramsens/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "paramsens/log.hpp"
#include "text_util.hpp"

namespace paramsens {

namespace {

using nlohmann::json;

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

[[noreturn]] void bad_request(const std::string& message) { throw HttpError(400, message); }
[[noreturn]] void not_found(const std::string& message) { throw HttpError(404, message); }

json envelope(json payload) {
  payload["schema"] = kServiceSchema;
  return payload;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::size_t parse_id(const std::string& text, const std::string& what) {
  try {
    return detail::parse_u64(text, what);
  } catch (const std::exception&) {
    bad_request(what + ": not a non-negative integer: '" + text + "'");
  }
}

std::vector<std::size_t> parse_id_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> ids;
  if (detail::trim(text).empty()) return ids;
  for (const auto& part : detail::split(text, ',')) ids.push_back(parse_id(std::string(detail::trim(part)), what));
  return ids;
}

const std::string& require(const QueryService::Query& q, const std::string& key) {
  const auto it = q.find(key);
  if (it == q.end() || it->second.empty()) bad_request("missing query parameter '" + key + "'");
  return it->second;
}

class Handler {
 public:
  Handler(const Analysis& a, const TubeSampler& sampler) : a_(a), sampler_(sampler) {}

  json study() const {
    json params = json::array();
    for (const auto& d : a_.plan.descriptors) params.push_back({{"name", d.name}, {"min", d.min}, {"max", d.max}});
    json samples = json::array();
    for (const auto& s : a_.plan.samples) {
      const auto& st = a_.manifest.samples.size() > s.sample_id ? &a_.manifest.samples[s.sample_id] : nullptr;
      samples.push_back({{"sample_id", s.sample_id},
                         {"star_id", s.star_id},
                         {"branch_param", s.branch_param ? json(a_.plan.descriptors[*s.branch_param].name) : json(nullptr)},
                         {"step_offset", s.step_offset},
                         {"values", s.vector.values},
                         {"ok", a_.ok(s.sample_id)},
                         {"fiber_count", a_.ok(s.sample_id) ? a_.result(s.sample_id).fibers.size() : 0},
                         {"message", st ? st->message : ""}});
    }
    return {{"name", a_.config.name},
            {"parameters", params},
            {"plan", {{"stars", a_.plan.star_count}, {"step", a_.plan.step}, {"seed", a_.plan.seed}, {"max_steps", a_.plan.max_steps}}},
            {"samples", samples},
            {"characteristics", characteristic_names()}};
  }

  json matrix(const QueryService::Query& q) const {
    Characteristic sort_by = Characteristic::StraightLength;
    if (const auto it = q.find("sort"); it != q.end()) sort_by = characteristic(it->second);
    const auto m = study_matrix(a_, sort_by);
    json raw = json::array(), normalized = json::array();
    for (Eigen::Index r = 0; r < m.raw.rows(); ++r) {
      json rr = json::array(), nr = json::array();
      for (Eigen::Index c = 0; c < m.raw.cols(); ++c) {
        rr.push_back(m.raw(r, c));
        nr.push_back(m.normalized(r, c));
      }
      raw.push_back(rr);
      normalized.push_back(nr);
    }
    json best = json::array();
    const auto bm = *a_.field.measure_index(kBestMatchMeasure);
    for (std::size_t p = 0; p < a_.field.parameters.size(); ++p) best.push_back(optional_json(a_.field.global[bm][p]));
    return {{"parameters", m.parameters},
            {"columns", m.columns},
            {"measure", measure_name(a_.config.matrix_measure)},
            {"sort", characteristic_name(sort_by)},
            {"row_order", m.row_order},
            {"raw", raw},
            {"normalized", normalized},
            {"best_match_global", best}};
  }

  json influence(const QueryService::Query& q) const {
    const auto& pname = require(q, "param");
    const auto param = find_parameter(a_.plan.descriptors, pname);
    if (!param) not_found("unknown parameter '" + pname + "'");
    const auto c = characteristic(require(q, "char"));
    const auto measure_id = distribution_measure_id(c, a_.config.matrix_measure);
    const auto m = *a_.field.measure_index(measure_id);

    const auto avg = average_histogram(a_, c);
    const auto variation = mean_per_bin_variation(a_, *param, c);
    json curve = json::array();
    for (const auto& b : a_.field.regional[m][*param]) {
      curve.push_back({{"center", b.center}, {"value", optional_json(b.value)}, {"count", b.count}});
    }

    json markers = json::array(), siblings = json::array();
    std::set<std::size_t> marked;
    for (const auto id : selection(q, "selected").value_or(std::vector<std::size_t>{})) {
      const auto& s = a_.plan.samples[id];
      markers.push_back({{"sample_id", id}, {"value", s.vector[*param]}});
      marked.insert(id);
    }
    for (const auto id : marked) {
      const auto& s = a_.plan.samples[id];
      for (const auto sib : a_.plan.branch(s.star_id, *param)) {
        if (marked.count(sib) || !(s.is_center() || s.branch_param == param)) continue;
        siblings.push_back({{"sample_id", sib}, {"value", a_.plan.samples[sib].vector[*param]}});
      }
    }
    return {{"param", pname},
            {"char", characteristic_name(c)},
            {"units", characteristic_units(c)},
            {"measure", measure_id},
            {"global", optional_json(a_.field.global[m][*param])},
            {"histogram", {{"lo", avg.lo}, {"hi", avg.hi}, {"frequencies", avg.frequencies}}},
            {"per_bin_variation", variation ? json(*variation) : json(nullptr)},
            {"regional", curve},
            {"markers", markers},
            {"siblings", siblings}};
  }

  json mds() const {
    json points = json::array();
    for (std::size_t i = 0; i < a_.ok_ids.size(); ++i) {
      points.push_back({{"sample_id", a_.ok_ids[i]},
                        {"x", a_.embedding.coordinates[i][0]},
                        {"y", a_.embedding.coordinates[i][1]}});
    }
    return {{"stress", a_.embedding.stress}, {"degenerate", a_.embedding.degenerate}, {"points", points}};
  }

  json stars(const QueryService::Query& q) const {
    const auto selected = selection(q, "selected");
    std::set<std::size_t> wanted;
    for (std::size_t s = 0; s < a_.plan.star_count; ++s) {
      if (!selected) wanted.insert(s);
    }
    for (const auto id : selected.value_or(std::vector<std::size_t>{})) wanted.insert(a_.plan.samples[id].star_id);

    json out = json::array();
    for (const auto star : wanted) {
      const auto center = a_.plan.center_of(star);
      json branches = json::array();
      for (std::size_t p = 0; p < a_.plan.descriptors.size(); ++p) {
        const auto members = a_.plan.branch(star, p);
        json mj = json::array(), segments = json::array();
        for (const auto id : members) {
          const auto& s = a_.plan.samples[id];
          json entry = {{"sample_id", id}, {"step_offset", s.step_offset}, {"values", s.vector.values}, {"ok", a_.ok(id)}};
          entry["mds"] = a_.ok(id) ? json(point(id)) : json(nullptr);
          entry["dissimilarity_to_center"] = optional_json(symmetric(center, id));
          mj.push_back(entry);
        }
        std::optional<std::size_t> previous;
        for (const auto id : members) {
          if (!a_.ok(id)) continue;
          if (previous) segments.push_back({{"from", *previous}, {"to", id}});
          previous = id;
        }
        branches.push_back({{"param", a_.plan.descriptors[p].name}, {"param_index", p}, {"members", mj}, {"segments", segments}});
      }
      out.push_back({{"star_id", star}, {"center", center}, {"branches", branches}});
    }
    return {{"stars", out}};
  }

  json spatial(const QueryService::Query& q) const {
    const auto& g = a_.occupation;
    json out = {{"geometry", geometry(g.geometry)},
                {"max", g.values.empty() ? 0.0 : *std::max_element(g.values.begin(), g.values.end())},
                {"result_count", a_.ok_ids.size()}};
    const auto it = q.find("slice");
    if (it == q.end()) return out;
    const auto parts = detail::split(it->second, ',');
    if (parts.size() != 2) bad_request("slice must be 'axis,index'");
    int axis = -1;
    const auto axis_text = detail::trim(parts[0]);
    if (axis_text == "x" || axis_text == "0") axis = 0;
    else if (axis_text == "y" || axis_text == "1") axis = 1;
    else if (axis_text == "z" || axis_text == "2") axis = 2;
    else bad_request("slice axis must be x, y, z or 0..2");
    const auto index = static_cast<long long>(parse_id(std::string(detail::trim(parts[1])), "slice index"));
    if (index >= g.geometry.dims[axis]) bad_request("slice index out of range");
    out["axis"] = axis;
    out["index"] = index;
    out["values"] = slice(g, axis, static_cast<int>(index));
    return out;
  }

  json spatial_result(std::size_t id) const {
    const auto grid = voxelize(ok_result(id), a_.occupation.geometry);
    json voxels = json::array();
    const auto& d = grid.geometry.dims;
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          const double v = grid.at(i, j, k);
          if (v > 0.0) voxels.push_back({i, j, k, v});
        }
      }
    }
    return {{"sample_id", id}, {"geometry", geometry(grid.geometry)}, {"voxels", voxels}};
  }

  json fibers(std::size_t id) const {
    const auto& r = ok_result(id);
    json fs = json::array();
    for (std::size_t f = 0; f < r.fibers.size(); ++f) {
      json vertices = json::array();
      for (const auto& v : r.fibers[f].vertices) vertices.push_back(vec_json(v));
      json chars = json::object();
      for (const auto c : kCharacteristics) chars[std::string(characteristic_name(c))] = r.characteristics[f][index_of(c)];
      fs.push_back({{"id", r.fibers[f].id}, {"radius", r.fibers[f].radius}, {"vertices", vertices}, {"characteristics", chars}});
    }
    return {{"sample_id", id}, {"values", a_.plan.samples[id].vector.values}, {"fibers", fs}};
  }

  json diff(const QueryService::Query& q) const {
    const auto ref = parse_id(require(q, "ref"), "ref");
    const auto& ref_result = ok_result(ref);
    const auto others = parse_id_list(require(q, "other"), "other");
    const auto fiber_ids = parse_id_list(require(q, "fibers"), "fibers");
    if (others.empty() || fiber_ids.empty()) bad_request("'other' and 'fibers' must name at least one id");

    std::vector<PreparedFiber> ref_fibers;
    for (const auto fid : fiber_ids) {
      const auto* f = ref_result.find_fiber(static_cast<int>(fid));
      if (!f) not_found("sample " + std::to_string(ref) + " has no fiber " + std::to_string(fid));
      ref_fibers.push_back(prepare_fiber(*f));
    }

    json comparisons = json::array();
    for (const auto other : others) {
      const auto target = PreparedResult::from(ok_result(other));
      json pairs = json::array();
      for (const auto& rf : ref_fibers) {
        const auto bm = best_match(rf, target, sampler_);
        json pair = {{"fiber", rf.id}, {"s", bm.s}};
        if (!bm.match) {
          pair["match"] = nullptr;
          pair["only_ref"] = json::array();
          pair["only_other"] = json::array();
        } else {
          pair["match"] = *bm.match;
          const PreparedFiber* mf = nullptr;
          for (const auto& f : target.fibers) {
            if (f.id == *bm.match) mf = &f;
          }
          const auto d = coverage_difference(rf, *mf, sampler_);
          json a = json::array(), b = json::array();
          for (const auto& p : d.only_first) a.push_back(vec_json(p));
          for (const auto& p : d.only_second) b.push_back(vec_json(p));
          pair["only_ref"] = a;
          pair["only_other"] = b;
        }
        pairs.push_back(pair);
      }
      comparisons.push_back({{"other", other}, {"pairs", pairs}});
    }
    return {{"ref", ref}, {"comparisons", comparisons}};
  }

 private:
  static json characteristic_names() {
    json names = json::array();
    for (const auto c : kCharacteristics) names.push_back(characteristic_name(c));
    return names;
  }

  static Characteristic characteristic(const std::string& name) {
    const auto c = parse_characteristic(name);
    if (!c) not_found("unknown characteristic '" + name + "'");
    return *c;
  }

  static json geometry(const GridGeometry& g) {
    return {{"dims", g.dims}, {"origin", vec_json(g.origin)}, {"spacing", vec_json(g.spacing)}, {"order", "x-fastest"}};
  }

  std::array<double, 2> point(std::size_t id) const { return a_.embedding.coordinates[*a_.position[id]]; }

  std::optional<double> symmetric(std::size_t x, std::size_t y) const {
    if (!a_.ok(x) || !a_.ok(y)) return std::nullopt;
    return a_.symmetric(static_cast<Eigen::Index>(*a_.position[x]), static_cast<Eigen::Index>(*a_.position[y]));
  }

  const FiberResult& ok_result(std::size_t id) const {
    if (id >= a_.plan.samples.size()) not_found("unknown sample " + std::to_string(id));
    if (!a_.ok(id)) not_found("sample " + std::to_string(id) + " has no result (failed run)");
    return a_.result(id);
  }

  /// nullopt when the key is absent; ids are checked against the plan.
  std::optional<std::vector<std::size_t>> selection(const QueryService::Query& q, const std::string& key) const {
    const auto it = q.find(key);
    if (it == q.end()) return std::nullopt;
    auto ids = parse_id_list(it->second, key);
    for (const auto id : ids) {
      if (id >= a_.plan.samples.size()) not_found("unknown sample " + std::to_string(id));
    }
    return ids;
  }

  const Analysis& a_;
  const TubeSampler& sampler_;
};

std::optional<std::size_t> trailing_id(std::string_view path, std::string_view prefix) {
  if (!path.starts_with(prefix)) return std::nullopt;
  const std::string rest(path.substr(prefix.size()));
  return parse_id(rest, "id");
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const Analysis> analysis)
    : analysis_(std::move(analysis)), sampler_(analysis_->config.sample_points) {}

ServiceResponse QueryService::handle(std::string_view raw_path, const Query& query) const {
  std::string_view path = raw_path;
  while (path.size() > 1 && path.back() == '/') path.remove_suffix(1);
  const Handler h(*analysis_, sampler_);
  try {
    json payload;
    if (path == "/study") payload = h.study();
    else if (path == "/matrix") payload = h.matrix(query);
    else if (path == "/influence") payload = h.influence(query);
    else if (path == "/mds") payload = h.mds();
    else if (path == "/stars") payload = h.stars(query);
    else if (path == "/spatial") payload = h.spatial(query);
    else if (const auto id = trailing_id(path, "/spatial/result/")) payload = h.spatial_result(*id);
    else if (const auto fid = trailing_id(path, "/fibers/")) payload = h.fibers(*fid);
    else if (path == "/diff") payload = h.diff(query);
    else not_found("no endpoint " + std::string(path));
    return {200, envelope(std::move(payload)).dump()};
  } catch (const HttpError& e) {
    return {e.status, envelope({{"error", {{"status", e.status}, {"message", e.what()}}}}).dump()};
  } catch (const std::exception& e) {
    return {500, envelope({{"error", {{"status", 500}, {"message", e.what()}}}}).dump()};
  }
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const QueryService& service) : impl_(std::make_unique<Impl>()) {
  impl_->server.Get(".*", [&service](const httplib::Request& req, httplib::Response& res) {
    QueryService::Query query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto r = service.handle(req.path, query);
    res.status = r.status;
    res.set_content(r.body, "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace paramsens
