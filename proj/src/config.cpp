#include "paramsens/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "text_util.hpp"

namespace paramsens {

namespace pt = boost::property_tree;

namespace {

std::vector<double> parse_list(std::string_view text, std::size_t expected, const std::string& where) {
  std::vector<double> out;
  for (auto item : detail::split(text, ',')) out.push_back(detail::parse_real(item, where));
  if (out.size() != expected) {
    throw std::invalid_argument(where + ": expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

TanhModel parse_model(std::string_view text, const std::string& where) {
  const auto v = parse_list(text, 4, where);
  return {v[0], v[1], v[2], v[3]};
}

void check_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : section) {
    if (!allowed.count(key)) throw std::invalid_argument("config [" + name + "]: unknown key '" + key + "'");
  }
}

std::vector<ParameterDescriptor> parse_parameters(const pt::ptree& section) {
  std::vector<ParameterDescriptor> out;
  for (const auto& [key, value] : section) {
    if (!value.empty()) continue;  // nested sections are not parameters
    const auto range = parse_list(value.data(), 2, "parameter '" + key + "'");
    out.push_back({key, range[0], range[1]});
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

StudyConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  StudyConfig cfg;
  for (const auto& [section, body] : tree) {
    const std::string where = "config [" + section + "]";
    auto get = [&](const char* key) -> std::optional<std::string> {
      if (auto v = body.get_child_optional(pt::ptree::path_type(key, '\0'))) return v->data();
      return std::nullopt;
    };
    if (section == "study") {
      check_keys(body, section, {"name", "workers", "concurrency", "cache_dir"});
      if (auto v = get("name")) cfg.name = *v;
      if (auto v = get("workers")) cfg.workers = detail::parse_int(*v, where);
      if (auto v = get("concurrency")) cfg.concurrency = detail::parse_int(*v, where);
      if (auto v = get("cache_dir")) cfg.cache_dir = resolve(base_dir, *v);
    } else if (section == "parameters") {
      cfg.parameters = parse_parameters(body);
    } else if (section == "sampling") {
      check_keys(body, section, {"stars", "step", "seed", "max_steps"});
      if (auto v = get("stars")) cfg.stars = detail::parse_u64(*v, where);
      if (auto v = get("step")) cfg.step = detail::parse_real(*v, where);
      if (auto v = get("seed")) cfg.seed = detail::parse_u64(*v, where);
      if (auto v = get("max_steps")) cfg.max_steps = detail::parse_int(*v, where);
    } else if (section == "target") {
      check_keys(body, section, {"kind", "seed", "count", "extent", "max_attempts", "length_model",
                                 "diameter_model", "length_jitter", "command", "workdir", "output"});
      const auto kind = get("kind").value_or("synthetic");
      if (kind == "synthetic") {
        cfg.target = TargetKind::Synthetic;
      } else if (kind == "external") {
        cfg.target = TargetKind::External;
      } else {
        throw std::invalid_argument(where + ": kind must be 'synthetic' or 'external'");
      }
      if (auto v = get("seed")) cfg.synth.seed = detail::parse_u64(*v, where);
      if (auto v = get("count")) cfg.synth.fiber_count = detail::parse_int(*v, where);
      if (auto v = get("extent")) {
        const auto e = parse_list(*v, 3, where + " extent");
        cfg.synth.extent = {e[0], e[1], e[2]};
      }
      if (auto v = get("max_attempts")) cfg.synth.max_placement_attempts = detail::parse_int(*v, where);
      if (auto v = get("length_model")) cfg.synth.length_model = parse_model(*v, where + " length_model");
      if (auto v = get("diameter_model")) cfg.synth.diameter_model = parse_model(*v, where + " diameter_model");
      if (auto v = get("length_jitter")) cfg.synth.length_jitter = detail::parse_real(*v, where);
      if (auto v = get("command")) cfg.external.command = *v;
      if (auto v = get("workdir")) cfg.external.workdir = resolve(base_dir, *v);
      else cfg.external.workdir = base_dir;
      if (auto v = get("output")) cfg.external.output = *v;
    } else if (section == "analysis") {
      check_keys(body, section,
                 {"histogram_bins", "matrix_measure", "sample_points", "grid", "regional_bins", "roi"});
      if (auto v = get("histogram_bins")) cfg.histogram_bins = detail::parse_u64(*v, where);
      if (auto v = get("matrix_measure")) {
        if (*v == "jensen_shannon") cfg.matrix_measure = DistributionMeasure::JensenShannon;
        else if (*v == "euclidean") cfg.matrix_measure = DistributionMeasure::Euclidean;
        else throw std::invalid_argument(where + ": matrix_measure must be jensen_shannon or euclidean");
      }
      if (auto v = get("sample_points")) cfg.sample_points = detail::parse_int(*v, where);
      if (auto v = get("grid")) {
        const auto g = parse_list(*v, 3, where + " grid");
        cfg.grid_dims = {static_cast<int>(g[0]), static_cast<int>(g[1]), static_cast<int>(g[2])};
      }
      if (auto v = get("regional_bins")) cfg.regional_bins = detail::parse_u64(*v, where);
      if (auto v = get("roi")) cfg.roi = parse_box(*v, where + " roi");
    } else if (body.empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside of a section");
    } else {
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
  }
  validate_config(cfg);
  return cfg;
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(text.str(), std::filesystem::absolute(base));
}

void validate_config(const StudyConfig& cfg) {
  validate_descriptors(cfg.parameters);
  if (cfg.stars == 0) throw std::invalid_argument("config: sampling.stars must be >= 1");
  if (!(cfg.step > 0.0 && cfg.step <= 0.5)) throw std::invalid_argument("config: sampling.step must be in (0, 0.5]");
  if (cfg.histogram_bins < 2) throw std::invalid_argument("config: analysis.histogram_bins must be >= 2");
  if (cfg.sample_points < 100) throw std::invalid_argument("config: analysis.sample_points must be >= 100");
  if (cfg.regional_bins < 1) throw std::invalid_argument("config: analysis.regional_bins must be >= 1");
  for (int d : cfg.grid_dims) {
    if (d < 1) throw std::invalid_argument("config: analysis.grid dims must be >= 1");
  }
  if (cfg.target == TargetKind::Synthetic) {
    validate_synth_config(cfg.synth);
    if (cfg.parameters.size() != 2) throw std::invalid_argument("config: the synthetic target takes exactly two parameters");
    for (const auto& p : cfg.parameters) {
      if (p.min < 0.0 || p.max > 1.0) throw std::invalid_argument("config: synthetic parameters must lie in [0, 1]");
    }
  } else {
    if (cfg.external.command.empty()) throw std::invalid_argument("config: external target needs a command");
    validate_command_template(cfg.external.command, cfg.parameters, !cfg.external.output.empty());
  }
}

std::vector<ParameterDescriptor> load_parameter_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read parameter file " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("parameter file: ") + e.what());
  }
  auto params = tree.get_child_optional("parameters") ? parse_parameters(tree.get_child("parameters"))
                                                      : parse_parameters(tree);
  validate_descriptors(params);
  return params;
}

namespace {

const std::regex kPlaceholder(R"(\{([A-Za-z0-9_.\-]+)\})");

}  // namespace

void validate_command_template(const std::string& command, std::span<const ParameterDescriptor> parameters,
                               bool output_template_given) {
  std::map<std::string, int> seen;
  for (auto it = std::sregex_iterator(command.begin(), command.end(), kPlaceholder); it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1];
    if (name != "out" && name != "sample_id" && !find_parameter(parameters, name)) {
      throw std::invalid_argument("command template: unknown placeholder {" + name + "}");
    }
    ++seen[name];
  }
  for (const auto& p : parameters) {
    if (seen[p.name] != 1) {
      throw std::invalid_argument("command template must reference {" + p.name + "} exactly once");
    }
  }
  if (!output_template_given && seen["out"] == 0) {
    throw std::invalid_argument("command template needs {out} when no output template is configured");
  }
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::string render_template(const std::string& tmpl, std::span<const ParameterDescriptor> parameters,
                            const ParameterVector& values, const std::string& out_path, std::size_t sample_id) {
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(tmpl.begin(), tmpl.end(), kPlaceholder); it != std::sregex_iterator(); ++it) {
    out.append(tmpl, last, static_cast<std::size_t>(it->position()) - last);
    const std::string name = (*it)[1];
    if (name == "out") {
      out += shell_quote(out_path);
    } else if (name == "sample_id") {
      out += std::to_string(sample_id);
    } else if (const auto p = find_parameter(parameters, name)) {
      out += format_real(values[*p]);
    } else {
      out += it->str();
    }
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  out.append(tmpl, last);
  return out;
}

std::string canonical_target(const StudyConfig& cfg) {
  std::ostringstream s;
  if (cfg.target == TargetKind::Synthetic) {
    const auto& c = cfg.synth;
    auto model = [&](const TanhModel& m) {
      return format_real(m.a) + "," + format_real(m.b) + "," + format_real(m.c) + "," + format_real(m.d);
    };
    s << "synthetic/v1 seed=" << c.seed << " count=" << c.fiber_count << " extent=" << format_real(c.extent.x) << ','
      << format_real(c.extent.y) << ',' << format_real(c.extent.z) << " attempts=" << c.max_placement_attempts
      << " length=" << model(c.length_model) << " diameter=" << model(c.diameter_model)
      << " jitter=" << format_real(c.length_jitter) << " tilt=" << format_real(c.max_tilt_degrees)
      << " bow=" << format_real(c.max_bow);
  } else {
    s << "external/v1 command=" << cfg.external.command << " workdir=" << cfg.external.workdir.string()
      << " output=" << cfg.external.output;
  }
  return s.str();
}

Box3 parse_box(std::string_view text, const std::string& where) {
  const auto v = parse_list(text, 6, where);
  const Box3 box{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  if (box.empty()) throw std::invalid_argument(where + ": lower corner exceeds upper corner");
  return box;
}

std::filesystem::path resolve_cache_dir(const StudyConfig& cfg, const std::filesystem::path& collection) {
  if (const char* env = std::getenv("PARAMSENS_CACHE"); env && *env) return env;
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  return collection / "cache";
}

}  // namespace paramsens
