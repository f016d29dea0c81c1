#include "paramsens/runner.hpp"

#include <sys/wait.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "paramsens/digest.hpp"
#include "paramsens/kernels.hpp"
#include "paramsens/log.hpp"
#include "paramsens/synthgen.hpp"
#include "text_util.hpp"

namespace paramsens {

namespace {

constexpr std::string_view kManifestHeader = "sample_id,status,exit_code,fiber_count,complete,file,input_key,sha256,message";

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_if_changed(const std::filesystem::path& path, const std::string& bytes) {
  if (std::filesystem::exists(path) && read_file(path) == bytes) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

std::string sample_key(const StudyConfig& cfg, const SampleRecord& s) {
  Sha256 h;
  h.field(canonical_target(cfg));
  for (double v : s.vector.values) h.field(format_real(v));
  return h.hex();
}

std::string shell_quote(const std::filesystem::path& p) {
  std::string out = "'";
  for (char c : p.string()) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

SampleStatus execute_sample(const StudyConfig& cfg, const CollectionPaths& paths, const SampleRecord& sample) {
  SampleStatus st;
  st.sample_id = sample.sample_id;
  st.file = paths.result_relative(sample.sample_id);
  st.input_key = sample_key(cfg, sample);
  const auto target_file = paths.result(sample.sample_id);

  try {
    if (cfg.target == TargetKind::Synthetic) {
      const auto outcome = generate(sample.vector[0], sample.vector[1], cfg.synth, static_cast<int>(sample.sample_id));
      write_fiber_csv(target_file, outcome.result);
      st.complete = outcome.complete;
      if (!outcome.complete) {
        st.message = "placement attempts exhausted at " + std::to_string(outcome.result.fibers.size()) + " fibers";
        log_warning("sample " + std::to_string(sample.sample_id) + ": " + st.message);
      }
    } else {
      const auto& ext = cfg.external;
      std::filesystem::path produced = target_file;
      if (!ext.output.empty()) {
        produced = ext.workdir / render_template(ext.output, cfg.parameters, sample.vector, "", sample.sample_id);
        std::filesystem::create_directories(produced.parent_path());
        std::filesystem::remove(produced);
      }
      const auto command = "cd " + shell_quote(ext.workdir) + " && " +
                           render_template(ext.command, cfg.parameters, sample.vector, produced.string(), sample.sample_id);
      const int raw = std::system(command.c_str());
      st.exit_code = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
      if (st.exit_code != 0) {
        st.message = st.exit_code == 127 ? "command not found" : "command exited with status " + std::to_string(st.exit_code);
        return st;
      }
      if (produced != target_file) {
        std::filesystem::copy_file(produced, target_file, std::filesystem::copy_options::overwrite_existing);
      }
    }
    const auto result = read_fiber_csv(target_file, static_cast<int>(sample.sample_id));
    st.fiber_count = static_cast<int>(result.fibers.size());
    st.sha256 = sha256_file(target_file);
    st.ok = true;
  } catch (const std::exception& e) {
    st.ok = false;
    st.message = e.what();
  }
  return st;
}

}  // namespace

std::filesystem::path CollectionPaths::result(std::size_t sample_id) const { return root / result_relative(sample_id); }

std::string CollectionPaths::result_relative(std::size_t sample_id) const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "results/sample_%05zu.csv", sample_id);
  return buf;
}

void write_manifest(std::ostream& out, const Manifest& manifest) {
  out << kManifestHeader << '\n';
  for (const auto& s : manifest.samples) {
    out << s.sample_id << ',' << (s.ok ? "ok" : "failed") << ',' << s.exit_code << ',' << s.fiber_count << ','
        << (s.complete ? 1 : 0) << ',' << s.file << ',' << s.input_key << ',' << s.sha256 << ','
        << sanitize(s.message) << '\n';
  }
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kManifestHeader) {
    throw std::invalid_argument("manifest: unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    const std::string where = "manifest line " + std::to_string(line_no);
    if (f.size() != 9) throw std::invalid_argument(where + ": expected 9 fields");
    SampleStatus s;
    s.sample_id = detail::parse_u64(f[0], where);
    s.ok = f[1] == "ok";
    s.exit_code = detail::parse_int(f[2], where);
    s.fiber_count = detail::parse_int(f[3], where);
    s.complete = f[4] == "1";
    s.file = f[5];
    s.input_key = f[6];
    s.sha256 = f[7];
    s.message = f[8];
    m.samples.push_back(std::move(s));
  }
  return m;
}

RunSummary run_study(const StudyConfig& cfg, std::string_view config_text, const std::filesystem::path& collection) {
  validate_config(cfg);
  const CollectionPaths paths{collection};
  std::filesystem::create_directories(paths.results());
  write_file_if_changed(paths.config(), std::string(config_text));

  const auto plan = build_plan(cfg.parameters, cfg.stars, cfg.step, cfg.seed, cfg.max_steps);
  std::ostringstream plan_text;
  write_plan_csv(plan_text, plan);
  write_file_if_changed(paths.plan(), plan_text.str());

  std::map<std::size_t, SampleStatus> previous;
  if (std::ifstream in(paths.manifest()); in) {
    try {
      for (auto& s : read_manifest(in).samples) previous.emplace(s.sample_id, std::move(s));
    } catch (const std::exception& e) {
      log_warning(std::string("ignoring unreadable manifest: ") + e.what());
    }
  }

  RunSummary summary;
  summary.manifest.samples.resize(plan.samples.size());
  std::vector<std::size_t> pending;
  for (const auto& s : plan.samples) {
    const auto it = previous.find(s.sample_id);
    const auto key = sample_key(cfg, s);
    if (it != previous.end() && it->second.ok && it->second.input_key == key &&
        it->second.file == paths.result_relative(s.sample_id) && std::filesystem::exists(paths.result(s.sample_id)) &&
        sha256_file(paths.result(s.sample_id)) == it->second.sha256) {
      summary.manifest.samples[s.sample_id] = it->second;
      ++summary.reused;
    } else {
      pending.push_back(s.sample_id);
    }
  }

  const int threads = std::min<int>(kernels::resolve_workers(cfg.concurrency), std::max<int>(1, static_cast<int>(pending.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const auto id = pending[i];
      summary.manifest.samples[id] = execute_sample(cfg, paths, plan.samples[id]);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  summary.executed = pending.size();

  for (const auto& s : summary.manifest.samples) {
    if (!s.ok) {
      ++summary.failed;
      log_warning("sample " + std::to_string(s.sample_id) + " failed: " + s.message);
    }
  }

  std::ostringstream manifest_text;
  write_manifest(manifest_text, summary.manifest);
  write_file_if_changed(paths.manifest(), manifest_text.str());

  if (2 * summary.failed > plan.samples.size()) {
    throw StudyAborted("study aborted: " + std::to_string(summary.failed) + " of " +
                       std::to_string(plan.samples.size()) + " samples failed");
  }
  return summary;
}

}  // namespace paramsens
