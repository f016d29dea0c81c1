// paramsens command line: sample, synth, run, analyze, serve, report.

#include <CLI11.hpp>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "paramsens/config.hpp"
#include "paramsens/log.hpp"
#include "paramsens/preprocess.hpp"
#include "paramsens/report.hpp"
#include "paramsens/runner.hpp"
#include "paramsens/sampling.hpp"
#include "paramsens/service.hpp"
#include "paramsens/synthgen.hpp"

namespace fs = std::filesystem;
using namespace paramsens;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(part, &used));
    if (used != part.size()) throw std::invalid_argument(what + ": bad number '" + part + "'");
  }
  if (out.size() != count) throw std::invalid_argument(what + ": expected " + std::to_string(count) + " values");
  return out;
}

TanhModel parse_model(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, 4, what);
  return {v[0], v[1], v[2], v[3]};
}

HttpServer* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter sensitivity analysis for fiber-extraction pipelines"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");

  // sample
  auto* sample = app.add_subcommand("sample", "Write a star-sampling plan");
  fs::path params_file, plan_out;
  std::size_t n_stars = 10;
  double step = 0.1;
  std::uint64_t seed = 1;
  int max_steps = 0;
  sample->add_option("--params", params_file, "Parameter file (name = min, max per line)")->required();
  sample->add_option("--n", n_stars, "Number of stars")->check(CLI::PositiveNumber);
  sample->add_option("--step", step, "Relative step width w");
  sample->add_option("--seed", seed, "Random seed");
  sample->add_option("--max-steps", max_steps, "Steps per direction (0 = full range)");
  sample->add_option("--out", plan_out, "Plan file")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate one synthetic fiber result");
  double param1 = 0.5, param2 = 0.5;
  SynthConfig synth_cfg;
  std::string extent, length_model, diameter_model;
  fs::path synth_out;
  int result_id = 0;
  synth->add_option("--param1", param1, "Length parameter in [0, 1]")->required();
  synth->add_option("--param2", param2, "Diameter parameter in [0, 1]")->required();
  synth->add_option("--seed", synth_cfg.seed, "Placement seed");
  synth->add_option("--count", synth_cfg.fiber_count, "Fibers to place");
  synth->add_option("--extent", extent, "Volume extent ax,ay,az");
  synth->add_option("--max-attempts", synth_cfg.max_placement_attempts, "Placement attempts");
  synth->add_option("--length-model", length_model, "a,b,c,d of a + b tanh(c (x + d))");
  synth->add_option("--diameter-model", diameter_model, "a,b,c,d of a + b tanh(c (x + d))");
  synth->add_option("--result-id", result_id, "Result id");
  synth->add_option("--out", synth_out, "Fiber file")->required();

  // run
  auto* run = app.add_subcommand("run", "Sample the study and run the target for every sample");
  fs::path config_file, collection;
  int concurrency = -1;
  run->add_option("--config", config_file, "Study file")->required()->check(CLI::ExistingFile);
  run->add_option("--collection", collection, "Collection directory")->required();
  run->add_option("--concurrency", concurrency, "Concurrent runs (0 = hardware)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute and cache all derived data");
  int workers = -1;
  fs::path cache_dir;
  analyze->add_option("--collection", collection, "Collection directory")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--workers", workers, "Worker threads (0 = hardware)");
  analyze->add_option("--cache-dir", cache_dir, "Cache directory");
  std::string roi;
  const auto* roi_help = "Only fibers centered in x0,y0,z0,x1,y1,z1";
  analyze->add_option("--roi", roi, roi_help);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the analysis read-only over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--collection", collection, "Collection directory")->required()->check(CLI::ExistingDirectory);
  serve->add_option("--port", port, "Port");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--cache-dir", cache_dir, "Cache directory");
  serve->add_option("--roi", roi, roi_help);

  // report
  auto* report = app.add_subcommand("report", "Write the matrix, curves and a summary as data files");
  fs::path report_out;
  report->add_option("--collection", collection, "Collection directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Output directory (default <collection>/report)");
  report->add_option("--cache-dir", cache_dir, "Cache directory");
  report->add_option("--roi", roi, roi_help);

  CLI11_PARSE(app, argc, argv);
  set_quiet(quiet);

  auto options = [&] {
    PreprocessOptions o;
    if (workers >= 0) o.workers = workers;
    if (!cache_dir.empty()) o.cache_dir = cache_dir;
    if (!roi.empty()) o.roi = parse_box(roi, "--roi");
    return o;
  };

  try {
    if (*sample) {
      const auto descriptors = load_parameter_file(params_file);
      const auto plan = build_plan(descriptors, n_stars, step, seed, max_steps);
      std::ofstream out(plan_out, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + plan_out.string());
      write_plan_csv(out, plan);
      log_info(std::to_string(plan.samples.size()) + " samples written to " + plan_out.string());
    } else if (*synth) {
      if (!extent.empty()) {
        const auto e = parse_numbers(extent, 3, "--extent");
        synth_cfg.extent = {e[0], e[1], e[2]};
      }
      if (!length_model.empty()) synth_cfg.length_model = parse_model(length_model, "--length-model");
      if (!diameter_model.empty()) synth_cfg.diameter_model = parse_model(diameter_model, "--diameter-model");
      const auto outcome = generate(param1, param2, synth_cfg, result_id);
      write_fiber_csv(synth_out, outcome.result);
      if (!outcome.complete) {
        log_warning("placed " + std::to_string(outcome.result.fibers.size()) + " of " +
                    std::to_string(synth_cfg.fiber_count) + " fibers");
      }
    } else if (*run) {
      const auto text = read_text(config_file);
      auto cfg = parse_config(text, config_file.parent_path().empty() ? fs::path(".") : config_file.parent_path());
      if (concurrency >= 0) cfg.concurrency = concurrency;
      const auto t0 = std::chrono::steady_clock::now();
      const auto summary = run_study(cfg, text, collection);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      log_info(std::to_string(summary.executed) + " executed, " + std::to_string(summary.reused) + " reused, " +
               std::to_string(summary.failed) + " failed in " + std::to_string(secs) + " s");
    } else if (*analyze) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto analysis = preprocess(collection, options());
      write_analysis_outputs(analysis);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (const auto& [kind, digest] : analysis.digests) std::cout << kind << ' ' << digest << '\n';
      log_info("analysis finished in " + std::to_string(secs) + " s (" + std::to_string(analysis.recomputed.size()) +
               " artifacts computed)");
    } else if (*serve) {
      auto analysis = std::make_shared<const Analysis>(preprocess(collection, options()));
      const QueryService service(analysis);
      HttpServer server(service);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      log_info("serving " + collection.string() + " on http://" + host + ":" + std::to_string(bound));
      server.run();
      g_server = nullptr;
    } else if (*report) {
      const auto analysis = preprocess(collection, options());
      const auto out = report_out.empty() ? collection / "report" : report_out;
      write_report(analysis, out);
      log_info("report written to " + out.string());
    }
  } catch (const StudyAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
