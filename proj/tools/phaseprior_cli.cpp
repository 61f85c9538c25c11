// phaseprior: reconstruct, sweep and verify from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "phaseprior/bridge.hpp"
#include "phaseprior/experiment.hpp"
#include "phaseprior/image_io.hpp"
#include "phaseprior/verify.hpp"

namespace fs = std::filesystem;
using namespace phaseprior;

namespace {

struct Common {
  std::string config;
  std::string bridge;
  std::string method;
  std::string out = "out";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--bridge", c.bridge, "bridge endpoint (exec:CMD, socket:PORT, socket:HOST:PORT)");
  app->add_option("--method", c.method, "tv | continuation-plugin | pnp | plain-gd");
  app->add_option("--out", c.out, "output directory");
}

ExperimentConfig base_config(const Common& c) {
  return c.config.empty() ? ExperimentConfig{} : load_config(c.config);
}

Backends connect(const Common& c) {
  Backends b;
  if (!c.bridge.empty()) {
    b.bridge = bridge::Client::connect(c.bridge);
    b.bridge_endpoint = c.bridge;
  }
  return b;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_report(const ReconstructionReport& r) {
  std::printf("%s %s alpha=%g sigma_n=%g seed=%llu: ", r.run.image.c_str(),
              to_string(r.run.method).c_str(), r.run.alpha, r.run.sigma_n,
              static_cast<unsigned long long>(r.run.seed));
  if (r.ok()) {
    std::printf("psnr %.2f dB, cosine %.4f, %zu iterations, %zu restarts, %.0f ms\n", r.psnr_db,
                r.cosine, r.iterations, r.restarts, r.wall_ms);
  } else {
    std::printf("%s\n", r.status.c_str());
  }
}

int reconstruct(const Common& c, const std::string& image, double alpha, double sigma_n,
                std::uint64_t seed, const std::string& replay_path) {
  const auto backends = connect(c);
  ReconstructionReport report;
  if (!replay_path.empty()) {
    report = replay(slurp(replay_path), backends);
  } else {
    const auto cfg = base_config(c);
    RunSpec spec;
    spec.image = image;
    spec.method = c.method.empty() ? cfg.sweep.method : method_from_string(c.method);
    spec.alpha = alpha;
    spec.sigma_n = sigma_n;
    spec.seed = seed;
    report = run_single(spec, cfg.engine, backends);
  }
  fs::create_directories(c.out);
  std::ofstream(fs::path(c.out) / "report.json") << report.to_json() << "\n";
  if (report.ok()) save_pgm(fs::path(c.out) / "recovered.pgm", report.recovered_pixels);
  print_report(report);
  return report.ok() ? 0 : 1;
}

int sweep(const Common& c, const std::vector<double>& alphas, const std::vector<double>& noise,
          const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& images,
          bool sequential, unsigned threads, const std::string& split) {
  auto cfg = base_config(c);
  auto& spec = cfg.sweep;
  if (!c.method.empty()) spec.method = method_from_string(c.method);
  if (!alphas.empty()) spec.alphas = alphas;
  if (!noise.empty()) spec.noise_levels = noise;
  if (!seeds.empty()) spec.seeds = seeds;
  if (split == "tuning") spec.split = ImageSplit::Tuning;
  if (split == "eval") spec.split = ImageSplit::Eval;
  if (!images.empty()) {
    spec.split = ImageSplit::Eval;
    spec.eval_images = images;
  }

  SweepOptions opts;
  opts.out_dir = c.out;
  opts.sequential = sequential;
  opts.threads = threads;
  const auto result = run_sweep(spec, cfg.engine, opts, connect(c));

  std::size_t failed = 0;
  for (const auto& r : result.reports) {
    print_report(r);
    failed += r.ok() ? 0 : 1;
  }
  std::printf("%zu runs, %zu failed; wrote %s and %s\n", result.reports.size(), failed,
              result.runs_csv.string().c_str(), result.summary_csv.string().c_str());
  return 0;
}

int verify(std::uint64_t seed) {
  int failures = 0;
  for (const auto& check : run_property_suite(seed)) {
    std::printf("%s %-28s %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
    failures += check.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval from subsampled structured-random Fourier amplitudes"};
  app.require_subcommand(1);

  Common rc;
  std::string image, replay_path;
  double alpha = 1.0, sigma_n = 0.0;
  std::uint64_t seed = 0;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct a single instance");
  add_common(rec, rc);
  rec->add_option("--images", image, "ground-truth image (PGM or PNG)");
  rec->add_option("--alpha", alpha, "sampling ratio in (0, 1]");
  rec->add_option("--sigma-n", sigma_n, "measurement noise standard deviation");
  rec->add_option("--seeds", seed, "diffuser seed (mask, noise and init seeds derive from it)");
  rec->add_option("--replay", replay_path, "re-run a saved report.json")->check(CLI::ExistingFile);

  Common sc;
  std::vector<double> alphas, noise;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> images;
  bool sequential = false;
  unsigned threads = 0;
  std::string split;
  auto* sw = app.add_subcommand("sweep", "run a grid of alphas / noise levels over seeds");
  add_common(sw, sc);
  sw->add_option("--alpha", alphas, "noiseless sampling ratios")->delimiter(',');
  sw->add_option("--sigma-n", noise, "noise levels at alpha = 1")->delimiter(',');
  sw->add_option("--seeds", seeds, "diffuser seeds")->delimiter(',');
  sw->add_option("--images", images, "evaluation images")->delimiter(',');
  sw->add_option("--split", split, "image split from the config")
      ->check(CLI::IsMember({"eval", "tuning"}));
  sw->add_flag("--sequential", sequential, "single worker, bit-reproducible output");
  sw->add_option("--threads", threads, "worker count (0: all cores)");

  std::uint64_t verify_seed = 0;
  auto* ver = app.add_subcommand("verify", "run the built-in property checks");
  ver->add_option("--seed", verify_seed, "seed for the random test problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rec) {
      if (image.empty() && replay_path.empty()) {
        throw CLI::RequiredError("--images or --replay");
      }
      return reconstruct(rc, image, alpha, sigma_n, seed, replay_path);
    }
    if (*sw) return sweep(sc, alphas, noise, seeds, images, sequential, threads, split);
    if (*ver) return verify(verify_seed);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
