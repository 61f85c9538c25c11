#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phaseprior/measurement.hpp"
#include "phaseprior/solvers.hpp"

namespace phaseprior {

namespace bridge {
class Client;
}

enum class Method { Tv, ContinuationPlugin, Pnp, PlainGd };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class ImageSplit { Tuning, Eval };

/// Every tunable knob of the engine. Mirrors the JSON config file.
struct EngineConfig {
  std::size_t crop = 64;  // 0 keeps the full image
  double huber_eps = kDefaultHuberEps;
  double magnitude_floor = kDefaultMagnitudeFloor;
  ApgdConfig tv = ApgdConfig::for_tv();
  ApgdConfig plugin = ApgdConfig::for_plugin();
  PnpConfig pnp;  // sigma_K is derived from alpha per run
  double denoiser_width = 3.0;
  GdConfig gd;
};

struct SweepSpec {
  std::vector<double> alphas;        // noiseless points, sigma_n = 0
  std::vector<double> noise_levels;  // noisy points, alpha = 1
  std::vector<std::uint64_t> seeds{0, 1, 2};
  Method method = Method::Tv;
  std::vector<std::string> eval_images;
  std::vector<std::string> tuning_images;
  ImageSplit split = ImageSplit::Eval;

  const std::vector<std::string>& images() const {
    return split == ImageSplit::Eval ? eval_images : tuning_images;
  }
  void validate() const;
};

struct ExperimentConfig {
  EngineConfig engine;
  SweepSpec sweep;
};

/// Parses a JSON config; absent fields keep their defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string engine_config_json(const EngineConfig& cfg);
EngineConfig parse_engine_config(const std::string& json_text);

/// One reconstruction instance.
struct RunSpec {
  std::string image;
  Method method = Method::Tv;
  double alpha = 1.0;
  double sigma_n = 0.0;
  std::uint64_t seed = 0;
};

/// Seeds derived from a run's diffuser seed.
struct RunSeeds {
  std::uint64_t diffuser = 0;
  std::uint64_t mask = 0;
  std::uint64_t noise = 0;
  std::uint64_t init = 0;
};
RunSeeds derive_run_seeds(std::uint64_t seed);

struct ReconstructionReport {
  RunSpec run;
  OperatorProvenance provenance;
  std::uint64_t init_seed = 0;
  std::string status = "ok";
  double psnr_db = 0.0;
  double cosine = 0.0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool hit_max_iters = false;
  double wall_ms = 0.0;
  std::vector<StageInfo> stages;
  std::string psnr_domain = "decoded-pixels-global-phase-aligned";
  std::string engine_config;  // JSON
  std::uint64_t config_hash = 0;
  std::uint64_t image_hash = 0;
  std::size_t crop = 0;
  std::string bridge_endpoint;

  ComplexImage recovered;      // not serialized
  RealPlane recovered_pixels;  // not serialized

  bool ok() const { return status == "ok"; }
  std::string to_json() const;
  static ReconstructionReport from_json(const std::string& text);
};

/// External components a run may need. Both are optional.
struct Backends {
  std::shared_ptr<bridge::Client> bridge;
  std::string bridge_endpoint;
};

/// Runs one instance. Solver failures are returned as an error status.
ReconstructionReport run_single(const RunSpec& spec, const EngineConfig& cfg,
                                const Backends& backends = {});

/// Re-runs a report from its own JSON (ground truth re-read from its image path).
ReconstructionReport replay(const std::string& report_json, const Backends& backends = {});

/// Cartesian product of images x grid points x seeds, in that nesting order.
std::vector<RunSpec> expand_sweep(const SweepSpec& spec);

struct SweepOptions {
  std::filesystem::path out_dir;
  bool sequential = false;
  unsigned threads = 0;  // 0: hardware concurrency
  bool write_reports = true;
};

struct SweepResult {
  std::vector<ReconstructionReport> reports;
  std::filesystem::path runs_csv;
  std::filesystem::path summary_csv;
};

/// Writes reports/*.json, images/*.pgm, runs.csv and summary.csv under out_dir.
SweepResult run_sweep(const SweepSpec& spec, const EngineConfig& cfg, const SweepOptions& opts,
                      const Backends& backends = {});

/// One row per run: image,method,alpha,sigma_n,seed,psnr_db,cosine,iters,
/// restarts,wall_ms,status. wall_ms is left empty when with_timing is false.
std::string runs_csv(const std::vector<ReconstructionReport>& reports, bool with_timing);

/// Per grid point (method, alpha, sigma_n): best / median / worst over seeds of
/// the image-averaged PSNR and cosine similarity.
std::string summary_csv(const std::vector<ReconstructionReport>& reports);

/// Median of a non-empty list (mean of the middle pair for even sizes).
double median(std::vector<double> v);

}  // namespace phaseprior
