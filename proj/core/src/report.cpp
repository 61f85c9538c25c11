#include <cmath>
#include <limits>

#include <json.hpp>

#include "phaseprior/bridge.hpp"
#include "phaseprior/experiment.hpp"
#include "phaseprior/image_io.hpp"
#include "phaseprior/metrics.hpp"
#include "phaseprior/random.hpp"

namespace phaseprior {

using nlohmann::json;
using nlohmann::ordered_json;

RunSeeds derive_run_seeds(std::uint64_t seed) {
  return RunSeeds{seed, derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)};
}

namespace {

// JSON has no infinity; +inf PSNR is stored as the string "inf".
json number_or_tag(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double from_number_or_tag(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = digits[v & 0xf];
  return s;
}

std::uint64_t from_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

ComplexSplitRegularizer tv_regularizer(const EngineConfig& cfg) {
  return ComplexSplitRegularizer(std::make_shared<SmoothedTv>(cfg.huber_eps), cfg.magnitude_floor);
}

}  // namespace

std::string ReconstructionReport::to_json() const {
  ordered_json j;
  j["image"] = run.image;
  j["method"] = to_string(run.method);
  j["alpha"] = run.alpha;
  j["sigma_n"] = run.sigma_n;
  j["seed"] = run.seed;
  j["status"] = status;
  j["psnr_db"] = number_or_tag(psnr_db);
  j["cosine_similarity"] = number_or_tag(cosine);
  j["psnr_domain"] = psnr_domain;
  ordered_json trace;
  trace["iterations"] = iterations;
  trace["restarts"] = restarts;
  trace["hit_max_iters"] = hit_max_iters;
  trace["wall_ms"] = wall_ms;
  ordered_json stages_json = ordered_json::array();
  for (const auto& s : stages) {
    ordered_json sj;
    sj["sigma"] = s.sigma;
    sj["sampled"] = s.sampled;
    sj["subsample_seed"] = s.subsample_seed ? json(*s.subsample_seed) : json(nullptr);
    sj["iterations"] = s.iterations;
    sj["hit_max_iters"] = s.hit_max_iters;
    stages_json.push_back(sj);
  }
  trace["stages"] = stages_json;
  j["trace"] = trace;
  ordered_json prov = ordered_json::parse(provenance.to_json());
  prov["init_seed"] = init_seed;
  prov["crop"] = crop;
  prov["image_hash"] = hex(image_hash);
  prov["config_hash"] = hex(config_hash);
  prov["bridge_endpoint"] = bridge_endpoint;
  prov["engine_config"] = ordered_json::parse(engine_config.empty() ? "{}" : engine_config);
  j["provenance"] = prov;
  return j.dump(2);
}

ReconstructionReport ReconstructionReport::from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  ReconstructionReport r;
  r.run.image = j.at("image").get<std::string>();
  r.run.method = method_from_string(j.at("method").get<std::string>());
  r.run.alpha = j.at("alpha").get<double>();
  r.run.sigma_n = j.at("sigma_n").get<double>();
  r.run.seed = j.at("seed").get<std::uint64_t>();
  r.status = j.at("status").get<std::string>();
  r.psnr_db = from_number_or_tag(j.at("psnr_db"));
  r.cosine = from_number_or_tag(j.at("cosine_similarity"));
  r.psnr_domain = j.value("psnr_domain", r.psnr_domain);
  const auto& t = j.at("trace");
  r.iterations = t.at("iterations").get<std::size_t>();
  r.restarts = t.at("restarts").get<std::size_t>();
  r.hit_max_iters = t.at("hit_max_iters").get<bool>();
  r.wall_ms = t.at("wall_ms").get<double>();
  for (const auto& sj : t.at("stages")) {
    StageInfo s;
    s.sigma = sj.at("sigma").get<double>();
    s.sampled = sj.at("sampled").get<std::size_t>();
    if (!sj.at("subsample_seed").is_null()) s.subsample_seed = sj["subsample_seed"].get<std::uint64_t>();
    s.iterations = sj.at("iterations").get<std::size_t>();
    s.hit_max_iters = sj.at("hit_max_iters").get<bool>();
    r.stages.push_back(s);
  }
  const auto& p = j.at("provenance");
  r.provenance = OperatorProvenance::from_json(p.dump());
  r.init_seed = p.at("init_seed").get<std::uint64_t>();
  r.crop = p.at("crop").get<std::size_t>();
  r.image_hash = from_hex(p.at("image_hash").get<std::string>());
  r.config_hash = from_hex(p.at("config_hash").get<std::string>());
  r.bridge_endpoint = p.value("bridge_endpoint", std::string{});
  r.engine_config = p.at("engine_config").dump();
  return r;
}

ReconstructionReport run_single(const RunSpec& spec, const EngineConfig& cfg,
                                const Backends& backends) {
  ReconstructionReport report;
  report.run = spec;
  report.engine_config = engine_config_json(cfg);
  report.config_hash = fnv1a(report.engine_config);
  report.crop = cfg.crop;
  report.bridge_endpoint = backends.bridge_endpoint;

  const RunSeeds seeds = derive_run_seeds(spec.seed);
  report.init_seed = seeds.init;
  report.psnr_db = std::numeric_limits<double>::quiet_NaN();
  report.cosine = std::numeric_limits<double>::quiet_NaN();

  try {
    const RealPlane truth = center_crop(load_grayscale(spec.image), cfg.crop, cfg.crop);
    report.image_hash = plane_hash(truth);

    auto& prov = report.provenance;
    prov.height = truth.height();
    prov.width = truth.width();
    prov.alpha = spec.alpha;
    prov.diffuser_seed = seeds.diffuser;
    prov.mask_seed = seeds.mask;
    prov.noise_seed = seeds.noise;
    prov.sigma_n = spec.sigma_n;

    const ComplexImage x_true = encode_image(truth);
    const MeasurementOperator op = prov.build_operator();
    const MeasurementSet meas = measure(op, x_true, spec.sigma_n, seeds.noise);

    SolverResult result;
    switch (spec.method) {
      case Method::Tv: {
        const ComplexImage x0 = complex_gaussian(prov.height, prov.width, seeds.init);
        result = apgd_restart(op, meas, tv_regularizer(cfg), cfg.tv, x0);
        break;
      }
      case Method::ContinuationPlugin: {
        if (!backends.bridge) {
          throw MissingCapability("continuation-plugin needs a regularizer bridge (--bridge)");
        }
        auto plugin = std::make_shared<bridge::BridgeRegularizer>(backends.bridge, 1.0);
        // Planes cross the bridge as float32: a finer step would be lost to
        // rounding, and a step this coarse sees the curvature of the prior.
        const auto conformance = check_plugin_conformance(*plugin, 8, 8, spec.seed, 50, 1e-2, 1e-3);
        if (!conformance.passed) {
          throw MissingCapability("regularizer plugin failed conformance: " + conformance.message);
        }
        const ComplexSplitRegularizer family(plugin, cfg.magnitude_floor);
        result = continuation(op, meas, family, cfg.plugin, seeds.init);
        break;
      }
      case Method::Pnp: {
        const ComplexImage x0 = complex_gaussian(prov.height, prov.width, seeds.init);
        PnpConfig pcfg = cfg.pnp;
        pcfg.sigma_K = PnpConfig::for_alpha(spec.alpha).sigma_K;
        if (backends.bridge) {
          const bridge::BridgeDenoiser den(backends.bridge);
          result = pnp(op, meas, den, pcfg, x0);
        } else {
          const GaussianDenoiser den(cfg.denoiser_width);
          result = pnp(op, meas, den, pcfg, x0);
        }
        break;
      }
      case Method::PlainGd: {
        const ComplexImage x0 = complex_gaussian(prov.height, prov.width, seeds.init);
        result = plain_gd(op, meas, cfg.gd, x0);
        break;
      }
    }

    report.iterations = result.trace.iterations();
    report.restarts = result.trace.restarts();
    report.hit_max_iters = result.trace.hit_max_iters;
    report.wall_ms = result.trace.wall_ms;
    report.stages = result.trace.stages;
    report.recovered_pixels = decode_image(result.x, x_true);
    report.psnr_db = psnr(truth, report.recovered_pixels);
    report.cosine = cosine_similarity(x_true, result.x);
    report.recovered = std::move(result.x);
    report.status = "ok";
  } catch (const DivergenceError& e) {
    report.status = std::string("error: ") + e.what();
    report.iterations = e.trace().iterations();
  } catch (const std::exception& e) {
    report.status = std::string("error: ") + e.what();
  }
  return report;
}

ReconstructionReport replay(const std::string& report_json, const Backends& backends) {
  const auto original = ReconstructionReport::from_json(report_json);
  const EngineConfig cfg = parse_engine_config(original.engine_config);
  auto again = run_single(original.run, cfg, backends);
  if (again.ok() && again.image_hash != original.image_hash) {
    again.status = "error: ground-truth image differs from the one recorded in the report";
  }
  return again;
}

}  // namespace phaseprior
