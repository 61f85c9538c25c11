#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phaseprior/experiment.hpp"

namespace phaseprior {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Method m) {
  switch (m) {
    case Method::Tv:
      return "tv";
    case Method::ContinuationPlugin:
      return "continuation-plugin";
    case Method::Pnp:
      return "pnp";
    case Method::PlainGd:
      return "plain-gd";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "tv") return Method::Tv;
  if (s == "continuation-plugin") return Method::ContinuationPlugin;
  if (s == "pnp") return Method::Pnp;
  if (s == "plain-gd") return Method::PlainGd;
  throw InvalidParameter("unknown method '" + s +
                         "' (expected tv, continuation-plugin, pnp or plain-gd)");
}

void SweepSpec::validate() const {
  if (alphas.empty() && noise_levels.empty()) {
    throw InvalidParameter("sweep needs at least one alpha or noise level");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw InvalidParameter("sweep alpha outside (0, 1]");
  }
  for (double s : noise_levels) {
    if (!(s >= 0.0)) throw InvalidParameter("sweep noise level must be >= 0");
  }
  if (seeds.empty()) throw InvalidParameter("sweep needs at least one seed");
  if (images().empty()) throw InvalidParameter("sweep image list is empty");
}

namespace {

ordered_json apgd_to_json(const ApgdConfig& c) {
  ordered_json j;
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  j["epsilon"] = c.epsilon;
  j["lambda"] = c.lambda;
  j["sigma_n_floor"] = c.sigma_n_floor;
  j["max_iters"] = c.max_iters;
  j["full_objective_restart"] = c.full_objective_restart;
  return j;
}

void apgd_from_json(const json& j, ApgdConfig& c) {
  if (j.contains("gamma")) {
    c.gamma = j["gamma"].is_null() ? std::nullopt : std::optional<double>(j["gamma"].get<double>());
  }
  c.epsilon = j.value("epsilon", c.epsilon);
  c.lambda = j.value("lambda", c.lambda);
  c.sigma_n_floor = j.value("sigma_n_floor", c.sigma_n_floor);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.full_objective_restart = j.value("full_objective_restart", c.full_objective_restart);
  c.validate();
}

ordered_json engine_to_json(const EngineConfig& e) {
  ordered_json j;
  j["crop"] = e.crop;
  j["regularizer"] = {{"huber_eps", e.huber_eps}, {"magnitude_floor", e.magnitude_floor}};
  j["tv"] = apgd_to_json(e.tv);
  j["continuation"] = apgd_to_json(e.plugin);
  ordered_json pnp;
  pnp["K"] = e.pnp.K;
  pnp["lambda"] = e.pnp.lambda;
  pnp["sigma_0"] = e.pnp.sigma_0;
  pnp["sigma_n_floor"] = e.pnp.sigma_n_floor;
  pnp["denoiser_width"] = e.denoiser_width;
  j["pnp"] = pnp;
  j["plain_gd"] = {{"step", e.gd.step}, {"epsilon", e.gd.epsilon}, {"max_iters", e.gd.max_iters}};
  return j;
}

EngineConfig engine_from_json(const json& j) {
  EngineConfig e;
  e.crop = j.value("crop", e.crop);
  if (j.contains("regularizer")) {
    const auto& r = j["regularizer"];
    e.huber_eps = r.value("huber_eps", e.huber_eps);
    e.magnitude_floor = r.value("magnitude_floor", e.magnitude_floor);
  }
  if (!(e.huber_eps > 0.0)) throw InvalidParameter("huber_eps must be > 0");
  if (!(e.magnitude_floor > 0.0)) throw InvalidParameter("magnitude_floor must be > 0");
  if (j.contains("tv")) apgd_from_json(j["tv"], e.tv);
  if (j.contains("continuation")) apgd_from_json(j["continuation"], e.plugin);
  if (j.contains("pnp")) {
    const auto& p = j["pnp"];
    e.pnp.K = p.value("K", e.pnp.K);
    e.pnp.lambda = p.value("lambda", e.pnp.lambda);
    e.pnp.sigma_0 = p.value("sigma_0", e.pnp.sigma_0);
    e.pnp.sigma_n_floor = p.value("sigma_n_floor", e.pnp.sigma_n_floor);
    e.denoiser_width = p.value("denoiser_width", e.denoiser_width);
  }
  if (j.contains("plain_gd")) {
    const auto& g = j["plain_gd"];
    e.gd.step = g.value("step", e.gd.step);
    e.gd.epsilon = g.value("epsilon", e.gd.epsilon);
    e.gd.max_iters = g.value("max_iters", e.gd.max_iters);
    e.gd.validate();
  }
  return e;
}

}  // namespace

std::string engine_config_json(const EngineConfig& cfg) { return engine_to_json(cfg).dump(); }

EngineConfig parse_engine_config(const std::string& json_text) {
  try {
    return engine_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("invalid engine config: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(json_text);
    cfg.engine = engine_from_json(j);
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      auto& sw = cfg.sweep;
      sw.alphas = s.value("alphas", sw.alphas);
      sw.noise_levels = s.value("noise_levels", sw.noise_levels);
      sw.seeds = s.value("seeds", sw.seeds);
      if (s.contains("method")) sw.method = method_from_string(s["method"].get<std::string>());
      sw.eval_images = s.value("eval_images", sw.eval_images);
      sw.tuning_images = s.value("tuning_images", sw.tuning_images);
      if (s.contains("split")) {
        const auto split = s["split"].get<std::string>();
        if (split == "eval") {
          sw.split = ImageSplit::Eval;
        } else if (split == "tuning") {
          sw.split = ImageSplit::Tuning;
        } else {
          throw InvalidParameter("sweep split must be 'eval' or 'tuning'");
        }
      }
    }
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str());
  // Relative image paths are resolved against the config file's directory.
  const auto base = path.parent_path();
  for (auto* list : {&cfg.sweep.eval_images, &cfg.sweep.tuning_images}) {
    for (auto& img : *list) {
      const std::filesystem::path p(img);
      if (p.is_relative() && !base.empty()) img = (base / p).lexically_normal().string();
    }
  }
  return cfg;
}

}  // namespace phaseprior
