#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "phaseprior/experiment.hpp"
#include "phaseprior/image_io.hpp"

namespace phaseprior {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string psnr_cell(double v) {
  if (std::isnan(v)) return "nan";
  return fmt("%.4f", std::min(v, 100.0));
}

std::string cosine_cell(double v) {
  if (std::isnan(v)) return "nan";
  return fmt("%.6f", v);
}

// Statuses may contain commas or quotes.
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string image_label(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string run_stem(const RunSpec& r) {
  std::string s = image_label(r.image) + "_" + to_string(r.method) + "_a" + fmt("%g", r.alpha) +
                  "_n" + fmt("%g", r.sigma_n) + "_seed" + std::to_string(r.seed);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidParameter("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::vector<RunSpec> expand_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::pair<double, double>> points;
  for (double a : spec.alphas) points.emplace_back(a, 0.0);
  for (double s : spec.noise_levels) points.emplace_back(1.0, s);

  std::vector<RunSpec> runs;
  for (const auto& image : spec.images()) {
    for (const auto& [alpha, sigma_n] : points) {
      for (auto seed : spec.seeds) {
        runs.push_back(RunSpec{image, spec.method, alpha, sigma_n, seed});
      }
    }
  }
  return runs;
}

std::string runs_csv(const std::vector<ReconstructionReport>& reports, bool with_timing) {
  std::ostringstream out;
  out << "image,method,alpha,sigma_n,seed,psnr_db,cosine,iters,restarts,wall_ms,status\n";
  for (const auto& r : reports) {
    out << csv_quote(image_label(r.run.image)) << ',' << to_string(r.run.method) << ','
        << fmt("%g", r.run.alpha) << ',' << fmt("%g", r.run.sigma_n) << ',' << r.run.seed << ','
        << psnr_cell(r.psnr_db) << ',' << cosine_cell(r.cosine) << ',' << r.iterations << ','
        << r.restarts << ',' << (with_timing ? fmt("%.1f", r.wall_ms) : std::string{}) << ','
        << csv_quote(r.status) << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<ReconstructionReport>& reports) {
  using Point = std::tuple<std::string, double, double>;
  struct Acc {
    double psnr = 0.0, cosine = 0.0;
    int count = 0, failed = 0;
  };
  // point -> seed -> image average
  std::map<Point, std::map<std::uint64_t, Acc>> grid;
  for (const auto& r : reports) {
    auto& acc = grid[{to_string(r.run.method), r.run.alpha, r.run.sigma_n}][r.run.seed];
    if (!r.ok()) {
      ++acc.failed;
      continue;
    }
    acc.psnr += std::min(r.psnr_db, 100.0);
    acc.cosine += r.cosine;
    ++acc.count;
  }

  std::ostringstream out;
  out << "method,alpha,sigma_n,seeds,failed,psnr_best,psnr_median,psnr_worst,"
         "cosine_best,cosine_median,cosine_worst\n";
  for (const auto& [point, seeds] : grid) {
    std::vector<double> p, c;
    int failed = 0;
    for (const auto& [seed, acc] : seeds) {
      failed += acc.failed;
      if (acc.count == 0) continue;
      p.push_back(acc.psnr / acc.count);
      c.push_back(acc.cosine / acc.count);
    }
    const auto& [method, alpha, sigma_n] = point;
    out << method << ',' << fmt("%g", alpha) << ',' << fmt("%g", sigma_n) << ',' << seeds.size()
        << ',' << failed;
    if (p.empty()) {
      out << ",nan,nan,nan,nan,nan,nan\n";
      continue;
    }
    out << ',' << psnr_cell(*std::max_element(p.begin(), p.end())) << ','
        << psnr_cell(median(p)) << ',' << psnr_cell(*std::min_element(p.begin(), p.end())) << ','
        << cosine_cell(*std::max_element(c.begin(), c.end())) << ',' << cosine_cell(median(c))
        << ',' << cosine_cell(*std::min_element(c.begin(), c.end())) << '\n';
  }
  return out.str();
}

SweepResult run_sweep(const SweepSpec& spec, const EngineConfig& cfg, const SweepOptions& opts,
                      const Backends& backends) {
  const auto runs = expand_sweep(spec);
  namespace fs = std::filesystem;
  if (opts.write_reports) {
    fs::create_directories(opts.out_dir / "reports");
    fs::create_directories(opts.out_dir / "images");
  } else {
    fs::create_directories(opts.out_dir);
  }

  SweepResult result;
  result.reports.resize(runs.size());

  std::mutex writer;
  auto persist = [&](const ReconstructionReport& r) {
    if (!opts.write_reports) return;
    const std::lock_guard lock(writer);
    const auto stem = run_stem(r.run);
    write_text(opts.out_dir / "reports" / (stem + ".json"), r.to_json() + "\n");
    if (r.ok()) save_pgm(opts.out_dir / "images" / (stem + ".pgm"), r.recovered_pixels);
  };

  unsigned threads = opts.sequential ? 1u
                     : opts.threads ? opts.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(std::max<std::size_t>(runs.size(), 1)));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      auto report = run_single(runs[i], cfg, backends);
      persist(report);
      report.recovered = {};
      result.reports[i] = std::move(report);
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  result.runs_csv = opts.out_dir / "runs.csv";
  result.summary_csv = opts.out_dir / "summary.csv";
  write_text(result.runs_csv, runs_csv(result.reports, !opts.sequential));
  write_text(result.summary_csv, summary_csv(result.reports));
  return result;
}

}  // namespace phaseprior
