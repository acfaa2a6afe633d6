#include "thinscan/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace thinscan {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(std::vector<StageTiming>& sink, std::string stage)
      : sink_(sink), stage_(std::move(stage)), start_(Clock::now()) {}
  ~Stopwatch() { sink_.push_back({stage_, std::chrono::duration<double>(Clock::now() - start_).count()}); }

 private:
  std::vector<StageTiming>& sink_;
  std::string stage_;
  Clock::time_point start_;
};

class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, std::vector<std::string>& files) : dir_(std::move(dir)), files_(files) {
    std::filesystem::create_directories(dir_);
  }

  template <class Writer>
  void write(const std::string& name, Writer&& writer, bool binary = false) {
    std::ofstream out(dir_ / name, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    writer(out);
    out.close();
    if (!out) throw std::runtime_error("failed writing " + (dir_ / name).string());
    files_.push_back(name);
  }

  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string>& files_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string compiler_string() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::vector<MsrMatrix> simulate(const ExperimentConfig& config, int K) {
  const auto inclusions = build_inclusions(config);
  const auto dirs = make_directions(config.P, config.Q);
  const auto freqs = build_frequencies(config, K);
  std::vector<MsrMatrix> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    auto m = assemble_msr(inclusions, config.background, dirs, freqs.omegas()[static_cast<std::size_t>(k)],
                          config.quad_count);
    if (config.snr_db) m = add_awgn(m, {*config.snr_db, mix_seed(config.seed, static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(k))});
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<TruncatedSvd> decompose(const std::vector<MsrMatrix>& matrices, double tau_rel) {
  std::vector<TruncatedSvd> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) out.push_back(truncated_svd(m, tau_rel));
  return out;
}

std::string msr_filename(int K, int k) { return "msr_K" + std::to_string(K) + "_k" + std::to_string(k) + ".csv"; }

std::vector<MsrMatrix> read_msr_dir(const std::filesystem::path& dir, int K) {
  std::vector<MsrMatrix> out;
  for (int k = 1; k <= K; ++k) {
    const auto path = dir / msr_filename(K, k);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    out.push_back(read_msr_csv(in));
  }
  return out;
}

std::vector<double> profile_radii(const ProfileConfig& profile) {
  std::vector<double> radii;
  const int steps = static_cast<int>(std::floor(profile.max_radius / profile.step + 1e-9));
  for (int i = 0; i <= steps; ++i) radii.push_back(i * profile.step);
  return radii;
}

RadialProfile predicted_profile(const ExperimentConfig& config, int K, int n) {
  const auto freqs = build_frequencies(config, K);
  PredictionConfig pc;
  pc.omega_1 = freqs.lowest();
  pc.omega_K = freqs.highest();
  pc.K = K;
  pc.n = n;
  pc.Q = config.Q;
  pc.include_j1_tail = true;
  return predict_profile(profile_radii(config.profile), pc);
}

std::vector<ImageRecord> image_stage(const ExperimentConfig& config, const std::vector<TruncatedSvd>& svds,
                                     const DirectionSet& dirs) {
  const auto inclusions = build_inclusions(config);
  std::vector<SupportingCurve> curves;
  for (const auto& inc : inclusions) curves.push_back(inc.curve);
  const CurveDistance all(curves);
  std::vector<CurveDistance> each;
  for (const auto& c : curves) each.emplace_back(c);
  MetricOptions opts;
  opts.domain_radius = config.domain_radius;
  const auto target = point_target_center(config);
  const int K = static_cast<int>(svds.size());

  std::vector<int> m_counts;
  for (const auto& s : svds) m_counts.push_back(s.m_count);

  std::vector<ImageRecord> out;
  for (const auto& mc : config.modes) {
    const auto mode = build_mode(mc);
    std::string tag = config.name;
    if (config.modes.size() > 1) tag += "_" + mode_label(mode);
    for (int n : config.n_weights) {
      ImageRecord rec;
      rec.basename = image_basename(tag, n, K);
      rec.mode = mode_label(mode);
      rec.K = K;
      rec.n = n;
      rec.image = compute_image(svds, dirs, mode, n, config.grid);
      rec.peak = peak_location(rec.image);
      rec.top_fraction = top_fraction_near_curve(rec.image, all, opts);
      rec.sidelobe = sidelobe_mean(rec.image, all, opts);
      for (const auto& d : each) rec.inclusion_max.push_back(max_near(rec.image, d, opts.tube));
      rec.m_counts = m_counts;
      if (target && K > 1) {
        auto f = [&](const Vec2& z) { return functional_value(z, svds, dirs, mode, n); };
        rec.computed_profile = computed_radial_profile(f, *target, profile_radii(config.profile), config.profile.angles);
        rec.predicted_profile = predicted_profile(config, K, n);
        rec.profile_score = profile_match_score(*rec.computed_profile, *rec.predicted_profile);
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json_text(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

std::string metrics_json(const ImageRecord& r) {
  json j;
  j["basename"] = r.basename;
  j["mode"] = r.mode;
  j["K"] = r.K;
  j["n"] = r.n;
  j["peak"] = {{"x", r.peak.point.x()}, {"y", r.peak.point.y()}, {"value", r.peak.value}};
  j["top_fraction_near_curve"] = r.top_fraction;
  j["sidelobe_mean"] = r.sidelobe;
  j["inclusion_max"] = r.inclusion_max;
  j["m_counts"] = r.m_counts;
  j["profile_match_score"] = r.profile_score ? json(*r.profile_score) : json(nullptr);
  return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["versions"] = {{"thinscan", m.version}, {"eigen", m.eigen_version}, {"compiler", m.compiler}};
  j["files"] = m.files;
  json stages = json::array();
  for (const auto& s : m.stages) stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  j["stages"] = stages;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::optional<std::filesystem::path>& out_dir) {
  require_valid(config);
  ExperimentResult result;
  auto& man = result.manifest;
  man.config_hash = config_hash(config);
  man.seed = config.seed;
  man.version = THINSCAN_VERSION;
  man.eigen_version = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  man.compiler = compiler_string();

  std::optional<OutputDir> out;
  if (out_dir) {
    out.emplace(*out_dir, man.files);
    out->write("config.json", [&](std::ostream& os) { os << to_json_text(config) << "\n"; });
  }

  const auto dirs = make_directions(config.P, config.Q);
  for (int K : config.K_values) {
    const std::string suffix = "_K" + std::to_string(K);
    std::vector<MsrMatrix> msrs;
    {
      Stopwatch sw(man.stages, "simulate" + suffix);
      msrs = simulate(config, K);
    }
    if (out) {
      Stopwatch sw(man.stages, "write_msr" + suffix);
      for (int k = 0; k < K; ++k)
        out->write(msr_filename(K, k + 1), [&](std::ostream& os) { write_msr_csv(os, msrs[static_cast<std::size_t>(k)]); });
    }
    std::vector<TruncatedSvd> svds;
    {
      Stopwatch sw(man.stages, "svd" + suffix);
      svds = decompose(msrs, config.tau_rel);
    }
    std::vector<ImageRecord> records;
    {
      Stopwatch sw(man.stages, "image" + suffix);
      records = image_stage(config, svds, dirs);
    }
    if (out) {
      Stopwatch sw(man.stages, "write_images" + suffix);
      for (const auto& r : records) {
        out->write(r.basename + ".csv", [&](std::ostream& os) { write_image_csv(os, r.image); });
        out->write(r.basename + ".pgm", [&](std::ostream& os) { write_image_pgm(os, r.image); }, true);
        if (r.computed_profile)
          out->write(r.basename + "_profile.csv",
                     [&](std::ostream& os) { write_profile_csv(os, *r.computed_profile, *r.predicted_profile); });
        out->write(r.basename + "_metrics.json", [&](std::ostream& os) { os << metrics_json(r); });
      }
    }
    for (auto& r : records) result.images.push_back(std::move(r));
  }

  if (out) {
    man.files.push_back("manifest.json");
    write_manifest(out->path() / "manifest.json", man);
  }
  return result;
}

}  // namespace thinscan
