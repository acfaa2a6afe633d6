// thinscan command line: simulate MSR data, image it, compare against the
// Bessel-structure predictions.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "thinscan/config.hpp"
#include "thinscan/error.hpp"
#include "thinscan/pipeline.hpp"
#include "thinscan/special_functions.hpp"

namespace fs = std::filesystem;
using namespace thinscan;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir = "thinscan_out";
  std::optional<std::uint64_t> seed;
};

ExperimentConfig resolve_config(const CommonOptions& opts) {
  if (opts.config_path.empty() == opts.preset.empty()) throw ConfigError("give exactly one of --config or --preset");
  ExperimentConfig cfg;
  if (!opts.preset.empty()) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), opts.preset) == names.end()) {
      std::string known;
      for (const auto& n : names) known += " " + n;
      throw ConfigError("unknown preset " + opts.preset + "; available:" + known);
    }
    cfg = load_preset(opts.preset);
  } else {
    cfg = load_config_file(opts.config_path);
  }
  if (opts.seed) cfg.seed = *opts.seed;
  require_valid(cfg);
  return cfg;
}

fs::path output_dir(const CommonOptions& opts) {
  if (const char* env = std::getenv("THINSCAN_OUT"); env && *env) return env;
  return opts.out_dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_simulate(const CommonOptions& opts) {
  const auto cfg = resolve_config(opts);
  const auto dir = output_dir(opts);
  fs::create_directories(dir);
  RunManifest man;
  man.config_hash = config_hash(cfg);
  man.seed = cfg.seed;
  man.version = THINSCAN_VERSION;
  write_file(dir / "config.json", to_json_text(cfg) + "\n");
  man.files.push_back("config.json");
  for (int K : cfg.K_values) {
    const auto msrs = simulate(cfg, K);
    for (int k = 0; k < K; ++k) {
      std::ofstream out(dir / msr_filename(K, k + 1));
      write_msr_csv(out, msrs[static_cast<std::size_t>(k)]);
      man.files.push_back(msr_filename(K, k + 1));
    }
  }
  man.files.push_back("manifest.json");
  write_manifest(dir / "manifest.json", man);
  std::cout << "wrote " << man.files.size() << " files to " << dir.string() << "\n";
  return 0;
}

int cmd_image(const CommonOptions& opts, const std::string& msr_dir) {
  const auto cfg = resolve_config(opts);
  const auto dir = output_dir(opts);
  const fs::path src = msr_dir.empty() ? dir : fs::path(msr_dir);
  fs::create_directories(dir);
  const auto dirs = make_directions(cfg.P, cfg.Q);
  for (int K : cfg.K_values) {
    const auto svds = decompose(read_msr_dir(src, K), cfg.tau_rel);
    for (const auto& r : image_stage(cfg, svds, dirs)) {
      std::ofstream csv(dir / (r.basename + ".csv"));
      write_image_csv(csv, r.image);
      std::ofstream pgm(dir / (r.basename + ".pgm"), std::ios::binary);
      write_image_pgm(pgm, r.image);
      write_file(dir / (r.basename + "_metrics.json"), metrics_json(r));
      std::cout << r.basename << ": top5%-near-curve " << r.top_fraction << ", sidelobe " << r.sidelobe << "\n";
    }
  }
  return 0;
}

int cmd_predict(const CommonOptions& opts) {
  const auto cfg = resolve_config(opts);
  const auto dir = output_dir(opts);
  fs::create_directories(dir);
  for (int K : cfg.K_values) {
    if (K < 2) continue;
    for (int n : cfg.n_weights) {
      const auto p = predicted_profile(cfg, K, n);
      const auto name = "predicted_n" + std::to_string(n) + "_K" + std::to_string(K) + ".csv";
      std::ofstream out(dir / name);
      out << "r,predicted\n";
      char buf[64];
      for (std::size_t i = 0; i < p.radii.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.radii[i], p.values[i] / p.values.front());
        out << buf;
      }
      std::cout << "wrote " << (dir / name).string() << "\n";
    }
  }
  return 0;
}

int cmd_compare(const CommonOptions& opts) {
  const auto cfg = resolve_config(opts);
  if (!point_target_center(cfg)) throw ConfigError("compare needs a config with a single point inclusion");
  const auto dir = output_dir(opts);
  fs::create_directories(dir);
  const auto dirs = make_directions(cfg.P, cfg.Q);
  const auto center = *point_target_center(cfg);
  for (int K : cfg.K_values) {
    if (K < 2) continue;
    const auto svds = decompose(simulate(cfg, K), cfg.tau_rel);
    for (const auto& mc : cfg.modes) {
      const auto mode = build_mode(mc);
      for (int n : cfg.n_weights) {
        auto f = [&](const Vec2& z) { return functional_value(z, svds, dirs, mode, n); };
        const auto computed = computed_radial_profile(f, center, profile_radii(cfg.profile), cfg.profile.angles);
        const auto predicted = predicted_profile(cfg, K, n);
        std::string tag = cfg.name;
        if (cfg.modes.size() > 1) tag += "_" + mode_label(mode);
        const auto name = image_basename(tag, n, K) + "_profile.csv";
        std::ofstream out(dir / name);
        write_profile_csv(out, computed, predicted);
        std::cout << name << ": profile_match_score " << profile_match_score(computed, predicted) << "\n";
      }
    }
  }
  return 0;
}

int cmd_run(const CommonOptions& opts) {
  const auto cfg = resolve_config(opts);
  const auto dir = output_dir(opts);
  const auto result = run_experiment(cfg, dir);
  for (const auto& r : result.images) {
    std::cout << r.basename << ": top5%-near-curve " << r.top_fraction << ", sidelobe " << r.sidelobe;
    if (r.profile_score) std::cout << ", profile_match_score " << *r.profile_score;
    std::cout << "\n";
  }
  std::cout << "wrote " << result.manifest.files.size() << " files to " << dir.string() << "\n";
  return 0;
}

// Numerical identity suite for the special functions.
int cmd_bessel_check(std::uint64_t seed) {
  using special::BesselOrder;
  using special::bessel_j;
  bool ok = true;
  auto report = [&ok](const std::string& what, double err, double tol) {
    const bool pass = err <= tol;
    ok = ok && pass;
    std::cout << (pass ? "ok   " : "FAIL ") << what << ": max error " << err << " (tol " << tol << ")\n";
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    auto bracket = [](double t) {
      const double j0 = bessel_j(BesselOrder(0), t), j1 = bessel_j(BesselOrder(1), t);
      return t * (j0 * j0 + j1 * j1);
    };
    const double rhs = bracket(b) - bracket(a) + special::j1_squared_integral(a, b);
    worst = std::max(worst, std::abs(special::j0_squared_integral(a, b) - rhs));
  }
  report("integral J0^2 = [t(J0^2 + J1^2)] + integral J1^2, 20 random intervals in [0, 60]", worst, 1e-8);

  worst = 0.0;
  for (int nu = 1; nu <= 19; ++nu) {
    for (double t = 0.5; t <= 50.0; t += 0.25) {
      const double lhs = bessel_j(BesselOrder(nu - 1), t) + bessel_j(BesselOrder(nu + 1), t);
      worst = std::max(worst, std::abs(lhs - 2.0 * nu / t * bessel_j(BesselOrder(nu), t)));
    }
  }
  report("three-term recurrence on [0.5, 50]", worst, 1e-9);

  worst = 0.0;
  for (double a : {0.0, 0.5, 2.0}) {
    for (double b : {3.0, 5.0}) {
      const auto got = special::oscillatory_bessel_integral(a, b, BesselOrder(0));
      const auto want = special::oscillatory_bessel_integral_closed_form(a, b, BesselOrder(0));
      worst = std::max(worst, std::abs(got - want));
    }
  }
  report("integral_0^inf exp(iat) J0(bt) dt against closed form", worst, 1e-3);
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thinscan: multi-frequency subspace migration imaging of thin inclusions"};
  app.set_version_flag("--version", std::string(THINSCAN_VERSION));
  app.require_subcommand(1);

  CommonOptions opts;
  std::string msr_dir;
  std::uint64_t check_seed = 2024;

  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "Experiment config JSON file");
    sub->add_option("--preset", opts.preset, "Bundled preset name");
    sub->add_option("--out-dir", opts.out_dir, "Output directory (THINSCAN_OUT overrides)");
    sub->add_option("--seed", opts.seed, "Override the config seed");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Synthesize MSR matrices and write them as CSV");
  add_common(simulate_cmd);
  auto* image_cmd = app.add_subcommand("image", "Image previously simulated MSR CSVs");
  add_common(image_cmd);
  image_cmd->add_option("--msr-dir", msr_dir, "Directory holding msr_K*_k*.csv (default: output directory)");
  auto* predict_cmd = app.add_subcommand("predict", "Write predicted radial profiles");
  add_common(predict_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "Score point-target profiles against the prediction");
  add_common(compare_cmd);
  auto* run_cmd = app.add_subcommand("run", "Full pipeline: simulate, image, compare, manifest");
  add_common(run_cmd);
  auto* check_cmd = app.add_subcommand("bessel-check", "Run the special-function identity suite");
  check_cmd->add_option("--seed", check_seed, "Seed for the random intervals");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return cmd_simulate(opts);
    if (*image_cmd) return cmd_image(opts, msr_dir);
    if (*predict_cmd) return cmd_predict(opts);
    if (*compare_cmd) return cmd_compare(opts);
    if (*run_cmd) return cmd_run(opts);
    if (*check_cmd) return cmd_bessel_check(check_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateSteeringError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
