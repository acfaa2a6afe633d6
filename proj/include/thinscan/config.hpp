#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thinscan/error.hpp"
#include "thinscan/forward_model.hpp"
#include "thinscan/geometry.hpp"
#include "thinscan/imaging.hpp"

namespace thinscan {

// Curve description as written in the config. Kept raw so that invalid
// values can be reported instead of thrown.
struct CurveConfig {
  enum class Kind { Polynomial, Points, Point };
  Kind kind = Kind::Polynomial;
  std::vector<double> f;  // Polynomial: ascending coefficients
  std::vector<double> g;
  double z_lo = -0.5;
  double z_hi = 0.5;
  std::vector<Vec2> points;  // Points
  Vec2 center = Vec2::Zero();  // Point: short segment along x
  double length = 1e-3;
};

struct InclusionConfig {
  CurveConfig curve;
  double h = 0.015;
  double eps = 1.0;
  double mu = 1.0;
};

struct ModeConfig {
  bool plain = false;
  Eigen::Vector3d phi{1.0, 0.0, 1.0};
};

struct ProfileConfig {
  double max_radius = 1.0;
  double step = 0.01;
  int angles = 32;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<InclusionConfig> inclusions;
  Background background;
  int P = 24;
  int Q = 20;
  std::vector<int> K_values{10};
  double lambda_lo = 0.3;
  double lambda_hi = 0.7;
  FrequencySpacing spacing = FrequencySpacing::UniformOmega;
  std::vector<int> n_weights{0, 1, 2};
  std::vector<ModeConfig> modes{ModeConfig{}};
  std::optional<double> snr_db = 10.0;
  std::uint64_t seed = 1;
  GridSpec grid;
  double tau_rel = kDefaultTauRel;
  int quad_count = kDefaultQuadCount;
  double domain_radius = 1.0;
  ProfileConfig profile;
};

// Parses a JSON document. Missing keys take the defaults above; malformed
// values throw ConfigError listing every problem found.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Canonical JSON form; parse_config(to_json_text(c)) reproduces c.
std::string to_json_text(const ExperimentConfig& config);

// Empty iff the config is usable.
std::vector<Violation> validate_config(const ExperimentConfig& config);
// Throws ConfigError when validate_config reports anything.
void require_valid(const ExperimentConfig& config);

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
ExperimentConfig load_preset(std::string_view name);

SupportingCurve build_curve(const CurveConfig& curve);
std::vector<InclusionSpec> build_inclusions(const ExperimentConfig& config);
SteeringMode build_mode(const ModeConfig& mode);
FrequencySet build_frequencies(const ExperimentConfig& config, int K);
// Centre of the target when the config holds exactly one point inclusion.
std::optional<Vec2> point_target_center(const ExperimentConfig& config);

namespace detail {
// (name, JSON text) for every bundled preset; generated at build time.
const std::vector<std::pair<std::string, std::string>>& embedded_presets();
}  // namespace detail

}  // namespace thinscan
