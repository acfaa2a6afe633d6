#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thinscan/config.hpp"
#include "thinscan/forward_model.hpp"
#include "thinscan/imaging.hpp"
#include "thinscan/metrics.hpp"
#include "thinscan/theory.hpp"

namespace thinscan {

// MSR matrices for the K-frequency set of the config, with noise added per
// frequency from mix_seed(seed, K, k) when snr_db is set.
std::vector<MsrMatrix> simulate(const ExperimentConfig& config, int K);

std::vector<TruncatedSvd> decompose(const std::vector<MsrMatrix>& matrices, double tau_rel);

// msr_K<K>_k<k>.csv, k from 1.
std::string msr_filename(int K, int k);
// Reads the K files written for one frequency count.
std::vector<MsrMatrix> read_msr_dir(const std::filesystem::path& dir, int K);

struct ImageRecord {
  std::string basename;
  std::string mode;
  int K = 0;
  int n = 0;
  ImageMap image;
  Peak peak;
  double top_fraction = 0.0;
  double sidelobe = 0.0;
  std::vector<double> inclusion_max;  // peak intensity near each inclusion
  std::vector<int> m_counts;
  std::optional<RadialProfile> computed_profile;
  std::optional<RadialProfile> predicted_profile;
  std::optional<double> profile_score;
};

// Image, metrics and (for point targets) profiles for every mode and n.
std::vector<ImageRecord> image_stage(const ExperimentConfig& config, const std::vector<TruncatedSvd>& svds,
                                     const DirectionSet& dirs);

// Predicted profile for a point target at the config's frequency band.
RadialProfile predicted_profile(const ExperimentConfig& config, int K, int n);
std::vector<double> profile_radii(const ProfileConfig& profile);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string config_hash;  // FNV-1a 64 of the canonical config JSON, hex
  std::uint64_t seed = 0;
  std::string version;
  std::string eigen_version;
  std::string compiler;
  std::vector<std::string> files;  // relative to the output directory
  std::vector<StageTiming> stages;
};

struct ExperimentResult {
  RunManifest manifest;
  std::vector<ImageRecord> images;
};

std::string config_hash(const ExperimentConfig& config);

// Full pipeline. Throws ConfigError before doing any work when the config
// is invalid. With an output directory, writes MSR CSVs, image CSV/PGM
// pairs, profile CSVs, per-image metrics JSON, config.json and
// manifest.json into it.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
std::string metrics_json(const ImageRecord& record);

}  // namespace thinscan
