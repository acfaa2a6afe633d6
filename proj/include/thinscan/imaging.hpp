#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "thinscan/forward_model.hpp"
#include "thinscan/geometry.hpp"

namespace thinscan {

constexpr double kDefaultTauRel = 0.01;

// Full SVD of one MSR matrix. The signal subspace is the first m_count
// singular pairs, those with sigma_m >= tau_rel * sigma_1.
struct TruncatedSvd {
  double omega = 0.0;
  std::vector<double> sigmas;  // descending
  Eigen::MatrixXcd left;       // P x r, column m is U_m
  Eigen::MatrixXcd right;      // Q x r, column m is V_m
  int m_count = 0;
};

// Throws std::invalid_argument unless 0 < tau_rel < 1. An all-zero matrix
// yields m_count = 0.
TruncatedSvd truncated_svd(const MsrMatrix& matrix, double tau_rel = kDefaultTauRel);

// Steering entries weighted by phi . [1, d] for each direction d.
struct PhiWeighted {
  Eigen::Vector3d phi;
};
// Steering entries exp(-i omega vartheta . z) and exp(i omega theta . z).
struct PlainExponential {};

using SteeringMode = std::variant<PhiWeighted, PlainExponential>;

// Throws std::invalid_argument for phi = 0.
SteeringMode phi_weighted(const Eigen::Vector3d& phi);
// Short label for file names, e.g. "plain" or "phi101".
std::string mode_label(const SteeringMode& mode);

struct SteeringPair {
  Eigen::VectorXcd w_e;  // unit P-vector
  Eigen::VectorXcd w_f;  // unit Q-vector
};

// Throws DegenerateSteeringError when E or F has zero norm.
SteeringPair steering_vectors(const Vec2& z, double omega, const DirectionSet& dirs, const SteeringMode& mode);

// | sum_k sum_{m <= M_k} omega_k^n (W_E^* U_m)(W_F^* conj(V_m)) |
// Throws std::invalid_argument when svds is empty or mismatched and
// NumericalError when no frequency has a signal subspace.
double functional_value(const Vec2& z, std::span<const TruncatedSvd> svds, const DirectionSet& dirs,
                        const SteeringMode& mode, int n);

struct GridSpec {
  double x_lo = -1.1;
  double x_hi = 1.1;
  double y_lo = -1.1;
  double y_hi = 1.1;
  int nx = 128;
  int ny = 128;

  double dx() const { return (x_hi - x_lo) / nx; }
  double dy() const { return (y_hi - y_lo) / ny; }
  Vec2 cell_center(int i, int j) const { return {x_lo + (i + 0.5) * dx(), y_lo + (j + 0.5) * dy()}; }
};

struct ImageMap {
  GridSpec grid;
  std::vector<double> values;  // values[i * ny + j], i along x, j along y
  int n = 0;
  int K = 0;
  std::string mode;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.ny + j]; }
  double max() const;
  // Values divided by max(); all zeros stay zero.
  std::vector<double> normalized() const;
};

// Evaluates functional_value at every cell centre, cells in parallel.
ImageMap compute_image(std::span<const TruncatedSvd> svds, const DirectionSet& dirs, const SteeringMode& mode, int n,
                       const GridSpec& grid);
// Single-threaded reference of compute_image; bit-identical results.
ImageMap compute_image_serial(std::span<const TruncatedSvd> svds, const DirectionSet& dirs, const SteeringMode& mode,
                              int n, const GridSpec& grid);

// "x,y,value" rows with max-normalized values.
void write_image_csv(std::ostream& out, const ImageMap& image);
// Binary 8-bit PGM (P5), row-major with the top row at max y.
void write_image_pgm(std::ostream& out, const ImageMap& image);
// <tag>_n<weight>_K<count>
std::string image_basename(const std::string& tag, int n, int K);

}  // namespace thinscan
