#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "thinscan/geometry.hpp"

namespace thinscan {

// Receiving directions vartheta_j = [cos 2 pi j/P, sin 2 pi j/P] and incident
// directions theta_l = -[cos 2 pi l/Q, sin 2 pi l/Q], j, l starting at 1.
struct DirectionSet {
  std::vector<Vec2> receivers;
  std::vector<Vec2> incidents;

  int P() const noexcept { return static_cast<int>(receivers.size()); }
  int Q() const noexcept { return static_cast<int>(incidents.size()); }
};

DirectionSet make_directions(int P, int Q);

enum class FrequencySpacing { UniformOmega, UniformLambda };

// Strictly increasing angular frequencies.
class FrequencySet {
 public:
  explicit FrequencySet(std::vector<double> omegas);

  // K frequencies between 2 pi / lambda_hi and 2 pi / lambda_lo. K = 1
  // requires lambda_lo == lambda_hi.
  static FrequencySet from_wavelengths(double lambda_lo, double lambda_hi, int K, FrequencySpacing spacing);

  const std::vector<double>& omegas() const noexcept { return omegas_; }
  int size() const noexcept { return static_cast<int>(omegas_.size()); }
  double lowest() const { return omegas_.front(); }
  double highest() const { return omegas_.back(); }

 private:
  std::vector<double> omegas_;
};

struct MsrMatrix {
  double omega = 0.0;
  Eigen::MatrixXcd entries;  // P x Q
};

struct NoiseSpec {
  double snr_db = 10.0;
  std::uint64_t seed = 0;
};

constexpr int kDefaultQuadCount = 400;

// A_jl = omega^2 sum over inclusions of the integral over gamma of
//   {(eps - eps0)/sqrt(eps0 mu0) + vartheta_j . M(x) . theta_l}
//   exp(-i omega (vartheta_j - theta_l) . x)
// by trapezoidal arc-length quadrature with quad_count nodes per curve.
// Rows are filled in parallel.
MsrMatrix assemble_msr(std::span<const InclusionSpec> inclusions, const Background& bg, const DirectionSet& dirs,
                       double omega, int quad_count = kDefaultQuadCount);
MsrMatrix assemble_msr(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs, double omega,
                       int quad_count = kDefaultQuadCount);

// Single-threaded reference of assemble_msr; bit-identical results.
MsrMatrix assemble_msr_serial(std::span<const InclusionSpec> inclusions, const Background& bg,
                              const DirectionSet& dirs, double omega, int quad_count = kDefaultQuadCount);

// B (P x 3M), D (3M x 3M block diagonal), H (3M x Q) at M Rayleigh points,
// with A ~ B D H. Each D block is (omega^2 L / M) diag(contrast, lambda_tau,
// lambda_eta) in the local (tangent, normal) frame.
struct MsrFactorization {
  Eigen::MatrixXcd B;
  Eigen::MatrixXd D;
  Eigen::MatrixXcd H;
  std::vector<FrameSample> points;
};

MsrFactorization factorize_msr(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs,
                               double omega, int rayleigh_count);

// The M-point sum approximation of the MSR entries, evaluated directly
// from the formula (no matrix products).
MsrMatrix assemble_msr_rayleigh(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs,
                                double omega, int rayleigh_count);

// A + N with i.i.d. circular complex Gaussian N of per-entry variance
// mean(|A_jl|^2) / 10^(snr_db / 10). Normals come from mt19937_64 through
// Box-Muller, so output depends only on (matrix, seed).
MsrMatrix add_awgn(const MsrMatrix& matrix, const NoiseSpec& noise);

// Derives a per-stream seed from a base seed and stream indices.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// CSV: first row "P,Q,omega" holding values, then P*Q rows "j,l,re,im"
// (1-based) with 17 significant digits.
void write_msr_csv(std::ostream& out, const MsrMatrix& matrix);
MsrMatrix read_msr_csv(std::istream& in);

}  // namespace thinscan
