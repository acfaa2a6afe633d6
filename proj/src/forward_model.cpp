#include "thinscan/forward_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "thinscan/error.hpp"

namespace thinscan {

namespace {

using cd = std::complex<double>;

double contrast(const Background& bg, const InclusionSpec& spec) {
  return (spec.eps - bg.eps0) / std::sqrt(bg.eps0 * bg.mu0);
}

// Per-inclusion quadrature data shared by the serial and parallel kernels.
struct Quadrature {
  std::vector<FrameSample> frames;
  std::vector<Mat2> tensors;
  double contrast;
};

std::vector<Quadrature> prepare(std::span<const InclusionSpec> inclusions, const Background& bg, int quad_count) {
  if (quad_count < 2) throw std::invalid_argument("assemble_msr: quad_count must be >= 2");
  std::vector<Quadrature> out;
  out.reserve(inclusions.size());
  for (const auto& inc : inclusions) {
    Quadrature q{sample_curve(inc.curve, quad_count), {}, contrast(bg, inc)};
    q.tensors.reserve(q.frames.size());
    for (const auto& f : q.frames) q.tensors.push_back(polarization_tensor(f, bg, inc));
    out.push_back(std::move(q));
  }
  return out;
}

cd entry(const std::vector<Quadrature>& quads, const Vec2& recv, const Vec2& inc, double omega) {
  cd acc{0.0, 0.0};
  const Vec2 k = omega * (recv - inc);
  for (const auto& q : quads) {
    for (std::size_t m = 0; m < q.frames.size(); ++m) {
      const auto& f = q.frames[m];
      const double amplitude = q.contrast + recv.dot(q.tensors[m] * inc);
      const double phase = -k.dot(f.point);
      acc += f.weight * amplitude * cd(std::cos(phase), std::sin(phase));
    }
  }
  return omega * omega * acc;
}

void validate_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("assemble_msr: omega must be > 0");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("read_msr_csv: bad number '" + text + "'");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DirectionSet make_directions(int P, int Q) {
  if (P < 3 || Q < 3) throw std::invalid_argument("make_directions: need P >= 3 and Q >= 3");
  using std::numbers::pi;
  DirectionSet d;
  d.receivers.reserve(P);
  d.incidents.reserve(Q);
  for (int j = 1; j <= P; ++j) d.receivers.emplace_back(std::cos(2.0 * pi * j / P), std::sin(2.0 * pi * j / P));
  for (int l = 1; l <= Q; ++l) d.incidents.emplace_back(-std::cos(2.0 * pi * l / Q), -std::sin(2.0 * pi * l / Q));
  return d;
}

FrequencySet::FrequencySet(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw std::invalid_argument("FrequencySet: need at least one frequency");
  for (std::size_t k = 0; k < omegas_.size(); ++k) {
    if (!(omegas_[k] > 0.0)) throw std::invalid_argument("FrequencySet: frequencies must be positive");
    if (k > 0 && !(omegas_[k] > omegas_[k - 1]))
      throw std::invalid_argument("FrequencySet: frequencies must be strictly increasing");
  }
}

FrequencySet FrequencySet::from_wavelengths(double lambda_lo, double lambda_hi, int K, FrequencySpacing spacing) {
  using std::numbers::pi;
  if (K < 1) throw std::invalid_argument("FrequencySet: K must be >= 1");
  if (!(lambda_lo > 0.0)) throw std::invalid_argument("FrequencySet: wavelengths must be positive");
  if (K == 1) {
    if (lambda_lo != lambda_hi) throw std::invalid_argument("FrequencySet: K = 1 needs lambda_lo == lambda_hi");
    return FrequencySet({2.0 * pi / lambda_lo});
  }
  if (!(lambda_lo < lambda_hi)) throw std::invalid_argument("FrequencySet: need lambda_lo < lambda_hi");
  std::vector<double> omegas(K);
  const double w_lo = 2.0 * pi / lambda_hi;
  const double w_hi = 2.0 * pi / lambda_lo;
  for (int k = 0; k < K; ++k) {
    const double s = static_cast<double>(k) / (K - 1);
    if (spacing == FrequencySpacing::UniformOmega) {
      omegas[k] = w_lo + s * (w_hi - w_lo);
    } else {
      // Uniform in wavelength, from lambda_hi down to lambda_lo.
      omegas[k] = 2.0 * pi / (lambda_hi + s * (lambda_lo - lambda_hi));
    }
  }
  omegas.front() = w_lo;
  omegas.back() = w_hi;
  return FrequencySet(std::move(omegas));
}

MsrMatrix assemble_msr(std::span<const InclusionSpec> inclusions, const Background& bg, const DirectionSet& dirs,
                       double omega, int quad_count) {
  validate_omega(omega);
  const auto quads = prepare(inclusions, bg, quad_count);
  const int P = dirs.P();
  const int Q = dirs.Q();
  MsrMatrix out{omega, Eigen::MatrixXcd(P, Q)};
#pragma omp parallel for schedule(static)
  for (int j = 0; j < P; ++j)
    for (int l = 0; l < Q; ++l) out.entries(j, l) = entry(quads, dirs.receivers[j], dirs.incidents[l], omega);
  return out;
}

MsrMatrix assemble_msr(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs, double omega,
                       int quad_count) {
  return assemble_msr(std::span<const InclusionSpec>(&inclusion, 1), bg, dirs, omega, quad_count);
}

MsrMatrix assemble_msr_serial(std::span<const InclusionSpec> inclusions, const Background& bg,
                              const DirectionSet& dirs, double omega, int quad_count) {
  validate_omega(omega);
  const auto quads = prepare(inclusions, bg, quad_count);
  MsrMatrix out{omega, Eigen::MatrixXcd(dirs.P(), dirs.Q())};
  for (int j = 0; j < dirs.P(); ++j)
    for (int l = 0; l < dirs.Q(); ++l) out.entries(j, l) = entry(quads, dirs.receivers[j], dirs.incidents[l], omega);
  return out;
}

MsrFactorization factorize_msr(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs,
                               double omega, int rayleigh_count) {
  validate_omega(omega);
  const int M = rayleigh_count;
  MsrFactorization f;
  f.points = rayleigh_points(inclusion.curve, M);
  const double length = inclusion.curve.arc_length();
  const double scale = omega * omega * length / M;
  const int P = dirs.P();
  const int Q = dirs.Q();
  f.B = Eigen::MatrixXcd::Zero(P, 3 * M);
  f.H = Eigen::MatrixXcd::Zero(3 * M, Q);
  f.D = Eigen::MatrixXd::Zero(3 * M, 3 * M);
  const double c = contrast(bg, inclusion);
  const double lt = tangential_eigenvalue(bg, inclusion);
  const double ln = normal_eigenvalue(bg, inclusion);
  for (int m = 0; m < M; ++m) {
    const auto& x = f.points[m];
    for (int j = 0; j < P; ++j) {
      const Vec2& v = dirs.receivers[j];
      const cd e = std::polar(1.0, -omega * v.dot(x.point));
      f.B(j, 3 * m) = e;
      f.B(j, 3 * m + 1) = v.dot(x.tangent) * e;
      f.B(j, 3 * m + 2) = v.dot(x.normal) * e;
    }
    for (int l = 0; l < Q; ++l) {
      const Vec2& t = dirs.incidents[l];
      const cd e = std::polar(1.0, omega * t.dot(x.point));
      f.H(3 * m, l) = e;
      f.H(3 * m + 1, l) = t.dot(x.tangent) * e;
      f.H(3 * m + 2, l) = t.dot(x.normal) * e;
    }
    f.D(3 * m, 3 * m) = scale * c;
    f.D(3 * m + 1, 3 * m + 1) = scale * lt;
    f.D(3 * m + 2, 3 * m + 2) = scale * ln;
  }
  return f;
}

MsrMatrix assemble_msr_rayleigh(const InclusionSpec& inclusion, const Background& bg, const DirectionSet& dirs,
                                double omega, int rayleigh_count) {
  validate_omega(omega);
  const auto points = rayleigh_points(inclusion.curve, rayleigh_count);
  const double scale = omega * omega * inclusion.curve.arc_length() / rayleigh_count;
  const double c = contrast(bg, inclusion);
  const double lt = tangential_eigenvalue(bg, inclusion);
  const double ln = normal_eigenvalue(bg, inclusion);
  MsrMatrix out{omega, Eigen::MatrixXcd::Zero(dirs.P(), dirs.Q())};
  for (int j = 0; j < dirs.P(); ++j) {
    const Vec2& v = dirs.receivers[j];
    for (int l = 0; l < dirs.Q(); ++l) {
      const Vec2& t = dirs.incidents[l];
      cd acc{0.0, 0.0};
      for (const auto& x : points) {
        const double amp = c + lt * v.dot(x.tangent) * t.dot(x.tangent) + ln * v.dot(x.normal) * t.dot(x.normal);
        acc += amp * std::polar(1.0, -omega * (v - t).dot(x.point));
      }
      out.entries(j, l) = scale * acc;
    }
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

MsrMatrix add_awgn(const MsrMatrix& matrix, const NoiseSpec& noise) {
  if (!matrix.entries.allFinite()) throw DomainError("add_awgn: matrix has non-finite entries");
  const double signal = matrix.entries.cwiseAbs2().mean();
  const double variance = signal / std::pow(10.0, noise.snr_db / 10.0);
  const double sd = std::sqrt(variance / 2.0);  // per real component

  std::mt19937_64 rng(noise.seed);
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };

  MsrMatrix out = matrix;
  for (Eigen::Index j = 0; j < out.entries.rows(); ++j) {
    for (Eigen::Index l = 0; l < out.entries.cols(); ++l) {
      const double r = std::sqrt(-2.0 * std::log(uniform()));
      const double a = 2.0 * std::numbers::pi * uniform();
      out.entries(j, l) += cd(sd * r * std::cos(a), sd * r * std::sin(a));
    }
  }
  return out;
}

void write_msr_csv(std::ostream& out, const MsrMatrix& matrix) {
  const auto P = matrix.entries.rows();
  const auto Q = matrix.entries.cols();
  out << P << ',' << Q << ',' << fmt17(matrix.omega) << '\n';
  for (Eigen::Index j = 0; j < P; ++j)
    for (Eigen::Index l = 0; l < Q; ++l)
      out << j + 1 << ',' << l + 1 << ',' << fmt17(matrix.entries(j, l).real()) << ','
          << fmt17(matrix.entries(j, l).imag()) << '\n';
}

MsrMatrix read_msr_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_msr_csv: missing header");
  const auto head = split(line);
  if (head.size() != 3) throw std::runtime_error("read_msr_csv: header must be P,Q,omega");
  const int P = std::stoi(head[0]);
  const int Q = std::stoi(head[1]);
  if (P <= 0 || Q <= 0) throw std::runtime_error("read_msr_csv: bad dimensions");
  MsrMatrix m{parse_double(head[2]), Eigen::MatrixXcd::Zero(P, Q)};
  std::vector<bool> seen(static_cast<std::size_t>(P) * Q, false);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw std::runtime_error("read_msr_csv: row must be j,l,re,im");
    const int j = std::stoi(cells[0]) - 1;
    const int l = std::stoi(cells[1]) - 1;
    if (j < 0 || j >= P || l < 0 || l >= Q) throw std::runtime_error("read_msr_csv: index out of range");
    m.entries(j, l) = cd(parse_double(cells[2]), parse_double(cells[3]));
    seen[static_cast<std::size_t>(j) * Q + l] = true;
    ++rows;
  }
  if (rows != P * Q || std::find(seen.begin(), seen.end(), false) != seen.end())
    throw std::runtime_error("read_msr_csv: expected exactly P*Q distinct rows");
  return m;
}

}  // namespace thinscan
