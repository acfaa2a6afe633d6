#include "thinscan/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "thinscan/error.hpp"

namespace thinscan {

namespace {

using cd = std::complex<double>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Per-direction amplitude phi . [1, d], or 1 in plain mode.
double amplitude(const SteeringMode& mode, const Vec2& d) {
  return std::visit(overloaded{[&](const PhiWeighted& w) { return w.phi[0] + w.phi[1] * d.x() + w.phi[2] * d.y(); },
                               [](const PlainExponential&) { return 1.0; }},
                    mode);
}

void fill_steering(Eigen::VectorXcd& out, std::span<const Vec2> dirs, double sign, double omega, const Vec2& z,
                   const SteeringMode& mode) {
  double norm2 = 0.0;
  for (std::size_t p = 0; p < dirs.size(); ++p) {
    const double a = amplitude(mode, dirs[p]);
    out[static_cast<Eigen::Index>(p)] = a * std::polar(1.0, sign * omega * dirs[p].dot(z));
    norm2 += a * a;
  }
  if (!(norm2 > 0.0)) throw DegenerateSteeringError("steering vector has zero norm for this phi");
  out /= std::sqrt(norm2);
}

void check_svds(std::span<const TruncatedSvd> svds, const DirectionSet& dirs) {
  if (svds.empty()) throw std::invalid_argument("functional_value: no frequencies");
  bool any = false;
  for (const auto& s : svds) {
    if (s.left.rows() != dirs.P() || s.right.rows() != dirs.Q())
      throw std::invalid_argument("functional_value: SVD dimensions do not match the direction set");
    any = any || s.m_count > 0;
  }
  if (!any) throw NumericalError("functional_value: empty signal subspace at every frequency");
}

// Functional evaluation with caller-owned scratch vectors, shared by the
// serial and parallel image kernels.
double evaluate(const Vec2& z, std::span<const TruncatedSvd> svds, const DirectionSet& dirs, const SteeringMode& mode,
                int n, Eigen::VectorXcd& w_e, Eigen::VectorXcd& w_f) {
  cd total{0.0, 0.0};
  for (const auto& s : svds) {
    if (s.m_count == 0) continue;
    fill_steering(w_e, dirs.receivers, -1.0, s.omega, z, mode);
    fill_steering(w_f, dirs.incidents, 1.0, s.omega, z, mode);
    cd per_freq{0.0, 0.0};
    for (int m = 0; m < s.m_count; ++m) {
      // W_E^* U_m and W_F^* conj(V_m)
      const cd a = w_e.dot(s.left.col(m));
      const cd b = w_f.dot(s.right.col(m).conjugate());
      per_freq += a * b;
    }
    total += std::pow(s.omega, n) * per_freq;
  }
  return std::abs(total);
}

ImageMap blank_image(std::span<const TruncatedSvd> svds, const SteeringMode& mode, int n, const GridSpec& grid) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("compute_image: need nx, ny >= 2");
  if (!(grid.x_lo < grid.x_hi) || !(grid.y_lo < grid.y_hi)) throw std::invalid_argument("compute_image: empty bounds");
  ImageMap img;
  img.grid = grid;
  img.values.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);
  img.n = n;
  img.K = static_cast<int>(svds.size());
  img.mode = mode_label(mode);
  return img;
}

}  // namespace

TruncatedSvd truncated_svd(const MsrMatrix& matrix, double tau_rel) {
  if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw std::invalid_argument("truncated_svd: need 0 < tau_rel < 1");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.omega = matrix.omega;
  const auto& s = svd.singularValues();
  out.sigmas.assign(s.data(), s.data() + s.size());
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  out.m_count = 0;
  if (!out.sigmas.empty() && out.sigmas.front() > 0.0) {
    const double cut = tau_rel * out.sigmas.front();
    for (double v : out.sigmas)
      if (v >= cut) ++out.m_count;
  }
  return out;
}

SteeringMode phi_weighted(const Eigen::Vector3d& phi) {
  if (phi.isZero(0.0)) throw std::invalid_argument("phi_weighted: phi must be nonzero");
  return PhiWeighted{phi};
}

std::string mode_label(const SteeringMode& mode) {
  return std::visit(overloaded{[](const PlainExponential&) { return std::string("plain"); },
                               [](const PhiWeighted& w) {
                                 std::string s = "phi";
                                 for (int i = 0; i < 3; ++i) {
                                   char buf[32];
                                   std::snprintf(buf, sizeof buf, "%g", w.phi[i]);
                                   s += buf;
                                 }
                                 return s;
                               }},
                    mode);
}

SteeringPair steering_vectors(const Vec2& z, double omega, const DirectionSet& dirs, const SteeringMode& mode) {
  SteeringPair out{Eigen::VectorXcd(dirs.P()), Eigen::VectorXcd(dirs.Q())};
  fill_steering(out.w_e, dirs.receivers, -1.0, omega, z, mode);
  fill_steering(out.w_f, dirs.incidents, 1.0, omega, z, mode);
  return out;
}

double functional_value(const Vec2& z, std::span<const TruncatedSvd> svds, const DirectionSet& dirs,
                        const SteeringMode& mode, int n) {
  check_svds(svds, dirs);
  if (n < 0) throw std::invalid_argument("functional_value: n must be >= 0");
  Eigen::VectorXcd w_e(dirs.P()), w_f(dirs.Q());
  return evaluate(z, svds, dirs, mode, n, w_e, w_f);
}

double ImageMap::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

std::vector<double> ImageMap::normalized() const {
  const double top = max();
  std::vector<double> out(values);
  if (top > 0.0)
    for (auto& v : out) v /= top;
  return out;
}

ImageMap compute_image(std::span<const TruncatedSvd> svds, const DirectionSet& dirs, const SteeringMode& mode, int n,
                       const GridSpec& grid) {
  check_svds(svds, dirs);
  if (n < 0) throw std::invalid_argument("compute_image: n must be >= 0");
  ImageMap img = blank_image(svds, mode, n, grid);
  const int cells = grid.nx * grid.ny;
  // Exceptions cannot leave the parallel region; a degenerate phi is
  // flagged and rethrown after it.
  bool degenerate = false;
#pragma omp parallel
  {
    Eigen::VectorXcd w_e(dirs.P()), w_f(dirs.Q());
#pragma omp for schedule(static)
    for (int c = 0; c < cells; ++c) {
      const int i = c / grid.ny;
      const int j = c % grid.ny;
      try {
        img.values[static_cast<std::size_t>(c)] = evaluate(grid.cell_center(i, j), svds, dirs, mode, n, w_e, w_f);
      } catch (const DegenerateSteeringError&) {
#pragma omp atomic write
        degenerate = true;
      }
    }
  }
  if (degenerate) throw DegenerateSteeringError("compute_image: steering vector has zero norm for this phi");
  return img;
}

ImageMap compute_image_serial(std::span<const TruncatedSvd> svds, const DirectionSet& dirs, const SteeringMode& mode,
                              int n, const GridSpec& grid) {
  check_svds(svds, dirs);
  if (n < 0) throw std::invalid_argument("compute_image: n must be >= 0");
  ImageMap img = blank_image(svds, mode, n, grid);
  Eigen::VectorXcd w_e(dirs.P()), w_f(dirs.Q());
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      img.values[static_cast<std::size_t>(i) * grid.ny + j] = evaluate(grid.cell_center(i, j), svds, dirs, mode, n, w_e, w_f);
  return img;
}

void write_image_csv(std::ostream& out, const ImageMap& image) {
  const auto norm = image.normalized();
  out << "x,y,value\n";
  char buf[96];
  for (int i = 0; i < image.grid.nx; ++i) {
    for (int j = 0; j < image.grid.ny; ++j) {
      const Vec2 c = image.grid.cell_center(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c.x(), c.y(), norm[static_cast<std::size_t>(i) * image.grid.ny + j]);
      out << buf;
    }
  }
}

void write_image_pgm(std::ostream& out, const ImageMap& image) {
  const auto norm = image.normalized();
  out << "P5\n" << image.grid.nx << ' ' << image.grid.ny << "\n255\n";
  for (int j = image.grid.ny - 1; j >= 0; --j) {
    for (int i = 0; i < image.grid.nx; ++i) {
      const double v = std::clamp(norm[static_cast<std::size_t>(i) * image.grid.ny + j], 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
}

std::string image_basename(const std::string& tag, int n, int K) {
  return tag + "_n" + std::to_string(n) + "_K" + std::to_string(K);
}

}  // namespace thinscan
