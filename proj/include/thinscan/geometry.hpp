#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thinscan {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Polynomial with ascending coefficients c0 + c1 z + c2 z^2 + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double z) const;
  double derivative(double z) const;
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

// Supporting curve x(z), z in [z_lo, z_hi]. Either a polynomial pair
// [f(z), g(z)] or a user-supplied point list (linear interpolation for
// positions, centered differences for tangents).
class SupportingCurve {
 public:
  enum class Kind { PolynomialGraph, PointList };

  static SupportingCurve polynomial_graph(Polynomial f, Polynomial g, double z_lo, double z_hi);
  // Points are assigned uniformly spaced parameters on [z_lo, z_hi].
  static SupportingCurve point_list(std::vector<Vec2> points, double z_lo = 0.0, double z_hi = 1.0);

  Kind kind() const noexcept { return kind_; }
  double z_lo() const noexcept { return z_lo_; }
  double z_hi() const noexcept { return z_hi_; }
  const Polynomial& f() const noexcept { return f_; }
  const Polynomial& g() const noexcept { return g_; }
  const std::vector<Vec2>& points() const noexcept { return points_; }

  Vec2 point(double z) const;
  Vec2 derivative(double z) const;

  // Length of the curve; adaptive quadrature of |x'(z)| for polynomial
  // graphs, polyline length for point lists.
  double arc_length() const;

 private:
  SupportingCurve() = default;

  Kind kind_ = Kind::PolynomialGraph;
  Polynomial f_;
  Polynomial g_;
  std::vector<Vec2> points_;
  std::vector<Vec2> node_derivs_;
  double z_lo_ = 0.0;
  double z_hi_ = 1.0;
};

struct Background {
  double eps0 = 1.0;
  double mu0 = 1.0;
};

struct InclusionSpec {
  SupportingCurve curve;
  double h;    // half-thickness
  double eps;  // permittivity
  double mu;   // permeability
};

struct FrameSample {
  Vec2 point;
  Vec2 tangent;
  Vec2 normal;    // tangent rotated +90 degrees
  double weight;  // arc-length quadrature weight
};

// Frames at `count` parameter-uniform points with trapezoidal arc-length
// weights. Throws std::invalid_argument for count < 2 and GeometryError
// where |x'(z)| < 1e-12.
std::vector<FrameSample> sample_curve(const SupportingCurve& curve, int count);

// Rayleigh-limit point count max(1, ceil(arc_length / (lambda / 2))).
int rayleigh_point_count(const SupportingCurve& curve, double omega);

// M frames at the arc-length midpoints of M equal-length pieces, each with
// weight arc_length / M.
std::vector<FrameSample> rayleigh_points(const SupportingCurve& curve, int count);

// Eigenvalue of the polarization tensor along the tangent, 2 (1/mu - 1/mu0).
double tangential_eigenvalue(const Background& bg, const InclusionSpec& spec);
// Eigenvalue along the normal, 2 (1/mu0 - mu/mu0^2).
double normal_eigenvalue(const Background& bg, const InclusionSpec& spec);

Mat2 polarization_tensor(const FrameSample& frame, const Background& bg, const InclusionSpec& spec);

// True when the densely sampled polyline of the curve has no crossing
// between non-adjacent segments.
bool is_simple(const SupportingCurve& curve, int samples = 512);

// Distance from points to a union of curves, via dense polylines.
class CurveDistance {
 public:
  explicit CurveDistance(std::span<const SupportingCurve> curves, int samples_per_curve = 2000);
  explicit CurveDistance(const SupportingCurve& curve, int samples_per_curve = 2000);

  double operator()(const Vec2& p) const;

 private:
  std::vector<std::vector<Vec2>> polylines_;
};

}  // namespace thinscan
