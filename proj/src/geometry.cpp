#include "thinscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "thinscan/error.hpp"
#include "thinscan/quadrature.hpp"

namespace thinscan {

namespace {

constexpr double kMinSpeed = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

std::vector<Vec2> polyline(const SupportingCurve& curve, int samples) {
  std::vector<Vec2> out;
  out.reserve(samples);
  const double dz = (curve.z_hi() - curve.z_lo()) / (samples - 1);
  for (int i = 0; i < samples; ++i) out.push_back(curve.point(curve.z_lo() + i * dz));
  return out;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

double Polynomial::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double Polynomial::derivative(double z) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs_[k];
  return acc;
}

SupportingCurve SupportingCurve::polynomial_graph(Polynomial f, Polynomial g, double z_lo, double z_hi) {
  if (!(z_lo < z_hi)) throw std::invalid_argument("SupportingCurve: need z_lo < z_hi");
  SupportingCurve c;
  c.kind_ = Kind::PolynomialGraph;
  c.f_ = std::move(f);
  c.g_ = std::move(g);
  c.z_lo_ = z_lo;
  c.z_hi_ = z_hi;
  return c;
}

SupportingCurve SupportingCurve::point_list(std::vector<Vec2> points, double z_lo, double z_hi) {
  if (!(z_lo < z_hi)) throw std::invalid_argument("SupportingCurve: need z_lo < z_hi");
  if (points.size() < 2) throw std::invalid_argument("SupportingCurve: point list needs >= 2 points");
  SupportingCurve c;
  c.kind_ = Kind::PointList;
  c.z_lo_ = z_lo;
  c.z_hi_ = z_hi;
  const std::size_t n = points.size();
  const double dz = (z_hi - z_lo) / static_cast<double>(n - 1);
  c.node_derivs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      c.node_derivs_[i] = (points[1] - points[0]) / dz;
    else if (i + 1 == n)
      c.node_derivs_[i] = (points[n - 1] - points[n - 2]) / dz;
    else
      c.node_derivs_[i] = (points[i + 1] - points[i - 1]) / (2.0 * dz);
  }
  c.points_ = std::move(points);
  return c;
}

Vec2 SupportingCurve::point(double z) const {
  if (kind_ == Kind::PolynomialGraph) return {f_(z), g_(z)};
  const double u = (z - z_lo_) / (z_hi_ - z_lo_) * static_cast<double>(points_.size() - 1);
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(points_.size() - 2)));
  const double s = u - static_cast<double>(i);
  return (1.0 - s) * points_[i] + s * points_[i + 1];
}

Vec2 SupportingCurve::derivative(double z) const {
  if (kind_ == Kind::PolynomialGraph) return {f_.derivative(z), g_.derivative(z)};
  const double u = (z - z_lo_) / (z_hi_ - z_lo_) * static_cast<double>(points_.size() - 1);
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(points_.size() - 2)));
  const double s = u - static_cast<double>(i);
  return (1.0 - s) * node_derivs_[i] + s * node_derivs_[i + 1];
}

double SupportingCurve::arc_length() const {
  if (kind_ == Kind::PointList) {
    double len = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i) len += (points_[i] - points_[i - 1]).norm();
    return len;
  }
  auto speed = [this](double z) { return derivative(z).norm(); };
  return quad::integrate(speed, z_lo_, z_hi_, 1e-13, 0.1).value;
}

std::vector<FrameSample> sample_curve(const SupportingCurve& curve, int count) {
  if (count < 2) throw std::invalid_argument("sample_curve: count must be >= 2");
  std::vector<FrameSample> out;
  out.reserve(count);
  const double dz = (curve.z_hi() - curve.z_lo()) / (count - 1);
  for (int i = 0; i < count; ++i) {
    const double z = curve.z_lo() + i * dz;
    const Vec2 d = curve.derivative(z);
    const double speed = d.norm();
    if (speed < kMinSpeed) throw GeometryError("sample_curve: degenerate derivative, frame undefined");
    const Vec2 tangent = d / speed;
    const Vec2 normal(-tangent.y(), tangent.x());
    double w = speed * dz;
    if (i == 0 || i == count - 1) w *= 0.5;
    out.push_back({curve.point(z), tangent, normal, w});
  }
  return out;
}

int rayleigh_point_count(const SupportingCurve& curve, double omega) {
  if (!(omega > 0.0)) throw DomainError("rayleigh_point_count: omega must be > 0");
  const double half_lambda = std::numbers::pi / omega;
  // Ratios within 1e-9 of an integer are snapped, so that 2 pi / omega
  // round-off does not push exact ratios up by one.
  const double ratio = curve.arc_length() / half_lambda;
  return std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
}

std::vector<FrameSample> rayleigh_points(const SupportingCurve& curve, int count) {
  if (count < 1) throw std::invalid_argument("rayleigh_points: count must be >= 1");
  // Cumulative arc length on a fine trapezoid table, inverted by linear
  // interpolation.
  constexpr int kTable = 4001;
  const double dz = (curve.z_hi() - curve.z_lo()) / (kTable - 1);
  std::vector<double> cumulative(kTable, 0.0);
  double prev_speed = curve.derivative(curve.z_lo()).norm();
  for (int i = 1; i < kTable; ++i) {
    const double speed = curve.derivative(curve.z_lo() + i * dz).norm();
    cumulative[i] = cumulative[i - 1] + 0.5 * (prev_speed + speed) * dz;
    prev_speed = speed;
  }
  const double total = cumulative.back();
  const double weight = curve.arc_length() / count;
  std::vector<FrameSample> out;
  out.reserve(count);
  for (int m = 0; m < count; ++m) {
    const double target = (m + 0.5) * total / count;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const auto hi = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cumulative.begin()));
    const std::size_t lo = hi - 1;
    const double span = cumulative[hi] - cumulative[lo];
    const double s = span > 0.0 ? (target - cumulative[lo]) / span : 0.0;
    const double z = curve.z_lo() + (static_cast<double>(lo) + s) * dz;
    const Vec2 d = curve.derivative(z);
    if (d.norm() < kMinSpeed) throw GeometryError("rayleigh_points: degenerate derivative");
    const Vec2 tangent = d.normalized();
    out.push_back({curve.point(z), tangent, Vec2(-tangent.y(), tangent.x()), weight});
  }
  return out;
}

double tangential_eigenvalue(const Background& bg, const InclusionSpec& spec) {
  return 2.0 * (1.0 / spec.mu - 1.0 / bg.mu0);
}

double normal_eigenvalue(const Background& bg, const InclusionSpec& spec) {
  return 2.0 * (1.0 / bg.mu0 - spec.mu / (bg.mu0 * bg.mu0));
}

Mat2 polarization_tensor(const FrameSample& frame, const Background& bg, const InclusionSpec& spec) {
  const Vec2& t = frame.tangent;
  const Vec2& n = frame.normal;
  return tangential_eigenvalue(bg, spec) * (t * t.transpose()) + normal_eigenvalue(bg, spec) * (n * n.transpose());
}

bool is_simple(const SupportingCurve& curve, int samples) {
  const auto line = polyline(curve, samples);
  for (std::size_t i = 0; i + 1 < line.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < line.size(); ++j)
      if (segments_cross(line[i], line[i + 1], line[j], line[j + 1])) return false;
  return true;
}

CurveDistance::CurveDistance(std::span<const SupportingCurve> curves, int samples_per_curve) {
  for (const auto& c : curves) polylines_.push_back(polyline(c, samples_per_curve));
}

CurveDistance::CurveDistance(const SupportingCurve& curve, int samples_per_curve)
    : CurveDistance(std::span<const SupportingCurve>(&curve, 1), samples_per_curve) {}

double CurveDistance::operator()(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : polylines_)
    for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  return best;
}

}  // namespace thinscan
