#include "thinscan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thinscan {

namespace {

struct Cell {
  double value;
  double distance;
};

std::vector<Cell> domain_cells(const ImageMap& image, const CurveDistance& dist, double radius) {
  std::vector<Cell> out;
  for (int i = 0; i < image.grid.nx; ++i) {
    for (int j = 0; j < image.grid.ny; ++j) {
      const Vec2 c = image.grid.cell_center(i, j);
      if (c.norm() <= radius) out.push_back({image.at(i, j), dist(c)});
    }
  }
  if (out.empty()) throw std::invalid_argument("image has no cells inside the domain disk");
  return out;
}

}  // namespace

double top_fraction_near_curve(const ImageMap& image, const CurveDistance& dist, const MetricOptions& opts) {
  if (!(opts.top_fraction > 0.0 && opts.top_fraction <= 1.0))
    throw std::invalid_argument("top_fraction must be in (0, 1]");
  auto cells = domain_cells(image, dist, opts.domain_radius);
  const auto top = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opts.top_fraction * cells.size())));
  // Ties broken by distance so the score does not depend on cell order.
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(top), cells.end(),
                    [](const Cell& a, const Cell& b) { return a.value != b.value ? a.value > b.value : a.distance < b.distance; });
  std::size_t near = 0;
  for (std::size_t k = 0; k < top; ++k)
    if (cells[k].distance <= opts.tube) ++near;
  return static_cast<double>(near) / static_cast<double>(top);
}

double sidelobe_mean(const ImageMap& image, const CurveDistance& dist, const MetricOptions& opts) {
  const double top = image.max();
  if (!(top > 0.0)) throw std::invalid_argument("sidelobe_mean: image is identically zero");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : domain_cells(image, dist, opts.domain_radius)) {
    if (c.distance >= opts.sidelobe_lo && c.distance <= opts.sidelobe_hi) {
      sum += c.value / top;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("sidelobe_mean: no cells in the distance band");
  return sum / static_cast<double>(count);
}

Peak peak_location(const ImageMap& image) {
  if (image.values.empty()) throw std::invalid_argument("peak_location: empty image");
  const auto it = std::max_element(image.values.begin(), image.values.end());
  const auto idx = static_cast<int>(it - image.values.begin());
  Peak p;
  p.i = idx / image.grid.ny;
  p.j = idx % image.grid.ny;
  p.point = image.grid.cell_center(p.i, p.j);
  p.value = *it;
  return p;
}

double max_near(const ImageMap& image, const CurveDistance& dist, double radius) {
  double best = 0.0;
  bool any = false;
  for (int i = 0; i < image.grid.nx; ++i) {
    for (int j = 0; j < image.grid.ny; ++j) {
      if (dist(image.grid.cell_center(i, j)) <= radius) {
        best = any ? std::max(best, image.at(i, j)) : image.at(i, j);
        any = true;
      }
    }
  }
  if (!any) throw std::invalid_argument("max_near: no cells within radius of the curve");
  return best;
}

RadialProfile computed_radial_profile(const std::function<double(const Vec2&)>& f, const Vec2& center,
                                      const std::vector<double>& radii, int angles) {
  if (angles < 1) throw std::invalid_argument("computed_radial_profile: angles must be >= 1");
  RadialProfile out{radii, {}};
  validate_profile({radii, std::vector<double>(radii.size())});
  for (double r : radii) {
    if (r == 0.0) {
      out.values.push_back(f(center));
      continue;
    }
    double sum = 0.0;
    for (int a = 0; a < angles; ++a) {
      const double t = 2.0 * std::numbers::pi * a / angles;
      sum += f(center + r * Vec2(std::cos(t), std::sin(t)));
    }
    out.values.push_back(sum / angles);
  }
  return out;
}

NormalScan scan_normals(const SupportingCurve& curve, const std::function<double(const Vec2&)>& f, double offset,
                        int count, double step, double max_distance) {
  if (!(offset > 0.0)) throw std::invalid_argument("scan_normals: offset must be > 0");
  if (count < 3) throw std::invalid_argument("scan_normals: count must be >= 3");
  if (step <= 0.0) step = offset / 10.0;
  const auto frames = sample_curve(curve, count + 2);
  NormalScan scan;
  double ridge_sum = 0.0;
  for (std::size_t k = 1; k + 1 < frames.size(); ++k) {
    const Vec2& x = frames[k].point;
    const Vec2& eta = frames[k].normal;
    const double on = f(x);
    const double plus = f(x + offset * eta);
    const double minus = f(x - offset * eta);
    ++scan.samples;
    if (on < plus && on < minus) scan.local_min_fraction += 1.0;
    if (on > plus && on > minus) scan.local_max_fraction += 1.0;
    for (double side : {1.0, -1.0}) {
      double prev = on;
      double cur = f(x + side * step * eta);
      for (double d = 2.0 * step; d <= max_distance + 1e-12; d += step) {
        const double next = f(x + side * d * eta);
        if (cur > prev && cur >= next) {
          ridge_sum += d - step;
          ++scan.ridges_found;
          break;
        }
        prev = cur;
        cur = next;
      }
    }
  }
  scan.local_min_fraction /= scan.samples;
  scan.local_max_fraction /= scan.samples;
  if (scan.ridges_found > 0) scan.mean_ridge_distance = ridge_sum / scan.ridges_found;
  return scan;
}

}  // namespace thinscan
