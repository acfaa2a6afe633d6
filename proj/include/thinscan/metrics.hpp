#pragma once

#include <functional>
#include <vector>

#include "thinscan/geometry.hpp"
#include "thinscan/imaging.hpp"
#include "thinscan/theory.hpp"

namespace thinscan {

// Image scores are taken over cells whose centre lies in the disk of radius
// domain_radius about the origin (the search domain).
struct MetricOptions {
  double top_fraction = 0.05;
  double tube = 0.05;
  double domain_radius = 1.0;
  double sidelobe_lo = 0.3;
  double sidelobe_hi = 1.0;
};

// Fraction of the brightest top_fraction of domain cells whose centre is
// within tube of the curves.
double top_fraction_near_curve(const ImageMap& image, const CurveDistance& dist, const MetricOptions& opts = {});

// Mean max-normalized intensity over domain cells at curve distance in
// [sidelobe_lo, sidelobe_hi].
double sidelobe_mean(const ImageMap& image, const CurveDistance& dist, const MetricOptions& opts = {});

struct Peak {
  int i = 0;
  int j = 0;
  Vec2 point = Vec2::Zero();
  double value = 0.0;
};

Peak peak_location(const ImageMap& image);

// Largest intensity among cells within `radius` of the curve(s).
double max_near(const ImageMap& image, const CurveDistance& dist, double radius);

// Functional averaged over `angles` equally spaced directions at each radius
// about `center`.
RadialProfile computed_radial_profile(const std::function<double(const Vec2&)>& f, const Vec2& center,
                                      const std::vector<double>& radii, int angles = 32);

// Behaviour of f across the curve normal at `count` parameter-uniform
// interior points (endpoints excluded).
struct NormalScan {
  int samples = 0;
  double local_min_fraction = 0.0;  // f(x) below f(x +- offset eta)
  double local_max_fraction = 0.0;  // f(x) above f(x +- offset eta)
  double mean_ridge_distance = 0.0;
  int ridges_found = 0;
};

// Ridge distance on each side is the first local maximum of f along the
// normal, scanned with `step` up to max_distance.
NormalScan scan_normals(const SupportingCurve& curve, const std::function<double(const Vec2&)>& f, double offset,
                        int count = 101, double step = 0.0, double max_distance = 0.4);

}  // namespace thinscan
