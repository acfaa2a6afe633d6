#pragma once

#include <iosfwd>
#include <vector>

#include "thinscan/forward_model.hpp"
#include "thinscan/geometry.hpp"

namespace thinscan {

// Values sampled at increasing radii starting from 0.
struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> values;
};

// Throws std::invalid_argument when lengths differ, radii do not start at 0
// or are not increasing.
void validate_profile(const RadialProfile& profile);

struct PredictionConfig {
  double omega_1 = 0.0;
  double omega_K = 0.0;
  int K = 10;
  int n = 0;
  int Q = 20;
  bool include_j1_tail = true;
};

// (K / (w_K - w_1)) [Phi(r; w_K) - Phi(r; w_1) + tail], tail being the
// integral of J1(w r)^2 over [w_1, w_K] when include_j1_tail. Requires n = 0.
double predict_plain(double r, const PredictionConfig& cfg);

// (K / (w_K - w_1)) (PhiHat(r, w_K; n) - PhiHat(r, w_1; n)). Requires n >= 1.
double predict_weighted(double r, const PredictionConfig& cfg);

// predict_plain for n = 0, predict_weighted otherwise, at each radius.
RadialProfile predict_profile(const std::vector<double>& radii, const PredictionConfig& cfg);

constexpr double kGhostClamp = 1e-6;

// Small-aperture ghost structure sum_q 1 / sqrt(|d|^2 - (theta_q . d)^2),
// d = z - target, with radicands below kGhostClamp replaced by kGhostClamp.
// Throws DomainError for z == target.
double predict_ghost_small_q(const Vec2& z, const Vec2& target, const DirectionSet& dirs);

// Distance j'_1 / omega from a permeability-only inclusion to the J1 ghost
// ridges, j'_1 being the first maximum of J1.
double predict_permeability_ghost_radius(double omega);

// L-infinity distance between the two profiles after each is divided by its
// r = 0 value. Throws std::invalid_argument on mismatched radii and
// DomainError on a zero r = 0 value.
double profile_match_score(const RadialProfile& computed, const RadialProfile& predicted);

// Mean of the r = 0 normalized profile over radii in [lo, hi].
double profile_band_mean(const RadialProfile& profile, double lo, double hi);

// "r,computed,predicted,abs_diff" with r = 0 normalized values.
void write_profile_csv(std::ostream& out, const RadialProfile& computed, const RadialProfile& predicted);

}  // namespace thinscan
