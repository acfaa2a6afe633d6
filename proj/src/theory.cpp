#include "thinscan/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "thinscan/error.hpp"
#include "thinscan/quadrature.hpp"
#include "thinscan/special_functions.hpp"

namespace thinscan {

namespace {

void check_band(const PredictionConfig& cfg) {
  if (!(cfg.omega_1 > 0.0) || !(cfg.omega_1 < cfg.omega_K))
    throw std::invalid_argument("PredictionConfig: need 0 < omega_1 < omega_K");
  if (cfg.K < 1) throw std::invalid_argument("PredictionConfig: K must be >= 1");
}

double j1_tail(double r, double w1, double wK) {
  if (r == 0.0) return 0.0;
  auto f = [r](double w) {
    const double v = special::bessel_j(special::BesselOrder(1), w * r);
    return v * v;
  };
  return quad::integrate(f, w1, wK, 1e-12, std::max(0.05, 1.0 / r)).value;
}

std::vector<double> normalized_at_origin(const RadialProfile& p) {
  if (p.values.front() == 0.0) throw DomainError("profile has a zero value at r = 0");
  std::vector<double> out(p.values);
  for (auto& v : out) v /= p.values.front();
  return out;
}

}  // namespace

void validate_profile(const RadialProfile& profile) {
  if (profile.radii.size() != profile.values.size()) throw std::invalid_argument("RadialProfile: length mismatch");
  if (profile.radii.empty() || profile.radii.front() != 0.0)
    throw std::invalid_argument("RadialProfile: radii must start at 0");
  for (std::size_t i = 1; i < profile.radii.size(); ++i)
    if (!(profile.radii[i] > profile.radii[i - 1])) throw std::invalid_argument("RadialProfile: radii must increase");
}

double predict_plain(double r, const PredictionConfig& cfg) {
  if (cfg.n != 0) throw std::invalid_argument("predict_plain: requires n = 0");
  check_band(cfg);
  const double scale = cfg.K / (cfg.omega_K - cfg.omega_1);
  double v = special::phi(special::PhiParams(r, cfg.omega_K)) - special::phi(special::PhiParams(r, cfg.omega_1));
  if (cfg.include_j1_tail) v += j1_tail(r, cfg.omega_1, cfg.omega_K);
  return scale * v;
}

double predict_weighted(double r, const PredictionConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("predict_weighted: requires n >= 1");
  check_band(cfg);
  const double scale = cfg.K / (cfg.omega_K - cfg.omega_1);
  return scale * (special::phi_hat(r, cfg.omega_K, cfg.n) - special::phi_hat(r, cfg.omega_1, cfg.n));
}

RadialProfile predict_profile(const std::vector<double>& radii, const PredictionConfig& cfg) {
  RadialProfile out{radii, {}};
  out.values.reserve(radii.size());
  for (double r : radii) out.values.push_back(cfg.n == 0 ? predict_plain(r, cfg) : predict_weighted(r, cfg));
  return out;
}

double predict_ghost_small_q(const Vec2& z, const Vec2& target, const DirectionSet& dirs) {
  const Vec2 d = z - target;
  if (d.squaredNorm() == 0.0) throw DomainError("predict_ghost_small_q: z equals the target");
  double sum = 0.0;
  for (const auto& theta : dirs.incidents) {
    const double along = theta.dot(d);
    const double radicand = std::max(d.squaredNorm() - along * along, kGhostClamp);
    sum += 1.0 / std::sqrt(radicand);
  }
  return sum;
}

double predict_permeability_ghost_radius(double omega) {
  if (!(omega > 0.0)) throw DomainError("predict_permeability_ghost_radius: omega must be > 0");
  return special::first_j1_maximum() / omega;
}

double profile_match_score(const RadialProfile& computed, const RadialProfile& predicted) {
  validate_profile(computed);
  validate_profile(predicted);
  if (computed.radii.size() != predicted.radii.size()) throw std::invalid_argument("profile_match_score: radii differ");
  for (std::size_t i = 0; i < computed.radii.size(); ++i)
    if (std::abs(computed.radii[i] - predicted.radii[i]) > 1e-12)
      throw std::invalid_argument("profile_match_score: radii differ");
  const auto a = normalized_at_origin(computed);
  const auto b = normalized_at_origin(predicted);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double profile_band_mean(const RadialProfile& profile, double lo, double hi) {
  validate_profile(profile);
  const auto v = normalized_at_origin(profile);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (profile.radii[i] >= lo && profile.radii[i] <= hi) {
      sum += v[i];
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("profile_band_mean: no radii in band");
  return sum / count;
}

void write_profile_csv(std::ostream& out, const RadialProfile& computed, const RadialProfile& predicted) {
  validate_profile(computed);
  validate_profile(predicted);
  if (computed.radii.size() != predicted.radii.size()) throw std::invalid_argument("write_profile_csv: radii differ");
  const auto a = normalized_at_origin(computed);
  const auto b = normalized_at_origin(predicted);
  out << "r,computed,predicted,abs_diff\n";
  char buf[128];
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", computed.radii[i], a[i], b[i], std::abs(a[i] - b[i]));
    out << buf;
  }
}

}  // namespace thinscan
