#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "thinscan/config.hpp"

using namespace thinscan;

namespace {

bool has_rule(const std::vector<Violation>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule.find(needle) != std::string::npos; });
}

ExperimentConfig minimal() { return load_preset("figure_T1"); }

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every bundled preset is valid") {
  const auto names = preset_names();
  for (const char* want : {"figure_T1P", "figure_T1PM", "figure_T1", "figure_T1High", "figure_T2", "figure_TM"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  for (const auto& name : names) {
    CAPTURE(name);
    const auto v = validate_config(load_preset(name));
    CHECK(v.empty());
  }
  CHECK_THROWS_AS(load_preset("no_such_preset"), ConfigError);
}

TEST_CASE("figure_T1 preset parameters") {
  const auto c = load_preset("figure_T1");
  REQUIRE(c.inclusions.size() == 1);
  CHECK(c.inclusions[0].h == 0.015);
  CHECK(c.inclusions[0].eps == 5.0);
  CHECK(c.inclusions[0].mu == 5.0);
  CHECK(c.background.eps0 == 1.0);
  CHECK(c.background.mu0 == 1.0);
  CHECK(c.K_values == std::vector<int>{10});
  CHECK(c.lambda_lo == 0.3);
  CHECK(c.lambda_hi == 0.7);
  CHECK(c.n_weights == std::vector<int>{0, 1, 2});
  REQUIRE(c.snr_db.has_value());
  CHECK(*c.snr_db == 10.0);
  REQUIRE(c.modes.size() == 1);
  CHECK(c.modes[0].phi == Eigen::Vector3d(1, 0, 1));
  CHECK(c.inclusions[0].curve.f == std::vector<double>{-0.2, 1.0});
  CHECK(c.inclusions[0].curve.g == std::vector<double>{0.4, 0.0, -0.5});
}

TEST_CASE("zero thickness is reported") {
  auto c = minimal();
  c.inclusions[0].h = 0.0;
  const auto v = validate_config(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "InclusionSpec.h");
  CHECK(has_rule(v, "InclusionSpec.h > 0"));
}

TEST_CASE("wavelength ordering is reported") {
  auto c = minimal();
  c.lambda_hi = c.lambda_lo;
  const auto v = validate_config(c);
  CHECK(has_rule(v, "lambda_lo < lambda_hi"));
  c.K_values = {1};
  CHECK(validate_config(c).empty());
  c.lambda_hi = 0.7;
  CHECK(has_rule(validate_config(c), "lambda_lo == lambda_hi"));
}

TEST_CASE("every violation is listed at once") {
  auto c = minimal();
  c.inclusions[0].h = -1.0;
  c.P = 2;
  c.tau_rel = 0.0;
  c.modes = {ModeConfig{false, Eigen::Vector3d::Zero()}};
  c.inclusions[0].eps = 1.0;
  c.inclusions[0].mu = 1.0;
  const auto v = validate_config(c);
  CHECK(v.size() == 5);
  for (const char* field : {"InclusionSpec.h", "P", "tau_rel", "SteeringMode.phi", "InclusionSpec.contrast"})
    CHECK(std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field; }));
  try {
    require_valid(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() == 5);
  }
}

TEST_CASE("self-intersecting curves are rejected") {
  auto c = minimal();
  c.inclusions[0].curve.f = {-1, 0, 1};
  c.inclusions[0].curve.g = {0, -1, 0, 1};
  c.inclusions[0].curve.z_lo = -1.5;
  c.inclusions[0].curve.z_hi = 1.5;
  CHECK(has_rule(validate_config(c), "self-intersect"));
}

TEST_CASE("JSON round trip of every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = load_preset(name);
    const auto text = to_json_text(c);
    CHECK(to_json_text(parse_config(text)) == text);
  }
}

TEST_CASE("property: JSON round trip of randomized configs") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::uniform_int_distribution<int> small(3, 40);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = minimal();
    c.P = small(rng);
    c.Q = small(rng);
    c.inclusions[0].h = u(rng) / 10;
    c.inclusions[0].eps = u(rng);
    c.inclusions[0].curve.g = {u(rng), -u(rng), u(rng) / 7};
    c.lambda_lo = u(rng) / 10;
    c.lambda_hi = c.lambda_lo + u(rng);
    c.K_values = {small(rng), small(rng)};
    c.seed = rng();
    c.snr_db = trial % 3 == 0 ? std::nullopt : std::optional<double>(u(rng) * 10);
    c.modes = {ModeConfig{true, {}}, ModeConfig{false, Eigen::Vector3d(u(rng), 0.0, -u(rng))}};
    c.spacing = trial % 2 ? FrequencySpacing::UniformLambda : FrequencySpacing::UniformOmega;
    const auto text = to_json_text(c);
    const auto back = parse_config(text);
    CHECK(to_json_text(back) == text);
    CHECK(back.seed == c.seed);
    CHECK(back.inclusions[0].curve.g == c.inclusions[0].curve.g);
    CHECK(back.snr_db == c.snr_db);
  }
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  try {
    parse_config(R"({"P": "many", "seed": -3, "mode": "sideways"})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 3);
  }
  CHECK_THROWS_AS(parse_config("{}"), ConfigError);
  const auto defaults = parse_config(R"({"inclusions": []})");
  CHECK(defaults.P == 24);
  CHECK(defaults.inclusions.empty());
  CHECK_FALSE(validate_config(defaults).empty());
}

TEST_CASE("curve construction from config") {
  CurveConfig point;
  point.kind = CurveConfig::Kind::Point;
  point.center = Vec2(0.3, -0.2);
  point.length = 2e-3;
  const auto seg = build_curve(point);
  CHECK(seg.arc_length() == doctest::Approx(2e-3).epsilon(1e-12));
  CHECK((seg.point(0.5 * (seg.z_lo() + seg.z_hi())) - point.center).norm() < 1e-15);

  auto c = load_preset("point_target");
  REQUIRE(point_target_center(c).has_value());
  CHECK(point_target_center(c)->norm() == 0.0);
  CHECK_FALSE(point_target_center(minimal()).has_value());

  const auto freqs = build_frequencies(minimal(), 10);
  CHECK(freqs.omegas().size() == 10);
}

}  // TEST_SUITE
