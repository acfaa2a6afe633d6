#include "thinscan/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thinscan {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  std::vector<Violation> problems;

  void fail(const std::string& field, const std::string& rule) { problems.push_back({field, rule}); }

  double number(const json& obj, const char* key, const std::string& field, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(field, "must be a number");
      return fallback;
    }
    return v.get<double>();
  }

  int integer(const json& obj, const char* key, const std::string& field, int fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(field, "must be an integer");
      return fallback;
    }
    return v.get<int>();
  }

  std::vector<double> numbers(const json& v, const std::string& field) {
    std::vector<double> out;
    if (!v.is_array()) {
      fail(field, "must be an array of numbers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number()) {
        fail(field, "must be an array of numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const json& v, const std::string& field) {
    std::vector<int> out;
    if (v.is_number_integer()) return {v.get<int>()};
    if (!v.is_array()) {
      fail(field, "must be an integer or an array of integers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number_integer()) {
        fail(field, "must be an integer or an array of integers");
        return {};
      }
      out.push_back(x.get<int>());
    }
    return out;
  }

  Vec2 pair(const json& v, const std::string& field) {
    const auto xs = numbers(v, field);
    if (xs.size() != 2) {
      if (!xs.empty()) fail(field, "must have exactly two entries");
      return Vec2::Zero();
    }
    return {xs[0], xs[1]};
  }

  CurveConfig curve(const json& v, const std::string& field) {
    CurveConfig c;
    if (!v.is_object()) {
      fail(field, "must be an object");
      return c;
    }
    const std::string kind = v.value("kind", std::string("polynomial"));
    if (v.contains("z_range")) {
      const Vec2 r = pair(v.at("z_range"), field + ".z_range");
      c.z_lo = r.x();
      c.z_hi = r.y();
    }
    if (kind == "polynomial") {
      c.kind = CurveConfig::Kind::Polynomial;
      if (v.contains("f")) c.f = numbers(v.at("f"), field + ".f");
      if (v.contains("g")) c.g = numbers(v.at("g"), field + ".g");
    } else if (kind == "points") {
      c.kind = CurveConfig::Kind::Points;
      if (!v.contains("z_range")) {
        c.z_lo = 0.0;
        c.z_hi = 1.0;
      }
      if (v.contains("points") && v.at("points").is_array()) {
        for (const auto& p : v.at("points")) c.points.push_back(pair(p, field + ".points"));
      } else {
        fail(field + ".points", "must be an array of [x, y] pairs");
      }
    } else if (kind == "point") {
      c.kind = CurveConfig::Kind::Point;
      if (v.contains("center")) c.center = pair(v.at("center"), field + ".center");
      c.length = number(v, "length", field + ".length", c.length);
    } else {
      fail(field + ".kind", "must be one of polynomial, points, point");
    }
    return c;
  }

  ModeConfig mode(const json& v, const std::string& field) {
    ModeConfig m;
    if (v.is_string()) {
      if (v.get<std::string>() == "plain") {
        m.plain = true;
      } else {
        fail(field, "string mode must be \"plain\"");
      }
      return m;
    }
    if (v.is_object() && v.contains("phi")) {
      const auto xs = numbers(v.at("phi"), field + ".phi");
      if (xs.size() == 3) {
        m.phi = {xs[0], xs[1], xs[2]};
      } else if (!xs.empty()) {
        fail(field + ".phi", "must have exactly three entries");
      }
      return m;
    }
    fail(field, "must be \"plain\" or {\"phi\": [a, b, c]}");
    return m;
  }
};

json curve_json(const CurveConfig& c) {
  switch (c.kind) {
    case CurveConfig::Kind::Polynomial:
      return {{"kind", "polynomial"}, {"f", c.f}, {"g", c.g}, {"z_range", {c.z_lo, c.z_hi}}};
    case CurveConfig::Kind::Points: {
      json pts = json::array();
      for (const auto& p : c.points) pts.push_back({p.x(), p.y()});
      return {{"kind", "points"}, {"points", pts}, {"z_range", {c.z_lo, c.z_hi}}};
    }
    case CurveConfig::Kind::Point:
      return {{"kind", "point"}, {"center", {c.center.x(), c.center.y()}}, {"length", c.length}};
  }
  return {};
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  Reader rd;
  ExperimentConfig cfg;
  if (doc.contains("name")) {
    if (doc.at("name").is_string()) {
      cfg.name = doc.at("name").get<std::string>();
    } else {
      rd.fail("name", "must be a string");
    }
  }

  if (doc.contains("inclusions") && doc.at("inclusions").is_array()) {
    int idx = 0;
    for (const auto& inc : doc.at("inclusions")) {
      const std::string field = "inclusions[" + std::to_string(idx++) + "]";
      if (!inc.is_object()) {
        rd.fail(field, "must be an object");
        continue;
      }
      InclusionConfig ic;
      if (inc.contains("curve")) {
        ic.curve = rd.curve(inc.at("curve"), field + ".curve");
      } else {
        rd.fail(field + ".curve", "is required");
      }
      ic.h = rd.number(inc, "h", field + ".h", ic.h);
      ic.eps = rd.number(inc, "eps", field + ".eps", ic.eps);
      ic.mu = rd.number(inc, "mu", field + ".mu", ic.mu);
      cfg.inclusions.push_back(std::move(ic));
    }
  } else {
    rd.fail("inclusions", "is required and must be an array");
  }

  if (doc.contains("background")) {
    const auto& bg = doc.at("background");
    if (bg.is_object()) {
      cfg.background.eps0 = rd.number(bg, "eps0", "background.eps0", cfg.background.eps0);
      cfg.background.mu0 = rd.number(bg, "mu0", "background.mu0", cfg.background.mu0);
    } else {
      rd.fail("background", "must be an object");
    }
  }

  cfg.P = rd.integer(doc, "P", "P", cfg.P);
  cfg.Q = rd.integer(doc, "Q", "Q", cfg.Q);
  if (doc.contains("K")) cfg.K_values = rd.integers(doc.at("K"), "K");
  cfg.lambda_lo = rd.number(doc, "lambda_lo", "lambda_lo", cfg.lambda_lo);
  cfg.lambda_hi = rd.number(doc, "lambda_hi", "lambda_hi", cfg.lambda_hi);
  if (doc.contains("spacing")) {
    const auto& s = doc.at("spacing");
    if (s == "uniform-omega") {
      cfg.spacing = FrequencySpacing::UniformOmega;
    } else if (s == "uniform-lambda") {
      cfg.spacing = FrequencySpacing::UniformLambda;
    } else {
      rd.fail("spacing", "must be uniform-omega or uniform-lambda");
    }
  }
  if (doc.contains("n_weights")) cfg.n_weights = rd.integers(doc.at("n_weights"), "n_weights");

  if (doc.contains("modes") && doc.contains("mode")) rd.fail("modes", "give either mode or modes, not both");
  if (doc.contains("mode")) {
    cfg.modes = {rd.mode(doc.at("mode"), "mode")};
  } else if (doc.contains("modes")) {
    cfg.modes.clear();
    if (doc.at("modes").is_array()) {
      int idx = 0;
      for (const auto& m : doc.at("modes")) cfg.modes.push_back(rd.mode(m, "modes[" + std::to_string(idx++) + "]"));
    } else {
      rd.fail("modes", "must be an array");
    }
  }

  if (doc.contains("snr_db")) {
    const auto& s = doc.at("snr_db");
    if (s.is_null()) {
      cfg.snr_db.reset();
    } else if (s.is_number()) {
      cfg.snr_db = s.get<double>();
    } else {
      rd.fail("snr_db", "must be a number or null");
    }
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (s.is_number_unsigned()) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      rd.fail("seed", "must be a non-negative integer");
    }
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (g.is_object()) {
      if (g.contains("x")) {
        const Vec2 x = rd.pair(g.at("x"), "grid.x");
        cfg.grid.x_lo = x.x();
        cfg.grid.x_hi = x.y();
      }
      if (g.contains("y")) {
        const Vec2 y = rd.pair(g.at("y"), "grid.y");
        cfg.grid.y_lo = y.x();
        cfg.grid.y_hi = y.y();
      }
      cfg.grid.nx = rd.integer(g, "nx", "grid.nx", cfg.grid.nx);
      cfg.grid.ny = rd.integer(g, "ny", "grid.ny", cfg.grid.ny);
    } else {
      rd.fail("grid", "must be an object");
    }
  }
  cfg.tau_rel = rd.number(doc, "tau_rel", "tau_rel", cfg.tau_rel);
  cfg.quad_count = rd.integer(doc, "quad_count", "quad_count", cfg.quad_count);
  cfg.domain_radius = rd.number(doc, "domain_radius", "domain_radius", cfg.domain_radius);
  if (doc.contains("profile")) {
    const auto& p = doc.at("profile");
    if (p.is_object()) {
      cfg.profile.max_radius = rd.number(p, "max_radius", "profile.max_radius", cfg.profile.max_radius);
      cfg.profile.step = rd.number(p, "step", "profile.step", cfg.profile.step);
      cfg.profile.angles = rd.integer(p, "angles", "profile.angles", cfg.profile.angles);
    } else {
      rd.fail("profile", "must be an object");
    }
  }

  if (!rd.problems.empty()) throw ConfigError(std::move(rd.problems));
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json_text(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  json incs = json::array();
  for (const auto& inc : c.inclusions)
    incs.push_back({{"curve", curve_json(inc.curve)}, {"h", inc.h}, {"eps", inc.eps}, {"mu", inc.mu}});
  doc["inclusions"] = incs;
  doc["background"] = {{"eps0", c.background.eps0}, {"mu0", c.background.mu0}};
  doc["P"] = c.P;
  doc["Q"] = c.Q;
  doc["K"] = c.K_values;
  doc["lambda_lo"] = c.lambda_lo;
  doc["lambda_hi"] = c.lambda_hi;
  doc["spacing"] = c.spacing == FrequencySpacing::UniformOmega ? "uniform-omega" : "uniform-lambda";
  doc["n_weights"] = c.n_weights;
  json modes = json::array();
  for (const auto& m : c.modes) {
    if (m.plain) {
      modes.push_back("plain");
    } else {
      modes.push_back({{"phi", {m.phi[0], m.phi[1], m.phi[2]}}});
    }
  }
  doc["modes"] = modes;
  doc["snr_db"] = c.snr_db ? json(*c.snr_db) : json(nullptr);
  doc["seed"] = c.seed;
  doc["grid"] = {{"x", {c.grid.x_lo, c.grid.x_hi}}, {"y", {c.grid.y_lo, c.grid.y_hi}}, {"nx", c.grid.nx}, {"ny", c.grid.ny}};
  doc["tau_rel"] = c.tau_rel;
  doc["quad_count"] = c.quad_count;
  doc["domain_radius"] = c.domain_radius;
  doc["profile"] = {{"max_radius", c.profile.max_radius}, {"step", c.profile.step}, {"angles", c.profile.angles}};
  return doc.dump(2);
}

std::vector<Violation> validate_config(const ExperimentConfig& c) {
  std::vector<Violation> out;
  auto rule = [&out](bool ok, std::string field, std::string text) {
    if (!ok) out.push_back({std::move(field), std::move(text)});
  };
  auto finite = [](double v) { return std::isfinite(v); };

  rule(c.background.eps0 > 0.0, "Background.eps0", "eps0 > 0");
  rule(c.background.mu0 > 0.0, "Background.mu0", "mu0 > 0");
  rule(!c.inclusions.empty(), "inclusions", "at least one inclusion");
  for (std::size_t k = 0; k < c.inclusions.size(); ++k) {
    const auto& inc = c.inclusions[k];
    const std::string at = " (inclusions[" + std::to_string(k) + "])";
    rule(inc.h > 0.0, "InclusionSpec.h", "InclusionSpec.h > 0" + at);
    rule(inc.eps > 0.0, "InclusionSpec.eps", "eps > 0" + at);
    rule(inc.mu > 0.0, "InclusionSpec.mu", "mu > 0" + at);
    rule(inc.eps != c.background.eps0 || inc.mu != c.background.mu0, "InclusionSpec.contrast",
         "eps != eps0 or mu != mu0" + at);
    const auto& cv = inc.curve;
    bool shape_ok = true;
    switch (cv.kind) {
      case CurveConfig::Kind::Polynomial:
        rule(!cv.f.empty() && !cv.g.empty(), "SupportingCurve.coefficients", "f and g need coefficients" + at);
        rule(cv.z_lo < cv.z_hi, "SupportingCurve.z_range", "z_lo < z_hi" + at);
        shape_ok = !cv.f.empty() && !cv.g.empty() && cv.z_lo < cv.z_hi;
        break;
      case CurveConfig::Kind::Points:
        rule(cv.points.size() >= 2, "SupportingCurve.points", "at least two points" + at);
        rule(cv.z_lo < cv.z_hi, "SupportingCurve.z_range", "z_lo < z_hi" + at);
        shape_ok = cv.points.size() >= 2 && cv.z_lo < cv.z_hi;
        break;
      case CurveConfig::Kind::Point:
        rule(cv.length > 0.0 && finite(cv.length), "SupportingCurve.length", "point target length > 0" + at);
        shape_ok = cv.length > 0.0 && finite(cv.length);
        break;
    }
    if (shape_ok) {
      try {
        const auto curve = build_curve(cv);
        sample_curve(curve, 257);
        rule(is_simple(curve), "SupportingCurve.simple", "curve must not self-intersect" + at);
      } catch (const std::exception& e) {
        rule(false, "SupportingCurve.frame", std::string(e.what()) + at);
      }
    }
  }

  rule(c.P >= 3, "P", "P >= 3");
  rule(c.Q >= 3, "Q", "Q >= 3");
  rule(!c.K_values.empty(), "K", "at least one frequency count");
  bool multi = false;
  for (int K : c.K_values) {
    rule(K >= 1, "K", "K >= 1");
    multi = multi || K > 1;
  }
  rule(c.lambda_lo > 0.0 && finite(c.lambda_lo), "lambda_lo", "lambda_lo > 0");
  rule(c.lambda_hi > 0.0 && finite(c.lambda_hi), "lambda_hi", "lambda_hi > 0");
  if (multi) {
    rule(c.lambda_lo < c.lambda_hi, "lambda_lo", "lambda_lo < lambda_hi when K > 1");
  } else {
    rule(c.lambda_lo == c.lambda_hi, "lambda_lo", "lambda_lo == lambda_hi when K = 1");
  }
  rule(!c.n_weights.empty(), "n_weights", "at least one weight exponent");
  for (int n : c.n_weights) rule(n >= 0, "n_weights", "n >= 0");
  rule(!c.modes.empty(), "modes", "at least one steering mode");
  for (const auto& m : c.modes) rule(m.plain || !m.phi.isZero(0.0), "SteeringMode.phi", "phi != 0");
  if (c.snr_db) rule(finite(*c.snr_db), "snr_db", "snr_db finite");
  rule(c.grid.nx >= 2 && c.grid.ny >= 2, "grid", "nx, ny >= 2");
  rule(c.grid.x_lo < c.grid.x_hi && c.grid.y_lo < c.grid.y_hi, "grid", "x_lo < x_hi and y_lo < y_hi");
  rule(c.tau_rel > 0.0 && c.tau_rel < 1.0, "tau_rel", "0 < tau_rel < 1");
  rule(c.quad_count >= 50, "quad_count", "quad_count >= 50");
  rule(c.domain_radius > 0.0, "domain_radius", "domain_radius > 0");
  rule(c.profile.max_radius > 0.0 && c.profile.step > 0.0 && c.profile.step <= c.profile.max_radius, "profile",
       "0 < step <= max_radius");
  rule(c.profile.angles >= 1, "profile.angles", "angles >= 1");
  return out;
}

void require_valid(const ExperimentConfig& config) {
  auto v = validate_config(config);
  if (!v.empty()) throw ConfigError(std::move(v));
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::embedded_presets()) out.push_back(name);
  return out;
}

ExperimentConfig load_preset(std::string_view name) {
  for (const auto& [key, text] : detail::embedded_presets())
    if (key == name) return parse_config(text);
  throw ConfigError("unknown preset " + std::string(name));
}

SupportingCurve build_curve(const CurveConfig& c) {
  switch (c.kind) {
    case CurveConfig::Kind::Polynomial:
      return SupportingCurve::polynomial_graph(Polynomial(c.f), Polynomial(c.g), c.z_lo, c.z_hi);
    case CurveConfig::Kind::Points:
      return SupportingCurve::point_list(c.points, c.z_lo, c.z_hi);
    case CurveConfig::Kind::Point: {
      const double half = 0.5 * c.length;
      return SupportingCurve::polynomial_graph(Polynomial({c.center.x(), 1.0}), Polynomial({c.center.y()}), -half, half);
    }
  }
  throw std::logic_error("unhandled curve kind");
}

std::vector<InclusionSpec> build_inclusions(const ExperimentConfig& config) {
  std::vector<InclusionSpec> out;
  for (const auto& inc : config.inclusions) out.push_back({build_curve(inc.curve), inc.h, inc.eps, inc.mu});
  return out;
}

SteeringMode build_mode(const ModeConfig& mode) {
  if (mode.plain) return PlainExponential{};
  return phi_weighted(mode.phi);
}

FrequencySet build_frequencies(const ExperimentConfig& config, int K) {
  return FrequencySet::from_wavelengths(config.lambda_lo, config.lambda_hi, K, config.spacing);
}

std::optional<Vec2> point_target_center(const ExperimentConfig& config) {
  if (config.inclusions.size() == 1 && config.inclusions.front().curve.kind == CurveConfig::Kind::Point)
    return config.inclusions.front().curve.center;
  return std::nullopt;
}

}  // namespace thinscan
