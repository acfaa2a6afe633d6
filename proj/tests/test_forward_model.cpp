#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "thinscan/forward_model.hpp"

using namespace thinscan;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

SupportingCurve gamma1() {
  return SupportingCurve::polynomial_graph(Polynomial({-0.2, 1.0}), Polynomial({0.4, 0.0, -0.5}), -0.5, 0.5);
}

InclusionSpec gamma1_spec(double eps = 5.0, double mu = 5.0) { return {gamma1(), 0.015, eps, mu}; }

InclusionSpec point_mass(double L, double eps, double mu) {
  return {SupportingCurve::polynomial_graph(Polynomial({0.0, 1.0}), Polynomial({0.0}), -0.5 * L, 0.5 * L), 0.015, eps,
          mu};
}

// A_11 of gamma1 written out by hand: x(z) = [z - 0.2, 0.4 - z^2/2],
// x'(z) = [1, -z], integrated in z with |x'(z)| dz.
cd a11_oracle(double omega, double eps, double mu, int P, int Q) {
  const double vt[2] = {std::cos(2 * kPi / P), std::sin(2 * kPi / P)};
  const double th[2] = {-std::cos(2 * kPi / Q), -std::sin(2 * kPi / Q)};
  const double lt = 2.0 * (1.0 / mu - 1.0), ln = 2.0 * (1.0 - mu);
  auto f = [&](double z) {
    const double speed = std::sqrt(1.0 + z * z);
    const double tx = 1.0 / speed, ty = -z / speed;
    const double nx = -ty, ny = tx;
    const double vt_t = vt[0] * tx + vt[1] * ty, th_t = th[0] * tx + th[1] * ty;
    const double vt_n = vt[0] * nx + vt[1] * ny, th_n = th[0] * nx + th[1] * ny;
    const double amp = (eps - 1.0) + lt * vt_t * th_t + ln * vt_n * th_n;
    const double x = z - 0.2, y = 0.4 - 0.5 * z * z;
    const double phase = -omega * ((vt[0] - th[0]) * x + (vt[1] - th[1]) * y);
    return omega * omega * amp * std::polar(1.0, phase) * speed;
  };
  const oracle::GaussLegendre gl(24);
  return gl.integrate(f, -0.5, 0.5, 32);
}

}  // namespace

TEST_SUITE("forward_model") {

TEST_CASE("make_directions quarter turns") {
  const auto d = make_directions(4, 4);
  const Vec2 want[4] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
  for (int j = 0; j < 4; ++j) {
    CHECK((d.receivers[j] - want[j]).norm() < 1e-15);
    CHECK((d.incidents[j] + want[j]).norm() < 1e-15);
  }
  CHECK_THROWS(make_directions(2, 4));
  CHECK_THROWS(make_directions(4, 2));
}

TEST_CASE("make_directions 24 x 20") {
  const auto d = make_directions(24, 20);
  REQUIRE(d.P() == 24);
  REQUIRE(d.Q() == 20);
  for (int j = 0; j < 24; ++j) {
    CHECK(std::abs(d.receivers[j].norm() - 1.0) < 1e-12);
    const double c = d.receivers[j].dot(d.receivers[(j + 1) % 24]);
    CHECK(c == doctest::Approx(std::cos(kPi / 12)).epsilon(1e-12));
  }
  for (int l = 0; l < 20; ++l) {
    CHECK(std::abs(d.incidents[l].norm() - 1.0) < 1e-12);
    CHECK(d.incidents[l].dot(d.incidents[(l + 1) % 20]) == doctest::Approx(std::cos(kPi / 10)).epsilon(1e-12));
  }
}

TEST_CASE("frequency sets") {
  const auto f = FrequencySet::from_wavelengths(0.3, 0.7, 10, FrequencySpacing::UniformOmega);
  REQUIRE(f.size() == 10);
  CHECK(f.lowest() == 2 * kPi / 0.7);
  CHECK(f.highest() == 2 * kPi / 0.3);
  for (int k = 1; k < 10; ++k)
    CHECK(f.omegas()[k] - f.omegas()[k - 1] == doctest::Approx((f.highest() - f.lowest()) / 9).epsilon(1e-12));

  const auto g = FrequencySet::from_wavelengths(0.3, 0.7, 5, FrequencySpacing::UniformLambda);
  for (int k = 1; k < 5; ++k) {
    const double l0 = 2 * kPi / g.omegas()[k - 1], l1 = 2 * kPi / g.omegas()[k];
    CHECK(l0 - l1 == doctest::Approx(0.1).epsilon(1e-12));
  }

  const auto one = FrequencySet::from_wavelengths(0.5, 0.5, 1, FrequencySpacing::UniformOmega);
  CHECK(one.size() == 1);
  CHECK(one.lowest() == 2 * kPi / 0.5);
  CHECK_THROWS(FrequencySet::from_wavelengths(0.3, 0.7, 1, FrequencySpacing::UniformOmega));
  CHECK_THROWS(FrequencySet::from_wavelengths(0.7, 0.3, 10, FrequencySpacing::UniformOmega));
  CHECK_THROWS(FrequencySet({2.0, 1.0}));
  CHECK_THROWS(FrequencySet({-1.0}));
}

TEST_CASE("point mass gives a constant rank-one matrix") {
  const double L = 1e-4, w = 2 * kPi / 0.5;
  const auto A = assemble_msr(point_mass(L, 5.0, 1.0), Background{}, make_directions(24, 20), w, 400);
  const double want = w * w * L * 4.0;
  for (int j = 0; j < 24; ++j)
    for (int l = 0; l < 20; ++l) CHECK(std::abs(A.entries(j, l) - want) <= 1e-6 * want);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A.entries);
  CHECK(svd.singularValues()[1] / svd.singularValues()[0] < 1e-6);
}

TEST_CASE("permittivity term scales linearly when mu = mu0") {
  const auto dirs = make_directions(12, 10);
  const double w = 2 * kPi / 0.4;
  const auto a = assemble_msr(gamma1_spec(5.0, 1.0), Background{}, dirs, w);
  const auto b = assemble_msr(gamma1_spec(2.0, 1.0), Background{}, dirs, w);
  CHECK((a.entries - 4.0 * b.entries).norm() <= 1e-13 * a.entries.norm());
}

TEST_CASE("A_11 of gamma1 against an independent Gauss-Legendre oracle") {
  const double w = 2 * kPi / 0.5;
  const auto A = assemble_msr(gamma1_spec(), Background{}, make_directions(24, 20), w, 16000);
  const cd want = a11_oracle(w, 5.0, 5.0, 24, 20);
  CHECK(std::abs(A.entries(0, 0) - want) <= 1e-6 * std::abs(want));
}

TEST_CASE("quadrature converges at second order") {
  const double w = 2 * kPi / 0.5;
  const auto dirs = make_directions(24, 20);
  const cd want = a11_oracle(w, 5.0, 5.0, 24, 20);
  const double e1 = std::abs(assemble_msr(gamma1_spec(), Background{}, dirs, w, 200).entries(0, 0) - want);
  const double e2 = std::abs(assemble_msr(gamma1_spec(), Background{}, dirs, w, 400).entries(0, 0) - want);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("reciprocity for permittivity-only contrast") {
  const auto A = assemble_msr(gamma1_spec(5.0, 1.0), Background{}, make_directions(16, 16), 2 * kPi / 0.4);
  CHECK((A.entries - A.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * A.entries.cwiseAbs().maxCoeff());
}

TEST_CASE("multiple inclusions sum") {
  const auto dirs = make_directions(8, 8);
  const double w = 2 * kPi / 0.5;
  const auto g2 = InclusionSpec{
      SupportingCurve::polynomial_graph(Polynomial({0.2, 1.0}), Polynomial({-0.5, 0.0, 1.0, 1.0}), -0.5, 0.5), 0.015,
      10.0, 10.0};
  const std::vector<InclusionSpec> both{gamma1_spec(), g2};
  const auto sum = assemble_msr(both, Background{}, dirs, w);
  const Eigen::MatrixXcd parts =
      assemble_msr(gamma1_spec(), Background{}, dirs, w).entries + assemble_msr(g2, Background{}, dirs, w).entries;
  CHECK((sum.entries - parts).norm() <= 1e-13 * parts.norm());
}

TEST_CASE("parallel assembly is bit-identical to the serial reference") {
  const std::vector<InclusionSpec> incs{gamma1_spec()};
  const auto dirs = make_directions(24, 20);
  const auto a = assemble_msr(incs, Background{}, dirs, 2 * kPi / 0.3);
  const auto b = assemble_msr_serial(incs, Background{}, dirs, 2 * kPi / 0.3);
  CHECK(a.entries == b.entries);
}

TEST_CASE("factorization reproduces the Rayleigh-point sum") {
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.5;
  const auto spec = gamma1_spec();
  const auto A = assemble_msr(spec, Background{}, dirs, w, 2000).entries;
  double prev = INFINITY;
  for (int M : {2, 4, 8, 16}) {
    CAPTURE(M);
    const auto f = factorize_msr(spec, Background{}, dirs, w, M);
    CHECK(f.B.rows() == 24);
    CHECK(f.B.cols() == 3 * M);
    CHECK(f.H.cols() == 20);
    const Eigen::MatrixXcd BDH = f.B * f.D.cast<cd>() * f.H;
    const auto direct = assemble_msr_rayleigh(spec, Background{}, dirs, w, M).entries;
    CHECK((BDH - direct).norm() <= 1e-12 * direct.norm());
    const double err = (direct - A).norm() / A.norm();
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("single on-curve point has rank at most three") {
  const auto dirs = make_directions(24, 24);
  const auto A = assemble_msr_rayleigh(gamma1_spec(), Background{}, dirs, 2 * kPi / 0.5, 1);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A.entries);
  CHECK(svd.singularValues()[3] / svd.singularValues()[0] < 1e-10);
}

TEST_CASE("awgn") {
  const auto dirs = make_directions(24, 20);
  const auto A = assemble_msr(gamma1_spec(), Background{}, dirs, 2 * kPi / 0.5);

  const auto quiet = add_awgn(A, {300.0, 7});
  CHECK((quiet.entries - A.entries).norm() <= 1e-10 * A.entries.norm());

  const auto x = add_awgn(A, {10.0, 42});
  const auto y = add_awgn(A, {10.0, 42});
  CHECK(x.entries == y.entries);
  CHECK(x.entries != add_awgn(A, {10.0, 43}).entries);

  double ratio = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s)
    ratio += (add_awgn(A, {10.0, mix_seed(99, s)}).entries - A.entries).squaredNorm() / A.entries.squaredNorm();
  ratio /= 100.0;
  CHECK(ratio >= 0.08);
  CHECK(ratio <= 0.12);
}

TEST_CASE("noise entries are circular with the requested variance") {
  MsrMatrix Z{1.0, Eigen::MatrixXcd::Constant(60, 60, cd(1.0, 0.0))};
  const auto N = (add_awgn(Z, {0.0, 5}).entries - Z.entries).eval();
  const double n = static_cast<double>(N.size());
  const double re2 = N.real().array().square().sum() / n, im2 = N.imag().array().square().sum() / n;
  const double cross = (N.real().array() * N.imag().array()).sum() / n;
  CHECK(re2 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(im2 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(cross) < 0.05);
}

TEST_CASE("mix_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(mix_seed(7, a, b));
  CHECK(seen.size() == 400);
  CHECK(mix_seed(7, 1, 2) == mix_seed(7, 1, 2));
}

TEST_CASE("MSR CSV round trip is bit-exact") {
  auto A = add_awgn(assemble_msr(gamma1_spec(), Background{}, make_directions(6, 5), 2 * kPi / 0.5), {10.0, 3});
  A.entries(2, 3) = cd(4.9e-324, -0.0);
  std::stringstream buf;
  write_msr_csv(buf, A);
  const auto B = read_msr_csv(buf);
  CHECK(B.omega == A.omega);
  CHECK(B.entries == A.entries);
}

TEST_CASE("MSR CSV rejects malformed input") {
  std::stringstream missing("2,2,1.5\n1,1,0,0\n1,2,0,0\n2,1,0,0\n");
  CHECK_THROWS(read_msr_csv(missing));
  std::stringstream dup("2,2,1.5\n1,1,0,0\n1,2,0,0\n2,1,0,0\n1,1,0,0\n");
  CHECK_THROWS(read_msr_csv(dup));
  std::stringstream junk("2,2,1.5\n1,1,x,0\n1,2,0,0\n2,1,0,0\n2,2,0,0\n");
  CHECK_THROWS(read_msr_csv(junk));
  std::stringstream range("2,2,1.5\n1,1,0,0\n1,2,0,0\n2,1,0,0\n3,2,0,0\n");
  CHECK_THROWS(read_msr_csv(range));
}

}  // TEST_SUITE
