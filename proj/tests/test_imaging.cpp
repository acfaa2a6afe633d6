#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "thinscan/error.hpp"
#include "thinscan/forward_model.hpp"
#include "thinscan/imaging.hpp"

using namespace thinscan;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

SupportingCurve gamma1() {
  return SupportingCurve::polynomial_graph(Polynomial({-0.2, 1.0}), Polynomial({0.4, 0.0, -0.5}), -0.5, 0.5);
}

InclusionSpec point_at(const Vec2& c, double eps, double mu) {
  return {SupportingCurve::polynomial_graph(Polynomial({c.x(), 1.0}), Polynomial({c.y()}), -5e-4, 5e-4), 0.015, eps,
          mu};
}

// A = E(z0) F(z0)^* or E(z0) F(z0)^T built straight from steering vectors.
std::vector<TruncatedSvd> steering_svds(const Vec2& z0, const std::vector<double>& omegas, const DirectionSet& dirs,
                                        const SteeringMode& mode, bool transpose) {
  std::vector<TruncatedSvd> out;
  for (double w : omegas) {
    const auto s = steering_vectors(z0, w, dirs, mode);
    MsrMatrix m{w, transpose ? Eigen::MatrixXcd(s.w_e * s.w_f.transpose()) : Eigen::MatrixXcd(s.w_e * s.w_f.adjoint())};
    out.push_back(truncated_svd(m));
  }
  return out;
}

GridSpec small_grid(int n = 33) { return GridSpec{-1.1, 1.1, -1.1, 1.1, n, n}; }

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("truncated_svd of a rank-one matrix") {
  Eigen::VectorXcd u = Eigen::VectorXcd::Random(7).normalized();
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(5).normalized();
  const auto s = truncated_svd(MsrMatrix{1.0, u * v.transpose()});
  CHECK(s.sigmas[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.m_count == 1);
  const cd phase = s.left.col(0).dot(u);  // conj(U_1) . u
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
  CHECK((s.left.col(0) * phase - u).norm() < 1e-12);
}

TEST_CASE("truncated_svd threshold") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 0.005;
  CHECK(truncated_svd(MsrMatrix{1.0, d}, 0.01).m_count == 1);
  CHECK(truncated_svd(MsrMatrix{1.0, d}, 0.004).m_count == 2);
  CHECK(truncated_svd(MsrMatrix{1.0, Eigen::MatrixXcd::Zero(4, 3)}).m_count == 0);
  CHECK_THROWS_AS(truncated_svd(MsrMatrix{1.0, d}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(truncated_svd(MsrMatrix{1.0, d}, 1.0), std::invalid_argument);
}

TEST_CASE("singular vectors of a noisy MSR are orthonormal") {
  const auto dirs = make_directions(24, 20);
  const InclusionSpec spec{gamma1(), 0.015, 5.0, 5.0};
  const auto A = add_awgn(assemble_msr(spec, Background{}, dirs, 2 * kPi / 0.4), {10.0, 1});
  const auto s = truncated_svd(A);
  for (std::size_t m = 1; m < s.sigmas.size(); ++m) CHECK(s.sigmas[m - 1] >= s.sigmas[m]);
  const Eigen::MatrixXcd UU = s.left.adjoint() * s.left;
  const Eigen::MatrixXcd VV = s.right.adjoint() * s.right;
  CHECK((UU - Eigen::MatrixXcd::Identity(UU.rows(), UU.cols())).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((VV - Eigen::MatrixXcd::Identity(VV.rows(), VV.cols())).cwiseAbs().maxCoeff() < 1e-8);
  for (int m = 0; m < s.left.cols(); ++m) CHECK(std::abs(s.left.col(m).norm() - 1.0) < 1e-10);
}

TEST_CASE("noise-free gamma1 signal subspace respects the rank bound") {
  const auto dirs = make_directions(24, 20);
  const InclusionSpec spec{gamma1(), 0.015, 5.0, 5.0};
  const double w = 2 * kPi / 0.5;
  const auto s = truncated_svd(assemble_msr(spec, Background{}, dirs, w));
  CHECK(s.m_count <= 3 * rayleigh_point_count(spec.curve, w));
  CHECK(s.m_count >= 1);
}

TEST_CASE("property: m_count is non-increasing in tau_rel") {
  const auto dirs = make_directions(24, 20);
  const InclusionSpec spec{gamma1(), 0.015, 5.0, 5.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-4, 0.99);
  for (int trial = 0; trial < 5; ++trial) {
    const auto A = add_awgn(assemble_msr(spec, Background{}, dirs, 2 * kPi / 0.45), {20.0, rng()});
    std::vector<double> taus(30);
    for (auto& t : taus) t = u(rng);
    std::sort(taus.begin(), taus.end());
    int prev = 1 << 30;
    for (double t : taus) {
      const int m = truncated_svd(A, t).m_count;
      CHECK(m <= prev);
      prev = m;
    }
  }
}

TEST_CASE("steering vectors") {
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.5;
  const auto plain = steering_vectors(Vec2::Zero(), w, dirs, PlainExponential{});
  CHECK((plain.w_e - Eigen::VectorXcd::Constant(24, 1.0 / std::sqrt(24.0))).norm() < 1e-15);

  const Vec2 z(0.1, 0.2);
  const auto a = steering_vectors(z, w, dirs, PlainExponential{});
  const auto b = steering_vectors(z, w, dirs, phi_weighted(Eigen::Vector3d(1, 0, 0)));
  CHECK((a.w_e - b.w_e).norm() < 1e-14);
  CHECK((a.w_f - b.w_f).norm() < 1e-14);
  for (int p = 0; p < 24; ++p)
    CHECK(std::abs(a.w_e[p] - std::polar(1.0, -w * dirs.receivers[p].dot(z)) / std::sqrt(24.0)) < 1e-15);

  const auto c = steering_vectors(z, w, dirs, phi_weighted(Eigen::Vector3d(1, 0, 1)));
  CHECK(std::abs(c.w_e.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(c.w_f.norm() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(phi_weighted(Eigen::Vector3d::Zero()), std::invalid_argument);
  DirectionSet opposite{{Vec2(1, 0), Vec2(-1, 0)}, {Vec2(1, 0), Vec2(-1, 0)}};
  CHECK_THROWS_AS(steering_vectors(z, w, opposite, phi_weighted(Eigen::Vector3d(0, 0, 1))), DegenerateSteeringError);
}

TEST_CASE("mode labels and file names") {
  CHECK(mode_label(PlainExponential{}) == "plain");
  CHECK(mode_label(phi_weighted(Eigen::Vector3d(1, 0, 1))) == "phi101");
  CHECK(image_basename("figure_T1", 1, 10) == "figure_T1_n1_K10");
}

TEST_CASE("functional peaks at the steering point") {
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.5;
  const auto mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  const auto svds = steering_svds(Vec2::Zero(), {w}, dirs, mode, false);
  CHECK(functional_value(Vec2::Zero(), svds, dirs, mode, 0) >= 0.99);
  for (int a = 0; a < 16; ++a) {
    const double t = 2 * kPi * a / 16;
    const Vec2 far = (2 * kPi / w + 0.05) * Vec2(std::cos(t), std::sin(t));
    CHECK(functional_value(far, svds, dirs, mode, 0) <= 0.3);
  }
}

TEST_CASE("functional peaks at an off-origin target for the E F^T construction") {
  // The asymptotic MSR factorizes as E F^T; the functional conjugates V, so
  // that is the form that matches away from the origin.
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.5;
  const Vec2 z0(0.3, -0.2);
  for (const SteeringMode& mode : {SteeringMode(PlainExponential{}), phi_weighted(Eigen::Vector3d(1, 0, 1))}) {
    const auto svds = steering_svds(z0, {w}, dirs, mode, true);
    CHECK(functional_value(z0, svds, dirs, mode, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single frequency weight scaling") {
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.4;
  const auto A = assemble_msr(InclusionSpec{gamma1(), 0.015, 5.0, 5.0}, Background{}, dirs, w);
  const std::vector<TruncatedSvd> svds{truncated_svd(A)};
  const SteeringMode mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  const Vec2 z(0.05, 0.31);
  CHECK(functional_value(z, svds, dirs, mode, 1) == w * functional_value(z, svds, dirs, mode, 0));
}

TEST_CASE("functional_value errors") {
  const auto dirs = make_directions(6, 5);
  CHECK_THROWS_AS(functional_value(Vec2::Zero(), {}, dirs, PlainExponential{}, 0), std::invalid_argument);
  const std::vector<TruncatedSvd> zero{truncated_svd(MsrMatrix{1.0, Eigen::MatrixXcd::Zero(6, 5)})};
  CHECK_THROWS_AS(functional_value(Vec2::Zero(), zero, dirs, PlainExponential{}, 0), NumericalError);
  CHECK_THROWS_AS(compute_image(zero, dirs, PlainExponential{}, 0, small_grid()), NumericalError);
  const std::vector<TruncatedSvd> wrong{truncated_svd(MsrMatrix{1.0, Eigen::MatrixXcd::Ones(5, 5)})};
  CHECK_THROWS_AS(functional_value(Vec2::Zero(), wrong, dirs, PlainExponential{}, 0), std::invalid_argument);
}

TEST_CASE("property: gauge invariance of singular pairs") {
  const auto dirs = make_directions(24, 20);
  const InclusionSpec spec{gamma1(), 0.015, 5.0, 5.0};
  std::vector<TruncatedSvd> svds;
  for (double lam : {0.7, 0.5, 0.3})
    svds.push_back(truncated_svd(add_awgn(assemble_msr(spec, Background{}, dirs, 2 * kPi / lam), {10.0, 3})));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi), pos(-1.0, 1.0);
  auto rotated = svds;
  for (auto& s : rotated) {
    for (int m = 0; m < s.left.cols(); ++m) {
      const cd g = std::polar(1.0, ang(rng));
      s.left.col(m) *= g;
      s.right.col(m) *= g;
    }
  }
  const SteeringMode mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  for (int i = 0; i < 50; ++i) {
    const Vec2 z(pos(rng), pos(rng));
    CHECK(std::abs(functional_value(z, svds, dirs, mode, 1) - functional_value(z, rotated, dirs, mode, 1)) <=
          1e-12 * functional_value(z, svds, dirs, mode, 1) + 1e-14);
  }
}

TEST_CASE("property: translation covariance") {
  const auto dirs = make_directions(24, 20);
  const Vec2 shift(0.1, -0.05);
  const auto moved_curve = SupportingCurve::polynomial_graph(Polynomial({-0.2 + shift.x(), 1.0}),
                                                             Polynomial({0.4 + shift.y(), 0.0, -0.5}), -0.5, 0.5);
  const InclusionSpec a{gamma1(), 0.015, 5.0, 5.0}, b{moved_curve, 0.015, 5.0, 5.0};
  std::vector<TruncatedSvd> sa, sb;
  for (double lam : {0.7, 0.45, 0.3}) {
    sa.push_back(truncated_svd(assemble_msr(a, Background{}, dirs, 2 * kPi / lam)));
    sb.push_back(truncated_svd(assemble_msr(b, Background{}, dirs, 2 * kPi / lam)));
  }
  GridSpec ga = small_grid(25), gb = ga;
  gb.x_lo += shift.x();
  gb.x_hi += shift.x();
  gb.y_lo += shift.y();
  gb.y_hi += shift.y();
  const SteeringMode mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  const auto ia = compute_image(sa, dirs, mode, 1, ga), ib = compute_image(sb, dirs, mode, 1, gb);
  double worst = 0.0;
  for (std::size_t c = 0; c < ia.values.size(); ++c) worst = std::max(worst, std::abs(ia.values[c] - ib.values[c]));
  CHECK(worst <= 1e-6 * ia.max());
}

TEST_CASE("property: K = 1 maps coincide for every n after normalization") {
  const auto dirs = make_directions(24, 20);
  const std::vector<TruncatedSvd> svds{
      truncated_svd(assemble_msr(InclusionSpec{gamma1(), 0.015, 5.0, 5.0}, Background{}, dirs, 2 * kPi / 0.5))};
  const SteeringMode mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  const auto base = compute_image(svds, dirs, mode, 0, small_grid()).normalized();
  for (int n : {1, 2, 5}) {
    const auto other = compute_image(svds, dirs, mode, n, small_grid()).normalized();
    for (std::size_t c = 0; c < base.size(); ++c) CHECK(std::abs(base[c] - other[c]) < 1e-12);
  }
}

TEST_CASE("correspondence between steering vector and left singular vector") {
  const auto dirs = make_directions(24, 20);
  const double w = 2 * kPi / 0.5;
  const Vec2 x1(0.2, -0.3);
  // Permittivity-only point: rank one, U_1 is the plain steering vector.
  const auto A = assemble_msr_rayleigh(point_at(x1, 5.0, 1.0), Background{}, dirs, w, 1);
  const auto s = truncated_svd(A);
  const auto e = steering_vectors(x1, w, dirs, PlainExponential{}).w_e;
  double best = 0.0;
  for (int m = 0; m < s.m_count; ++m) best = std::max(best, std::abs(e.dot(s.left.col(m))));
  CHECK(best >= 0.99);

  // With material contrast in both terms the phi-weighted vector lies in the
  // signal subspace.
  const auto B = assemble_msr_rayleigh(point_at(x1, 5.0, 5.0), Background{}, dirs, w, 1);
  const auto t = truncated_svd(B);
  const auto f = steering_vectors(x1, w, dirs, phi_weighted(Eigen::Vector3d(1, 0, 1))).w_e;
  CHECK(t.m_count == 3);
  CHECK((t.left.leftCols(t.m_count).adjoint() * f).norm() >= 0.99);
}

TEST_CASE("point target image peaks at the target cell") {
  const auto dirs = make_directions(24, 20);
  const auto freqs = FrequencySet::from_wavelengths(0.3, 0.7, 10, FrequencySpacing::UniformOmega);
  std::vector<TruncatedSvd> svds;
  for (double w : freqs.omegas())
    svds.push_back(truncated_svd(assemble_msr(point_at(Vec2::Zero(), 5.0, 1.0), Background{}, dirs, w)));
  const GridSpec grid{-1.1, 1.1, -1.1, 1.1, 129, 129};
  const auto img = compute_image(svds, dirs, PlainExponential{}, 0, grid);
  const auto it = std::max_element(img.values.begin(), img.values.end());
  const int idx = static_cast<int>(it - img.values.begin());
  CHECK(idx / grid.ny == 64);
  CHECK(idx % grid.ny == 64);
}

TEST_CASE("parallel image is bit-identical to the serial reference") {
  const auto dirs = make_directions(24, 20);
  std::vector<TruncatedSvd> svds;
  for (double lam : {0.7, 0.5, 0.3})
    svds.push_back(truncated_svd(add_awgn(
        assemble_msr(InclusionSpec{gamma1(), 0.015, 5.0, 5.0}, Background{}, dirs, 2 * kPi / lam), {10.0, 9})));
  const SteeringMode mode = phi_weighted(Eigen::Vector3d(1, 0, 1));
  const auto a = compute_image(svds, dirs, mode, 1, small_grid(40));
  const auto b = compute_image_serial(svds, dirs, mode, 1, small_grid(40));
  CHECK(a.values == b.values);
  CHECK(a.K == 3);
  CHECK(a.mode == "phi101");
}

TEST_CASE("image exports") {
  ImageMap img;
  img.grid = GridSpec{0.0, 2.0, 0.0, 3.0, 2, 3};
  img.values = {1, 2, 3, 4, 5, 8};
  std::stringstream csv;
  write_image_csv(csv, img);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x,y,value");
  std::getline(csv, line);
  CHECK(line == "0.5,0.5,0.125");
  std::stringstream pgm;
  write_image_pgm(pgm, img);
  const std::string s = pgm.str();
  const std::string header = "P5\n2 3\n255\n";
  REQUIRE(s.size() == header.size() + 6);
  CHECK(s.substr(0, header.size()) == header);
  // top row is max y: cells (0,2) and (1,2) = 3/8 and 8/8
  CHECK(static_cast<unsigned char>(s[header.size()]) == std::lround(255 * 3.0 / 8));
  CHECK(static_cast<unsigned char>(s[header.size() + 1]) == 255);
}

}  // TEST_SUITE
