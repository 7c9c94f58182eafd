#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qtrace/qepver.hpp"

using namespace qtrace;
using namespace qtrace::qepver;

namespace {

QuadPencil scalar(double l0, double l1) {
  return QuadPencil(Eigen::MatrixXd::Constant(1, 1, l0), Eigen::MatrixXd::Constant(1, 1, l1));
}

bool lex(cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); }

}  // namespace

TEST_CASE("scalar pencils") {
  auto ev = companion_eigenvalues(scalar(2, 3));
  std::sort(ev.begin(), ev.end(), lex);
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0] - cplx(-2, 0)) < 1e-14);
  CHECK(std::abs(ev[1] - cplx(-1, 0)) < 1e-14);

  ev = companion_eigenvalues(scalar(1, 0));
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(ev[0] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(ev[1] - cplx(0, 1)) < 1e-14);
}

TEST_CASE("companion eigenvalues are determinant roots") {
  const auto p = random_pencil(4, 99);
  auto a = companion_eigenvalues(p);
  auto b = determinant_roots(p);
  REQUIRE(a.size() == 8);
  REQUIRE(b.size() == 8);
  for (const auto& l : a) {
    double best = 1e300;
    for (const auto& r : b) best = std::min(best, std::abs(l - r));
    CHECK(best < 1e-8 * std::max(1.0, std::abs(l)));
    const double det = std::abs(p.at(l).determinant());
    CHECK(det < 1e-6 * std::pow(std::max(1.0, std::abs(l)), 8) * p.L0().norm());
  }
}

TEST_CASE("trace identity") {
  CHECK(trace_identity_residual(scalar(2, 3), cplx(0, 10), 2) < 1e-10);
  CHECK(lidskii_residual(scalar(2, 3), cplx(0, 10), 2) < 1e-10);
  const auto p = random_pencil(5, 1234);
  CHECK(trace_identity_residual(p, cplx(-5, 5), 3) < 1e-9);
  CHECK(lidskii_residual(p, cplx(-5, 5), 3) < 1e-8);
  CHECK_THROWS_AS(trace_rhs(p, cplx(-5, 5), kMaxDerivativeOrder + 1), std::invalid_argument);
  CHECK_THROWS_AS(trace_identity_residual(scalar(2, 3), cplx(-1, 0), 1), std::domain_error);
}

TEST_CASE("ensemble of random pencils") {
  for (int i = 0; i < 20; ++i) {
    const auto p = random_pencil(1 + i % 8, 500 + i);
    const cplx z = std::polar(10.0, std::numbers::pi * (0.6 + 0.8 * i / 20.0));
    const int k = 1 + i % 4;
    CHECK(trace_identity_residual(p, z, k) < 1e-9);
    CHECK(lidskii_residual(p, z, k) < 1e-8);
  }
}

TEST_CASE("nearly defective pencil") {
  // z^2 + 2(1 + e) z + 1 has roots -1-e +- sqrt(e(2+e)), within ~1e-6 of each other.
  const double e = 1e-13;
  const auto p = scalar(1.0, 2.0 * (1.0 + e));
  for (int k = 1; k <= 4; ++k) {
    CHECK(trace_identity_residual(p, cplx(0.5, 0.5), k) < 1e-6);
    CHECK(lidskii_residual(p, cplx(0.5, 0.5), k) < 1e-6);
  }
}

TEST_CASE("pencil validation") {
  Eigen::MatrixXd l0(2, 2), l1 = Eigen::MatrixXd::Zero(2, 2);
  l0 << 1, 0, 0, -1;
  CHECK_THROWS_AS(QuadPencil(l0, l1), std::invalid_argument);
  l0 << 1, 2, 0, 1;
  CHECK_THROWS_AS(QuadPencil(l0, l1), std::invalid_argument);
}

TEST_CASE("vanishing damping gives imaginary spectrum") {
  Eigen::MatrixXd l0(3, 3);
  l0 << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const QuadPencil p(l0, Eigen::MatrixXd::Zero(3, 3));
  const auto ev = companion_eigenvalues(p);
  for (const auto& l : ev) CHECK(std::abs(l.real()) < 1e-10 * std::abs(l));
  CHECK(location_check(ev).empty());
}

TEST_CASE("spectrum is closed under conjugation") {
  const auto ev = companion_eigenvalues(random_pencil(6, 77));
  for (const auto& l : ev) {
    double best = 1e300;
    for (const auto& m : ev) best = std::min(best, std::abs(std::conj(l) - m));
    CHECK(best < 1e-10 * std::max(1.0, std::abs(l)));
  }
}

TEST_CASE("discretised harmonic pencil") {
  const auto p = discretize_1d(parse_polynomial("x1^2", 1), 6.0, 200);
  CHECK(p.size() == 200);
  const auto ev = smallest_eigenvalues(p, 8);
  CHECK(ev.size() >= 4);
  CHECK(location_check(ev).empty());
  CHECK_THROWS_AS(discretize_1d(parse_polynomial("x1^2", 1), 6.0, 8), std::invalid_argument);
}

TEST_CASE("counting profile") {
  std::vector<cplx> ev;
  for (int n = 1; n <= 400; ++n) ev.emplace_back(0.0, std::sqrt(static_cast<double>(n)));
  const auto c = counting_profile(ev, {0.5, 2.0, 4.0, 8.0, 16.0, 100.0});
  CHECK(c.counts.at(0.5) == 0);
  CHECK(c.counts.at(100.0) == 400);
  CHECK(c.saturated);
  CHECK(c.slope >= 1.0);
  CHECK(c.slope <= 3.5);
  CHECK(c.slope == doctest::Approx(2.0).epsilon(0.1));
}
