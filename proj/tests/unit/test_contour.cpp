#include <doctest.h>

#include <cmath>

#include "qtrace/contour.hpp"

using namespace qtrace;
using namespace qtrace::contour;

TEST_CASE("gauss legendre") {
  const auto& r = gauss_legendre(10);
  double s = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s += r.weights[i];
    m4 += r.weights[i] * std::pow(r.nodes[i], 4);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m4 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("orientation and enclosed poles") {
  CHECK(std::abs(orientation_calibration() - cplx(1.0, 0.0)) < 1e-12);
  const auto r1 = contour_integrate([](cplx z) { return 1.0 / (z - 1.0); });
  CHECK(std::abs(r1.value - cplx(1.0, 0.0)) < 1e-12);
  const auto r2 = contour_integrate([](cplx z) { return 1.0 / ((z + 3.0) * (z + 3.0)); });
  CHECK(std::abs(r2.value) < 1e-12);
  ContourSpec bad;
  bad.theta0 = 0.4;
  CHECK_THROWS_AS(contour_integrate([](cplx z) { return z; }, bad), std::invalid_argument);
}

TEST_CASE("closed-form residue values") {
  const InversePowerF f1(1.0, 1.0);
  CHECK(std::abs(J_printed(0, 1, f1, 1.0, 0.0) - cplx(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(J(0, 1, f1, 1.0, 0.0) + cplx(0.5, 0.0)) < 1e-15);
  const auto q = residue_by_quadrature(0, 1, f1, 1.0, 0.0);
  CHECK(std::abs(q.value - J(0, 1, f1, 1.0, 0.0)) < 1e-10);

  const InversePowerF f4(1.0, 4.0);
  for (double u : {0.1, 1.0, 10.0})
    for (double v : {0.0, 1.0, 5.0}) {
      const cplx w = f4(cplx(v, std::sqrt(u)));
      CHECK(std::abs(J(0, 0, f4, u, v) - w.imag() / std::sqrt(u)) <= 1e-14 * std::abs(w) / std::sqrt(u));
    }
  CHECK_THROWS_AS(J(0, 0, f4, 0.0, 1.0), std::domain_error);
}

TEST_CASE("closed form agrees with contour quadrature") {
  const InversePowerF f(1.0, 4.0);
  for (int k = 0; k <= 3; ++k)
    for (int nu = 0; nu <= 4; ++nu)
      for (double u : {0.1, 1.0, 10.0})
        for (double v : {0.0, 1.0, 5.0}) {
          const cplx jc = J(k, nu, f, u, v);
          const auto q = residue_by_quadrature(k, nu, f, u, v);
          const double scale = std::max(std::abs(jc), q.abs_scale);
          CHECK(std::abs(jc - q.value) <= 1e-8 * scale);
        }
}

TEST_CASE("series and direct routes agree") {
  const InversePowerF f(1.0, 5.0);
  for (int k = 0; k <= 4; ++k)
    for (int nu = 0; nu <= 3; ++nu)
      for (double u : {0.05, 0.2}) {
        const cplx a = J(k, nu, f, u, 0.7, JRoute::series);
        const cplx b = J(k, nu, f, u, 0.7, JRoute::direct);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
      }
  // Small u: the direct route cancels, the automatic choice must not.
  for (int k = 0; k <= 4; ++k)
    for (int nu = 0; nu <= 3; ++nu) {
      const cplx a = J(k, nu, f, 1e-3, 0.7);
      const auto q = residue_by_quadrature(k, nu, f, 1e-3, 0.7);
      CHECK(std::abs(a - q.value) <= 1e-10 * std::max(std::abs(a), q.abs_scale));
    }
}

TEST_CASE("u-derivative relation") {
  const InversePowerF f(1.0, 4.0);
  for (int nu = 0; nu <= 3; ++nu)
    for (double u : {0.3, 1.0, 4.0}) {
      const double h = 1e-4 * u;
      const cplx fd = (J(0, nu, f, u + h, 0.5) - J(0, nu, f, u - h, 0.5)) / (2 * h);
      const cplx j1 = J(1, nu, f, u, 0.5);
      CHECK(std::abs(j1 + fd) <= 1e-6 * std::abs(j1));
    }
}

TEST_CASE("values are real for real test functions") {
  const InversePowerF f(1.0, 4.5);
  for (int k = 0; k <= 3; ++k)
    for (int nu = 0; nu <= 4; ++nu)
      for (double u : {0.1, 1.0, 10.0}) {
        const cplx j = J(k, nu, f, u, 1.0);
        CHECK(std::abs(j.imag()) <= 1e-12 * std::abs(j));
        CHECK(I(k, nu, f, u, 1.0) == j);
      }
}

TEST_CASE("integration by parts recursion") {
  const InversePowerF f(1.0, 4.0);
  for (int k = 1; k <= 3; ++k)
    for (int nu = 1; nu <= 2; ++nu)
      for (double u : {0.5, 2.0}) {
        const double scale = std::abs(I(k, nu + 1, f, u, 1.0));
        CHECK(std::abs(ibp_residual(k, nu, f, u, 1.0)) <= 1e-9 * std::max(1.0, scale));
      }
  CHECK_THROWS_AS(ibp_residual(0, 1, f, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("behaviour near u = 0") {
  const InversePowerF f(1.0, 4.0);
  for (int l = 1; l <= 3; ++l) {
    const double first = std::abs(I(l, 0, f, 1e-2, 1.0)) * std::pow(1e-2, l - 1);
    for (double u = 1e-3; u >= 1e-6; u /= 10) {
      const double r = std::abs(I(l, 0, f, u, 1.0)) * std::pow(u, l - 1);
      CHECK(std::isfinite(r));
      CHECK(r <= 2.0 * first);
    }
  }
}
