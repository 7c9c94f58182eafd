#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtrace/testfun.hpp"

using namespace qtrace;

TEST_CASE("derivatives of the inverse power") {
  const InversePowerF f7(1.0, 7.0);
  CHECK(f7.deriv(0, 0.0) == cplx(1.0, 0.0));
  CHECK(f7.deriv(1, 0.0) == cplx(-7.0, 0.0));
  const InversePowerF f4(1.0, 4.0);
  CHECK(f4.deriv_real(3, 1.0) == doctest::Approx(-0.9375).epsilon(1e-15));
  CHECK_THROWS_AS(f4.deriv(0, cplx(-1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(InversePowerF(1.5, 2.5).deriv(0, cplx(-3.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(InversePowerF(0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(InversePowerF(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("taylor coefficients") {
  const InversePowerF f(1.0, 4.5);
  const cplx s(0.4, -0.3);
  double fact = 1.0;
  for (int q = 0; q <= 6; ++q) {
    if (q > 0) fact *= q;
    const cplx ref = f.deriv(q, s) / fact;
    CHECK(std::abs(f.taylor(q, s) - ref) <= 1e-13 * std::abs(ref));
  }
}

TEST_CASE("admissibility") {
  CHECK(decay_admissible(InversePowerF(1.0, 7.0), 5, 4));
  CHECK_FALSE(decay_admissible(InversePowerF(1.0, 6.0), 5, 4));
  CHECK(decay_admissible(InversePowerF(1.0, 2.0), 1, 2));
  CHECK(decay_threshold(5, 4) == 6.25);
  CHECK(decay_threshold(1, 2) == 1.5);
  CHECK(default_mu(5, 4) == 7.0);
  CHECK(default_mu(1, 2) == 2.0);
  CHECK_FALSE(decay_admissible(InversePowerF(1.0, 6.25), 5, 4));
}

TEST_CASE("sector membership") {
  const SectorSpec s{1.0, 0.1};
  CHECK(in_sector(-2.0, s));
  CHECK_FALSE(in_sector(2.0, s));
  CHECK_FALSE(in_sector(-0.5, s));
  CHECK_FALSE(in_sector(cplx(0.0, 3.0), s));
  CHECK(in_sector(std::polar(3.0, 0.75 * std::numbers::pi), s));
}

TEST_CASE("derivatives match finite differences") {
  for (double mu : {2.0, 4.0, 3.5, 7.0}) {
    const InversePowerF f(1.0, mu);
    for (double s = 0.0; s <= 10.0; s += 0.5)
      for (int k = 1; k <= 4; ++k) {
        const double h = 4e-3 * (1.0 + s);
        auto g = [&](double y) { return f.deriv_real(k - 1, y); };
        const double fd = (g(s - 2 * h) - 8 * g(s - h) + 8 * g(s + h) - g(s + 2 * h)) / (12 * h);
        const double ex = f.deriv_real(k, s);
        CHECK(std::abs(fd - ex) <= 1e-6 * std::abs(ex));
      }
  }
}

TEST_CASE("decay on the sector") {
  const InversePowerF f(1.0, 4.0);
  const SectorSpec s{1.0, 0.1};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double r = 1.0 + 0.5 * i;
    const double th = std::numbers::pi / 2 + 0.1 + (std::numbers::pi - 0.2) * (i % 17 + 0.5) / 17.0;
    const cplx z = std::polar(r, th);
    REQUIRE(in_sector(z, s));
    worst = std::max(worst, std::abs(f(z)) * std::pow(1.0 + r, 4.0));
  }
  CHECK(worst < 1e3);
}

TEST_CASE("schwarz symmetry") {
  for (double mu : {3.0, 4.5})
    for (int k = 0; k <= 5; ++k) {
      const InversePowerF f(1.3, mu);
      const cplx s(0.7, 2.1);
      const cplx a = std::conj(f.deriv(k, s));
      const cplx b = f.deriv(k, std::conj(s));
      CHECK(std::abs(a - b) <= 1e-14 * std::abs(a));
    }
}

TEST_CASE("linearity helpers") {
  const InversePowerF f(1.0, 4.0);
  const auto g = f.scaled(2.5);
  CHECK(g.scale() == 2.5);
  CHECK(std::abs(g.deriv(2, 0.3) - 2.5 * f.deriv(2, 0.3)) < 1e-15);
  const DerivativeOf d(f, 2);
  CHECK(d.deriv(1, 0.3) == f.deriv(3, 0.3));
}
