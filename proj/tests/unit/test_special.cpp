#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtrace/special.hpp"

using namespace qtrace::special;
using std::numbers::pi;

TEST_CASE("gamma") {
  CHECK(qtrace::special::gamma(5.0) == 24.0);
  CHECK(qtrace::special::gamma(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(qtrace::special::gamma(3.5) == doctest::Approx(15.0 * std::sqrt(pi) / 8.0).epsilon(1e-15));
  for (double x : {0.3, 1.7, 4.2, 9.9}) CHECK(lanczos_gamma(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
  CHECK_THROWS_AS(qtrace::special::gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(qtrace::special::gamma(-2.0), std::domain_error);
}

TEST_CASE("plain moments") {
  CHECK(b_plain(2, 2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(b_plain(4, 5) == doctest::Approx(std::pow(pi, 3) / 12).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(b_plain(3, 6), "divergent moment integral", std::domain_error);
}

TEST_CASE("weighted moments") {
  CHECK(b_one(5, 5) == doctest::Approx(std::pow(pi, 3) / 96).epsilon(1e-14));
  CHECK(b_one(5, 5) == doctest::Approx(0.322982).epsilon(1e-6));
  CHECK(b_one(6, 5) == doctest::Approx(std::pow(pi, 3) / 320).epsilon(1e-14));

  // The finiteness boundary for b_{j,2}(5) is j = 9/2, so j = 5 is convergent and j = 4 is not.
  const auto [q52, e52] = b_general_quadrature(5, 2, 0, 5);
  CHECK(b_two(5, 5) == doctest::Approx(q52).epsilon(1e-10));
  CHECK_THROWS_WITH_AS(b_two(4, 5), "divergent moment integral", std::domain_error);
  CHECK_THROWS_AS(b_oneone(4, 5), std::domain_error);
  CHECK(b_oneone(6, 5) == doctest::Approx(pi * b_oneone_printed(6, 5)).epsilon(1e-15));
}

TEST_CASE("sphere moments") {
  CHECK(sphere_moment({0}, 3) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(sphere_moment({}, 3) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_moment({1, 0}, 3), std::invalid_argument);
  CHECK_THROWS_AS(sphere_moment({2, 0, 0, 0}, 3), std::invalid_argument);

  // M(0, d) reproduces b_j through \int u^{d/2-1} (1+u)^{-j} du = B(d/2, j - d/2).
  for (int d : {1, 2, 3, 5, 7})
    for (int j = d / 2 + 1; j < d / 2 + 5; ++j)
      CHECK(sphere_moment({0}, d) * beta(d / 2.0, j - d / 2.0) == doctest::Approx(b_plain(j, d)).epsilon(1e-13));
  // M(2 e_1, d) reproduces b_{j,1}.
  for (int d : {3, 5, 7}) {
    const int j = d / 2 + 3;
    CHECK(sphere_moment({2}, d) * beta(d / 2.0 + 1, j - d / 2.0 - 1) == doctest::Approx(b_one(j, d)).epsilon(1e-13));
  }
}

TEST_CASE("moment identities") {
  for (int d : {1, 2, 3, 4, 5, 7, 9})
    for (int j = d / 2 + 2; j < d / 2 + 8; ++j) {
      CHECK(b_one(j, d) * d + b_plain(j, d) == doctest::Approx(b_plain(j - 1, d)).epsilon(1e-13));
      CHECK(b_plain(j, d) < b_plain(j - 1, d));
      CHECK(b_one(j + 1, d) < b_one(j, d));
    }
  for (int d : {5, 7})
    for (int j = (d + 4) / 2 + 1; j < 12; ++j) {
      CHECK(b_two(j + 1, d) < b_two(j, d));
      CHECK(b_oneone(j + 1, d) < b_oneone(j, d));
      CHECK(b_two(j, d) > 0.0);
    }
}

TEST_CASE("closed forms agree with radial quadrature") {
  for (int d : {3, 5, 7})
    for (int k = 0; k <= 2; ++k)
      for (int l = 0; l <= 1; ++l)
        for (int j = k + l + d / 2 + 1; j <= k + l + d / 2 + 3; ++j) {
          const auto [q, err] = b_general_quadrature(j, k, l, d);
          CHECK(b_general(j, k, l, d) == doctest::Approx(q).epsilon(1e-10));
          (void)err;
        }
  CHECK(b_general(6, 1, 0, 5) == doctest::Approx(b_one(6, 5)).epsilon(1e-13));
  CHECK(b_general(6, 2, 0, 5) == doctest::Approx(b_two(6, 5)).epsilon(1e-13));
  CHECK(b_general(6, 1, 1, 5) == doctest::Approx(b_oneone(6, 5)).epsilon(1e-13));
}

TEST_CASE("a coefficients") {
  for (int d : {5, 7}) {
    const auto a = a_coeffs(d);
    CHECK(a.a1 == doctest::Approx((16 * b_two(6, d) - 8 * b_one(5, d) + b_plain(4, d)) / 96).epsilon(1e-14));
    CHECK(a.a1_combo ==
          doctest::Approx(b_two(6, d) / 6 - b_one(5, d) / 3 + b_plain(4, d) / 96).epsilon(1e-14));
    CHECK(a.discrepancy == doctest::Approx(std::abs(a.a1 - a.a1_combo)).epsilon(1e-14));
    CHECK(a.discrepancy > 0.0);
    CHECK(a.a2 == b_oneone(6, d));
    CHECK(a.a2 > 0.0);
  }
  CHECK_THROWS_AS(a_coeffs(3), std::domain_error);
}

TEST_CASE("memoised table") {
  BTable t(5);
  CHECK(t(5) == doctest::Approx(b_plain(5, 5)).epsilon(1e-15));
  CHECK(t(6, 1, 1) == doctest::Approx(b_oneone(6, 5)).epsilon(1e-13));
  const auto snap = t.snapshot();
  CHECK(snap.size() == 2);
  for (const auto& [key, v] : snap) CHECK(v > 0.0);
}
