#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtrace/polynomial.hpp"

using namespace qtrace;

namespace {

MultiPoly random_poly(std::mt19937_64& rng, int dim, int max_degree, int n_terms) {
  std::uniform_int_distribution<int> ex(0, max_degree);
  std::uniform_real_distribution<double> co(-2.0, 2.0);
  MultiPoly::TermMap terms;
  for (int i = 0; i < n_terms; ++i) {
    Exponent e(dim);
    int left = max_degree;
    for (auto& v : e) {
      v = std::uniform_int_distribution<int>(0, left)(rng);
      left -= v;
    }
    terms[e] += co(rng);
  }
  (void)ex;
  return MultiPoly(dim, terms);
}

}  // namespace

TEST_CASE("leading part") {
  const auto p = parse_polynomial("x1^4 + 3*x1*x2 + x2^2 + 1", 2);
  CHECK(leading_part(p) == parse_polynomial("x1^4", 2));

  const auto ex1 = parse_polynomial("x1^4+x2^4+x3^4+x4^4+x5^4+7*x1^2*x2^2", 5);
  CHECK(leading_part(ex1) == ex1);
  CHECK(leading_part(MultiPoly::constant(2, 3.0)) == MultiPoly::constant(2, 3.0));
  CHECK_THROWS_WITH_AS(leading_part(MultiPoly(2)), "empty polynomial", std::invalid_argument);
}

TEST_CASE("ellipticity") {
  const auto s4 = MultiPoly::power_sum(5, 4);
  const auto cert = is_elliptic(s4);
  CHECK(cert.elliptic);
  CHECK(cert.min_value == doctest::Approx(0.2).epsilon(1e-6));
  for (double c : cert.direction) CHECK(std::abs(c) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-3));

  CHECK_FALSE(is_elliptic(parse_polynomial("x1^4 - x2^4", 2)).elliptic);
  CHECK(is_elliptic(parse_polynomial("x1^4+x2^4+x3^4+x4^4+x5^4+7*x1^2*x2^2", 5)).elliptic);
  CHECK_THROWS_WITH_AS(is_elliptic(parse_polynomial("x1 + x2", 2)), "degree below 2", std::invalid_argument);
}

TEST_CASE("derivatives") {
  CHECK(derivative(parse_polynomial("x1^2*x2", 2), {1, 0}) == parse_polynomial("2*x1*x2", 2));
  CHECK(derivative(MultiPoly::power_sum(5, 4), {4, 0, 0, 0, 0}) == MultiPoly::constant(5, 24.0));
  CHECK(derivative(parse_polynomial("7*x1^2*x2^2", 2), {2, 2}) == MultiPoly::constant(2, 28.0));
  CHECK(derivative(parse_polynomial("x1^2", 2), {0, 1}).is_zero());
}

TEST_CASE("evaluation") {
  const std::vector<double> ones(5, 1.0);
  CHECK(MultiPoly::power_sum(5, 4).evaluate(ones) == 5.0);
  const std::vector<double> x{1, 1, 0, 0, 0};
  CHECK(parse_polynomial("x1^4+x2^4+x3^4+x4^4+x5^4+7*x1^2*x2^2", 5).evaluate(x) == 9.0);
  const std::vector<double> zero(3, 0.0);
  CHECK(parse_polynomial("x1^3 - 2*x2*x3 + 4.5", 3).evaluate(zero) == 4.5);
  const std::vector<double> bad(2, 0.0);
  CHECK_THROWS_AS(parse_polynomial("x1", 3).evaluate(bad), std::invalid_argument);
}

TEST_CASE("scaling reduction") {
  auto r = scaling_reduce({1.0, 1.0}, 1.0, 2);
  CHECK(r.hbar == 1.0);
  CHECK(r.z == std::complex<double>(1.0, 1.0));

  r = scaling_reduce(8.0, 8.0, 2);
  CHECK(r.hbar == doctest::Approx(std::pow(8.0, -1.5)).epsilon(1e-15));
  CHECK(r.hbar == doctest::Approx(0.044194).epsilon(1e-5));
  CHECK(r.z == std::complex<double>(1.0, 0.0));
  CHECK(std::pow(r.hbar, -2.0 / 3.0) == doctest::Approx(8.0).epsilon(1e-14));

  r = scaling_reduce(0.0, 2.0, 3);
  CHECK(r.z == std::complex<double>(0.0, 0.0));
  CHECK(r.hbar == doctest::Approx(std::pow(2.0, -4.0 / 3.0)).epsilon(1e-15));

  CHECK_THROWS_AS(scaling_reduce(1.0, 0.0, 2), std::domain_error);
  CHECK_THROWS_AS(scaling_reduce(1.0, -1.0, 2), std::domain_error);

  for (int m = 2; m <= 8; ++m)
    for (double tau : {0.3, 1.7, 10.0, 1234.5}) {
      const auto s = scaling_reduce(1.0, tau, m);
      CHECK(std::pow(s.epsilon, m + 1) == doctest::Approx(s.hbar).epsilon(1e-14));
    }
}

TEST_CASE("text and json round trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_poly(rng, 1 + i % 4, 6, 6);
    const auto back = parse_polynomial(p.to_string(), p.dim());
    REQUIRE(back.terms().size() == p.terms().size());
    for (const auto& [e, c] : p.terms()) CHECK(back.coefficient(e) == c);
    CHECK(poly_from_json(poly_to_json(p)) == p);
  }
  CHECK(parse_polynomial("x^2") == parse_polynomial("x1^2", 1));
  CHECK_THROWS_AS(parse_polynomial("x1^^2"), std::invalid_argument);
}

TEST_CASE("derivatives commute and compose") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 3;
    const auto p = random_poly(rng, d, 6, 8);
    Exponent a(d), b(d), ab(d);
    for (int k = 0; k < d; ++k) {
      a[k] = static_cast<int>(rng() % 3);
      b[k] = static_cast<int>(rng() % 3);
      ab[k] = a[k] + b[k];
    }
    CHECK(derivative(derivative(p, a), b) == derivative(p, ab));
    CHECK(derivative(derivative(p, b), a) == derivative(p, ab));
  }
}

TEST_CASE("derivative matches central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const int d = 1 + i % 3;
    const auto p = random_poly(rng, d, 3 + i % 2, 8);
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    for (int axis = 0; axis < d; ++axis) {
      Exponent g(d, 0);
      g[axis] = 1;
      const double h = 1e-5;
      auto xp = x, xm = x;
      xp[axis] += h;
      xm[axis] -= h;
      const double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
      const double exact = derivative(p, g).evaluate(x);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("derivative table agrees with derivative") {
  const auto p = parse_polynomial("x1^4 + 2*x1^2*x2^3 - x3 + 5*x2*x3^2", 3);
  const std::vector<Exponent> gs{{0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {0, 0, 2}, {4, 0, 0}};
  DerivativeTable table(p, gs);
  const std::vector<double> x{0.3, -1.2, 0.7};
  std::vector<double> out(gs.size());
  table.evaluate(x, out);
  for (std::size_t i = 0; i < gs.size(); ++i)
    CHECK(out[i] == doctest::Approx(derivative(p, gs[i]).evaluate(x)).epsilon(1e-14));
}
