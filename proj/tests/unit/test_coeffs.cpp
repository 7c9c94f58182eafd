#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qtrace/coeffs.hpp"
#include "qtrace/special.hpp"

using namespace qtrace;
using namespace qtrace::coeffs;
using std::numbers::pi;

namespace {

Integrator mapped(double scale = 1.0, int panels = 16, int order = 32) {
  Integrator in;
  in.kind = Integrator::Kind::mapped;
  in.scale = scale;
  in.panels = panels;
  in.order = order;
  return in;
}

}  // namespace

TEST_CASE("one-dimensional C2 closed form") {
  const auto p = parse_polynomial("x1^2", 1);
  const InversePowerF f(1.0, 4.0);
  const auto r = c2_closed(1, p, f, mapped());
  CHECK(r.value == doctest::Approx(30.0 * special::beta(1.5, 5.5)).epsilon(1e-9));
  CHECK(r.value == doctest::Approx(1.932815793).epsilon(1e-8));

  const auto r2 = c2_closed(1, p, f.scaled(2.0), mapped());
  CHECK(r2.value == doctest::Approx(2.0 * r.value).epsilon(1e-13));
}

TEST_CASE("three-dimensional C2 is positive") {
  const auto p = parse_polynomial("x1^2 + x2^2 + x3^2", 3);
  const auto r = c2_closed(3, p, InversePowerF(1.0, 6.0), mapped(1.0, 8, 16));
  CHECK(r.value > 0.0);
}

TEST_CASE("parity and dimension preconditions") {
  const auto p1 = parse_polynomial("x1^2", 1);
  const auto p2 = parse_polynomial("x1^2 + x2^2", 2);
  const InversePowerF f(1.0, 4.0);
  CHECK_THROWS_AS(c0_even(1, p1, f, mapped()), std::invalid_argument);
  CHECK_THROWS_AS(c0_odd_check(2, p2, f, mapped()), std::invalid_argument);
  CHECK_THROWS_AS(c2_closed(2, p2, f, mapped()), std::invalid_argument);
  const std::vector<double> x(2, 0.0);
  CHECK_THROWS_AS(c4_density_printed(3, parse_polynomial("x1^2+x2^2+x3^2", 3), f, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_admissible(InversePowerF(1.0, 1.2), p1), std::invalid_argument);
  CHECK_NOTHROW(check_admissible(InversePowerF(1.0, 1.6), p1));
}

TEST_CASE("even-dimension C0 is negative for d = 2") {
  const auto p = parse_polynomial("x1^2 + x2^2", 2);
  const auto r = c0_even(2, p, InversePowerF(1.0, 4.0), mapped(1.0, 8, 16));
  CHECK(r.value < 0.0);
}

TEST_CASE("printed C4 density values") {
  const InversePowerF f(1.0, 7.0);
  const auto s4 = MultiPoly::power_sum(5, 4);
  const std::vector<double> origin(5, 0.0);
  const auto rep = c4_density_printed(5, s4, f, origin);
  CHECK(rep.parts.at("A0 f") == doctest::Approx(5 * std::pow(pi, 3)).epsilon(1e-14));
  CHECK(rep.value == doctest::Approx(5 * std::pow(pi, 3)).epsilon(1e-14));

  const auto quad = parse_polynomial("2*x1^2 + x2^2 + x3^2 + 3*x4^2 + x5^2 + x1*x2", 5);
  const std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.7};
  CHECK(c4_density_printed(5, quad, f, x).parts.at("A0 f") == 0.0);
}

TEST_CASE("density parts sum to the value") {
  const InversePowerF f(1.0, 7.0);
  const auto p = parse_polynomial("x1^4+x2^4+x3^4+x4^4+x5^4+7*x1^2*x2^2", 5);
  const std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.7};
  for (const auto& rep :
       {c4_density_printed(5, p, f, x), c4_density_printed(5, p, f, x, PrintedForm::b_form),
        density_from_symbols(2, 5, p, f, x)}) {
    double s = 0.0, a = 0.0;
    for (const auto& [k, v] : rep.parts) {
      s += v;
      a += std::abs(v);
    }
    CHECK(std::abs(s - rep.value) <= 1e-12 * std::max(a, 1e-300));
  }
}

TEST_CASE("compiled density agrees with the concrete symbol route") {
  const InversePowerF f(1.0, 6.0);
  const auto p = parse_polynomial("x1^2 + 2*x2^2 + x3^4 + x1*x3 + 0.5*x2", 3);
  const std::vector<double> x{0.4, -0.3, 0.6};
  const auto ks = symcalc::parametrix(3, 2);
  for (int j = 0; j <= 2; ++j) {
    const double a = density_from_symbols(j, 3, p, f, x).value;
    const double b = density_concrete(ks[j], p, f, x);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("linearity of the pipeline in f") {
  const InversePowerF f(1.0, 4.0);
  const auto p = parse_polynomial("x1^4 + x1^2 + x1", 1);
  const auto a = c_total(1, 1, p, f, Route::pipeline, mapped());
  const auto b = c_total(1, 1, p, f.scaled(-3.0), Route::pipeline, mapped());
  CHECK(b.value == doctest::Approx(-3.0 * a.value).epsilon(1e-12));
}

TEST_CASE("radial integrals scale with the shift") {
  const InversePowerF f(1.0, 7.0);
  for (double v : {0.0, 0.5, 3.0}) {
    const auto direct = radial_direct(2, 1, 1, 5, f, v);
    const auto rho = radial_rho(2, 1, 1, 5, 7.0);
    const double e = 2 * 1 + 5 + 1 - 1 - 7.0 - 2 * 2;
    CHECK(direct.value == doctest::Approx(std::pow(v + 1.0, e) * rho.value).epsilon(1e-9));
  }
}

TEST_CASE("convexity conditions") {
  const auto s4 = MultiPoly::power_sum(5, 4);
  const auto r1 = convexity_conditions(s4, 2.0, 500);
  CHECK(r1.mixed_ok);
  CHECK(r1.offdiag_ok);
  CHECK(r1.convex_ok);

  const auto quad = parse_polynomial("2*x1^2 + x2^2 + x3^2 + 3*x4^2 + x5^2 + x1*x2", 5);
  const auto r2 = convexity_conditions(quad, 2.0, 500);
  CHECK(r2.mixed_ok);
  CHECK(r2.offdiag_ok);
  CHECK(r2.convex_ok);

  const auto r3 = convexity_conditions(s4 + parse_polynomial("1000*x1^2*x2^2", 5), 2.0, 2000);
  CHECK_FALSE(r3.convex_ok);
  CHECK(r3.worst_hessian_eig < 0.0);
}
