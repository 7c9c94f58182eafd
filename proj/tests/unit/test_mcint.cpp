#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qtrace/mcint.hpp"

using namespace qtrace;
using namespace qtrace::mcint;
using std::numbers::pi;

namespace {

MCConfig cfg(std::int64_t n, int reps, double radius, int workers = 0) {
  MCConfig c;
  c.n_samples = n;
  c.n_replicates = reps;
  c.cutoff_radius = radius;
  c.workers = workers;
  return c;
}

}  // namespace

TEST_CASE("ball volume") {
  const auto e = mc_integrate([](std::span<const double>) { return 1.0; }, 5, cfg(1000, 4, 1.0));
  CHECK(e.mean == doctest::Approx(8 * pi * pi / 15).epsilon(1e-14));
  CHECK(e.stderr_ < 1e-12);
  CHECK(ball_volume(5, 1.0) == doctest::Approx(5.2638).epsilon(1e-4));
  CHECK(e.replicates.size() == 4);
}

TEST_CASE("odd integrand averages to zero") {
  const auto e = mc_integrate([](std::span<const double> x) { return x[0]; }, 3, cfg(20000, 10, 1.0));
  CHECK(std::abs(e.mean) <= 3 * e.stderr_ + 1e-15);
}

TEST_CASE("results do not depend on the worker count") {
  auto dens = [](std::span<const double> x) { return std::exp(-x[0] * x[0]) * (1 + x[1]); };
  const auto a = mc_integrate(dens, 4, cfg(5000, 6, 2.0, 1));
  const auto b = mc_integrate(dens, 4, cfg(5000, 6, 2.0, 3));
  CHECK(a.replicates == b.replicates);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("standard error shrinks like the inverse square root") {
  auto dens = [](std::span<const double> x) { return x[0] * x[0] + x[1]; };
  std::vector<double> lx, ly;
  for (std::int64_t n : {1000, 2000, 4000, 8000}) {
    const auto e = mc_integrate(dens, 3, cfg(n, 200, 1.0));
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(e.stderr_));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  CHECK(std::abs(sxy / sxx + 0.5) < 0.1);
}

TEST_CASE("ball sampling stays inside the ball") {
  CounterRng rng(42);
  std::vector<double> x(6);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    ball_point(rng, 6, 2.5, 3, i, x);
    double r2 = 0;
    for (double v : x) r2 += v * v;
    CHECK(r2 <= 2.5 * 2.5);
  }
  CHECK(rng.uniform(1, 2, 3) == CounterRng(42).uniform(1, 2, 3));
  CHECK(rng.uniform(1, 2, 3) != CounterRng(43).uniform(1, 2, 3));
}

TEST_CASE("tensor and mapped quadrature") {
  const auto one = tensor_quadrature([](std::span<const double>) { return 1.0; }, 3, 1.5, 4);
  CHECK(one.value == doctest::Approx(27.0).epsilon(1e-14));

  auto gauss = [](std::span<const double> x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return std::exp(-r2);
  };
  const auto g2 = tensor_quadrature(gauss, 2, 8.0, 40);
  CHECK(g2.value == doctest::Approx(pi).epsilon(1e-8));
  CHECK(mapped_quadrature(gauss, 3, 1.0) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-8));
  CHECK_THROWS_AS(tensor_quadrature(gauss, 6, 1.0, 4), std::invalid_argument);
}

TEST_CASE("monte carlo agrees with tensor quadrature") {
  auto dens = [](std::span<const double> x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return (1 + x[0] * x[0]) * std::pow(1 + r2, -4.0);
  };
  for (int d : {2, 3}) {
    const double R = 6.0;
    const auto e = mc_integrate(
        [&](std::span<const double> x) {
          double r2 = 0;
          for (double v : x) r2 += v * v;
          return r2 <= R * R ? dens(x) : 0.0;
        },
        d, cfg(40000, 10, R));
    // The tensor rule covers the box; restrict it to the same ball.
    const auto t = tensor_quadrature(
        [&](std::span<const double> x) {
          double r2 = 0;
          for (double v : x) r2 += v * v;
          return r2 <= R * R ? dens(x) : 0.0;
        },
        d, R, d == 2 ? 200 : 60);
    CHECK(std::abs(e.mean - t.value) <= 3 * e.stderr_ + 1e-2 * std::abs(t.value));
  }
}

TEST_CASE("cutoff radius") {
  const auto p = MultiPoly::power_sum(5, 4);
  auto dens = [&](std::span<const double> x) { return std::pow(1 + p.evaluate(x), -7.0); };
  double prev = 0.0;
  for (double tol : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const auto c = cutoff_radius(dens, p, tol);
    CHECK(std::isfinite(c.radius));
    CHECK(c.radius >= prev);
    CHECK(c.tail_bound < tol);
    prev = c.radius;
  }
  const auto bad = parse_polynomial("x1^4 - x2^4", 2);
  CHECK_THROWS_AS(cutoff_radius([](std::span<const double>) { return 1.0; }, bad, 1e-6), std::domain_error);
}

TEST_CASE("doubling the cutoff changes the integral by less than the tail bound") {
  const auto p = MultiPoly::power_sum(3, 4);
  auto dens = [&](std::span<const double> x) { return std::pow(1 + p.evaluate(x), -5.0); };
  const auto c = cutoff_radius(dens, p, 1e-6);
  const auto a = mc_integrate(dens, 3, cfg(50000, 10, c.radius));
  const auto b = mc_integrate(dens, 3, cfg(50000, 10, 2 * c.radius));
  CHECK(std::abs(a.mean - b.mean) <= 1e-6 + 3 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("configuration is validated") {
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK_THROWS_AS(mc_integrate(one, 2, cfg(0, 1, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_integrate(one, 2, cfg(10, 1, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_integrate([](std::span<const double>) { return NAN; }, 2, cfg(10, 1, 1.0)),
                  std::runtime_error);
}
