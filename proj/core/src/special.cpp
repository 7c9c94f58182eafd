#include "qtrace/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace qtrace::special {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double x) { return x == std::floor(x); }
bool is_half_integer(double x) { return is_integer(x - 0.5); }

[[noreturn]] void divergent() { throw std::domain_error("divergent moment integral"); }

}  // namespace

double lanczos_gamma(double x) {
  static constexpr std::array<double, 9> c = {0.99999999999980993,  676.5203681218851,
                                              -1259.1392167224028,  771.32342877765313,
                                              -176.61502916214059,  12.507343278686905,
                                              -0.13857109526572012, 9.9843695780195716e-6,
                                              1.5056327351493116e-7};
  if (x < 0.5) return kPi / (std::sin(kPi * x) * lanczos_gamma(1.0 - x));
  x -= 1.0;
  double a = c[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double gamma(double x) {
  if (x <= 0.0 && is_integer(x)) throw std::domain_error("gamma pole");
  if (x > 0.0 && x < 171.0) {
    if (is_integer(x)) {
      double r = 1.0;
      for (int k = 2; k < static_cast<int>(x); ++k) r *= k;
      return r;
    }
    if (is_half_integer(x)) {
      // Gamma(n + 1/2) = sqrt(pi) prod_{k=1}^{n} (k - 1/2)
      double r = std::sqrt(kPi);
      for (double k = 0.5; k < x; k += 1.0) r *= k;
      return r;
    }
  }
  return lanczos_gamma(x);
}

double beta(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) divergent();
  return gamma(x) * gamma(y) / gamma(x + y);
}

double b_plain(int j, int d) {
  if (2 * j - d <= 0) divergent();
  return std::pow(kPi, 0.5 * d) * gamma(j - 0.5 * d) / gamma(j);
}

double b_one(int j, int d) {
  if (2 * (j - 1) - d <= 0) divergent();
  return (b_plain(j - 1, d) - b_plain(j, d)) / d;
}

double b_two(int j, int d) {
  if (2 * j - (d + 4) <= 0) divergent();
  if (d == 1) return beta(2.5, j - 2.5);  // b_j(0) = 1
  return beta(2.5, j - 0.5 * (d + 4)) * b_plain(j, d - 1);
}

double b_oneone(int j, int d) {
  if (d < 2) throw std::domain_error("b_{j,1,1} needs d >= 2");
  if (2 * j - (d + 4) <= 0) divergent();
  const double rest = d == 2 ? 1.0 : b_plain(j, d - 2);
  return kPi / 8.0 * beta(3.0, j - 0.5 * (d + 4)) * rest;
}

double b_oneone_printed(int j, int d) { return b_oneone(j, d) / kPi; }

double sphere_moment(const std::vector<int>& g, int d) {
  if (static_cast<int>(g.size()) > d) throw std::invalid_argument("moment index longer than dimension");
  int total = 0;
  double num = 1.0;
  for (int gi : g) {
    if (gi < 0 || gi % 2 != 0) throw std::invalid_argument("sphere moment needs even, nonnegative entries");
    total += gi;
    num *= gamma(0.5 * (gi + 1));
  }
  num *= std::pow(std::sqrt(kPi), d - static_cast<int>(g.size()));
  return num / gamma(0.5 * (d + total));
}

double b_general(int j, int k, int l, int d) {
  if (l > 0 && d < 2) throw std::domain_error("b_{j,k,l} with l > 0 needs d >= 2");
  const int q = d + 2 * k + 2 * l;  // u-exponent is q/2 - 1
  if (2 * j - q <= 0) divergent();
  std::vector<int> g = {2 * k};
  if (d >= 2) g.push_back(2 * l);
  return sphere_moment(g, d) * beta(0.5 * q, j - 0.5 * q);
}

std::pair<double, double> b_general_quadrature(int j, int k, int l, int d) {
  const int q = d + 2 * k + 2 * l;
  if (2 * j - q <= 0) divergent();
  std::vector<int> g = {2 * k};
  if (d >= 2) g.push_back(2 * l);
  const double m = sphere_moment(g, d);
  // u = s^2 removes the algebraic endpoint behaviour for odd q
  auto f = [&](double s) {
    if (s <= 1.0) return 2.0 * std::pow(s, q - 1) * std::pow(1.0 + s * s, -j);
    return 2.0 * std::pow(s, q - 1 - 2 * j) * std::pow(1.0 + 1.0 / (s * s), -j);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double e1 = 0, e2 = 0;
  double head = ts.integrate(f, 0.0, 1.0, 1e-15, &e1);
  double tail = es.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-15, &e2);
  return {m * (head + tail), m * (std::abs(head) * e1 + std::abs(tail) * e2)};
}

ACoeffs a_coeffs(int d) {
  if (d != 5 && d != 7) throw std::domain_error("a_coeffs supports d in {5, 7}");
  ACoeffs a;
  const double b62 = b_two(6, d), b51 = b_one(5, d), b4 = b_plain(4, d);
  a.a1 = (16.0 * b62 - 8.0 * b51 + b4) / 96.0;
  a.a2 = b_oneone(6, d);
  a.a1_combo = b62 / 6.0 - b51 / 3.0 + b4 / 96.0;
  a.discrepancy = std::abs(a.a1 - a.a1_combo);
  return a;
}

double BTable::operator()(int j, int k, int l) const {
  std::lock_guard lock(mu_);
  auto key = std::make_tuple(j, k, l);
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const double v = b_general(j, k, l, d_);
  values_.emplace(key, v);
  return v;
}

std::map<std::tuple<int, int, int>, double> BTable::snapshot() const {
  std::lock_guard lock(mu_);
  return values_;
}

}  // namespace qtrace::special
