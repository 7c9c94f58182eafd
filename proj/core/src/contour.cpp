#include "qtrace/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace qtrace::contour {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx checked(const std::function<cplx(cplx)>& g, cplx z) {
  const cplx w = g(z);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
    throw std::runtime_error("non-finite integrand sample on the contour");
  return w;
}

// \int_a^b g(z(s)) z'(s) ds for a straight or circular parametrisation
struct Acc {
  cplx value = 0.0;
  double l1 = 0.0;  // \int |g| |dz|
  Acc& operator+=(const Acc& o) {
    value += o.value;
    l1 += o.l1;
    return *this;
  }
};

template <class Path>
Acc panel(const std::function<cplx(cplx)>& g, const GaussRule& rule, double a, double b, Path path) {
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  Acc acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto [z, dz] = path(c + h * rule.nodes[i]);
    const cplx w = rule.weights[i] * checked(g, z) * dz;
    acc.value += w;
    acc.l1 += std::abs(w);
  }
  acc.value *= h;
  acc.l1 *= std::abs(h);
  return acc;
}

Acc ray(const std::function<cplx(cplx)>& g, const GaussRule& rule, double theta, double r0, double R) {
  const cplx dir = std::polar(1.0, theta);
  auto path = [&](double r) { return std::pair<cplx, cplx>{r * dir, dir}; };
  Acc sum;
  for (double a = r0; a < R; a *= 2.0) sum += panel(g, rule, a, std::min(2.0 * a, R), path);
  return sum;  // outward direction
}

Acc arc(const std::function<cplx(cplx)>& g, const GaussRule& rule, double radius, double t0, double t1,
        int panels) {
  auto path = [&](double t) {
    const cplx z = std::polar(radius, t);
    return std::pair<cplx, cplx>{z, kI * z};
  };
  Acc sum;
  const double h = (t1 - t0) / panels;
  for (int p = 0; p < panels; ++p) sum += panel(g, rule, t0 + p * h, t0 + (p + 1) * h, path);
  return sum;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

cplx ipow(int n) {
  static const cplx p[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return p[((n % 4) + 4) % 4];
}

cplx j_series(int k, int nu, const TestFunction& f, double u, double v) {
  // J_{k,nu} = (-1)^{k+nu} sum_n (-1)^n C(n,k) a_{2n-nu+1} u^{n-k}, a_q = f^{(q)}(v)/q!
  const int n0 = std::max(k, nu / 2);
  cplx sum = 0.0;
  int small = 0;
  for (int n = n0; n < n0 + 4000; ++n) {
    const int q = 2 * n - nu + 1;
    if (q < 0) continue;
    const cplx term = (n % 2 ? -1.0 : 1.0) * binom(n, k) * f.taylor(q, cplx(v, 0.0)) * std::pow(u, n - k);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
  }
  return ((k + nu) % 2 ? -1.0 : 1.0) * sum;
}

cplx j_direct(int k, int nu, const TestFunction& f, double u, double v) {
  const cplx base = -0.5 * ipow(nu - 1);
  std::map<std::tuple<int, int, int>, cplx> terms;
  terms[{nu - 1, 0, 1}] = base * ((nu + 1) % 2 ? -1.0 : 1.0);
  terms[{nu - 1, 0, -1}] = base;
  for (int step = 0; step < k; ++step) {
    std::map<std::tuple<int, int, int>, cplx> next;
    for (const auto& [key, c] : terms) {
      const auto [p, q, eps] = key;
      if (p != 0) next[{p - 2, q, eps}] += c * (0.5 * p);
      next[{p - 1, q + 1, eps}] += c * (0.5 * eps) * kI;
    }
    terms.swap(next);
  }
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  const double s = std::sqrt(u);
  cplx sum = 0.0;
  for (const auto& [key, c] : terms) {
    const auto [p, q, eps] = key;
    sum += c * std::pow(s, p) * f.deriv(q, cplx(v, eps * s));
  }
  return (k % 2 ? -1.0 : 1.0) / kfact * sum;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative zeros, ascending
  std::vector<std::pair<double, double>> pts;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts.emplace_back(x, w);
    if (x != 0.0) pts.emplace_back(-x, w);
  }
  std::sort(pts.begin(), pts.end());
  for (auto [x, w] : pts) {
    r.nodes.push_back(x);
    r.weights.push_back(w);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

ContourResult contour_integrate(const std::function<cplx(cplx)>& g, const ContourSpec& spec) {
  if (!(spec.theta0 > kPi / 2 && spec.theta0 < kPi)) throw std::invalid_argument("theta0 must lie in (pi/2, pi)");
  if (!(spec.r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
  const GaussRule& rule = gauss_legendre(spec.n_nodes);
  const double th = spec.theta0;

  double R = spec.R_max;
  if (R <= 0.0) {
    double ref = 0.0;
    for (int i = 0; i <= 16; ++i) {
      const cplx z = std::polar(spec.r0, th + i * (2.0 * (kPi - th)) / 16);
      ref = std::max(ref, std::abs(checked(g, z)) * spec.r0);
    }
    R = 2.0 * spec.r0;
    auto edge = [&](double r) {
      return r * std::max(std::abs(checked(g, std::polar(r, th))), std::abs(checked(g, std::polar(r, -th))));
    };
    while (R < 1e12 && edge(R) > 1e-14 * ref) R *= 2.0;
  }
  if (!(R > spec.r0)) throw std::invalid_argument("R_max must exceed r0");

  const Acc upper = ray(g, rule, th, spec.r0, R);
  Acc open = arc(g, rule, spec.r0, th, 2.0 * kPi - th, 4);
  open += ray(g, rule, -th, spec.r0, R);
  open.value -= upper.value;
  open.l1 += upper.l1;
  const Acc close = arc(g, rule, R, -th, th, 32);

  const cplx scale = 1.0 / (2.0 * kPi * kI);
  ContourResult res;
  res.value = scale * (open.value + close.value);
  res.abs_scale = (open.l1 + close.l1) / (2.0 * kPi);
  res.tail_estimate = std::abs(close.value) / (2.0 * kPi);
  res.tail_warning = res.tail_estimate > spec.tail_tol;
  res.R_max = R;
  return res;
}

ContourResult residue_by_quadrature(int k, int nu, const TestFunction& f, double u, double v,
                                    const ContourSpec& spec) {
  auto g = [&](cplx z) {
    const cplx w = v - z;
    return std::pow(w, nu) / std::pow(u + w * w, k + 1) * f(z);
  };
  return contour_integrate(g, spec);
}

cplx J(int k, int nu, const TestFunction& f, double u, double v, JRoute route) {
  if (k < 0 || nu < 0) throw std::invalid_argument("J needs k >= 0 and nu >= 0");
  if (!(u > 0.0)) throw std::domain_error("J evaluated at the singular point u = 0");
  if (route == JRoute::automatic) {
    const double dist = f.singularity_distance(cplx(v, 0.0));
    route = u < 0.25 * dist * dist ? JRoute::series : JRoute::direct;
  }
  return route == JRoute::series ? j_series(k, nu, f, u, v) : j_direct(k, nu, f, u, v);
}

cplx J_printed(int k, int nu, const TestFunction& f, double u, double v) { return -J(k, nu, f, u, v); }

cplx I(int k, int nu, const TestFunction& f, double u, double v) { return J(k, nu, f, u, v); }

cplx ibp_residual(int k, int nu, const TestFunction& f, double u, double v) {
  if (k < 1 || nu < 1) throw std::invalid_argument("recursion needs k >= 1 and nu >= 1");
  const DerivativeOf fp(f, 1);
  return I(k, nu + 1, f, u, v) - (nu / (2.0 * k)) * I(k - 1, nu - 1, f, u, v) +
         (1.0 / (2.0 * k)) * I(k - 1, nu, fp, u, v);
}

cplx orientation_calibration() {
  return contour_integrate([](cplx z) { return 1.0 / (z - 1.0); }).value;
}

}  // namespace qtrace::contour
