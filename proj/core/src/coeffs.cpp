#include "qtrace/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "qtrace/contour.hpp"
#include "qtrace/special.hpp"

namespace qtrace::coeffs {

namespace {

constexpr double kPi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Adaptive bisection that stops on err <= tol * L1 of the panel, so integrals that
// cancel to zero terminate as quickly as the others.
template <class F>
void gk_adapt(F& g, double a, double b, int depth, RadialValue& r) {
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(g, a, b, 0, 0.0, &err, &l1);
  if (depth == 0 || err <= 1e-11 * l1 || err < 1e-300) {
    r.value += v;
    r.abs_value += l1;
    return;
  }
  const double m = 0.5 * (a + b);
  gk_adapt(g, a, m, depth - 1, r);
  gk_adapt(g, m, b, depth - 1, r);
}

template <class F>
RadialValue gk_panels(F&& g, const std::vector<double>& cuts) {
  RadialValue r{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (std::isinf(hi)) {
      auto h = [&](double tau) {
        if (tau >= 1.0) return 0.0;
        const double w = 1.0 - tau;
        return g(lo + tau / w) / (w * w);
      };
      gk_adapt(h, 0.0, 1.0, 12, r);
    } else {
      gk_adapt(g, lo, hi, 12, r);
    }
  }
  return r;
}

std::vector<double> radial_cuts(double a) {
  return {0.0, 0.5 * a, 2.0 * a, 8.0 * a, std::numeric_limits<double>::infinity()};
}

void check_convergent(int k, int nu, int q, int d, double mu) {
  const double e = 2.0 * q + d + nu - 1 - mu - 2.0 * k;
  if (e >= 0.0) {
    std::ostringstream os;
    os << "divergent radial integral for the term (k=" << k << ", nu=" << nu << ", |xi|^" << 2 * q
       << ") in d=" << d << " with mu=" << mu;
    throw std::domain_error(os.str());
  }
}

double sphere_half_area(int d) { return std::pow(kPi, 0.5 * d) / special::gamma(0.5 * d); }

void check_dim(const MultiPoly& p, int d) {
  if (p.dim() != d) throw std::invalid_argument("polynomial dimension does not match d");
}

std::string order_label(int n) { return "f^(" + std::to_string(n) + ")"; }

}  // namespace

void check_admissible(const InversePowerF& f, const MultiPoly& p) {
  const int d = p.dim(), m = p.degree();
  if (!decay_admissible(f, d, m)) {
    std::ostringstream os;
    os << "inadmissible test function: mu = " << f.mu() << " must exceed d(m+1)/m = " << decay_threshold(d, m)
       << " (d=" << d << ", m=" << m << ")";
    throw std::invalid_argument(os.str());
  }
}


std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::pipeline: return "pipeline";
    case Method::monte_carlo: return "monte_carlo";
    case Method::tensor_quadrature: return "tensor_quadrature";
    case Method::radial_quadrature: return "radial_quadrature";
  }
  return "unknown";
}

std::string to_string(Route r) {
  switch (r) {
    case Route::printed: return "printed";
    case Route::printed_b: return "printed_b";
    case Route::pipeline: return "pipeline";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

RadialValue radial_rho(int k, int nu, int q, int d, double mu) {
  check_convergent(k, nu, q, d, mu);
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int, int, double>, RadialValue> cache;
  const auto key = std::make_tuple(k, nu, q, d, mu);
  {
    std::lock_guard lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const RadialValue r = radial_direct(k, nu, q, d, InversePowerF(1.0, mu), 0.0);
  std::lock_guard lock(mtx);
  cache.emplace(key, r);
  return r;
}

RadialValue radial_direct(int k, int nu, int q, int d, const InversePowerF& f, double v) {
  check_convergent(k, nu, q, d, f.mu());
  const double a = v + f.t();
  if (!(a > 0.0)) throw std::domain_error("radial integral needs P + t > 0");
  const int power = 2 * q + d - 1;
  auto g = [&](double s) { return 2.0 * std::pow(s, power) * contour::J(k, nu, f, s * s, v).real(); };
  RadialValue r = gk_panels(g, radial_cuts(a));
  if (!std::isfinite(r.value) || !std::isfinite(r.abs_value)) {
    std::ostringstream os;
    os << "radial integral failed for the term (k=" << k << ", nu=" << nu << ", q=" << q << ")";
    throw std::domain_error(os.str());
  }
  return r;
}

// ---------------------------------------------------------------------------

TraceDensity::TraceDensity(const symcalc::GenericSymbol& k2j, int d)
    : d_(d), j_(k2j.order()), prefactor_(sphere_half_area(d)) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  // Contract one xi pair at a time:
  // \int xi_{a_1} .. xi_{a_r} H = (1/(d+r-2)) sum_b delta_{a_1 a_b} \int xi_{rest} |xi|^2 H,
  // merging isomorphic intermediate terms after every step.
  symcalc::GenericSymbol cur(k2j.order());
  for (const auto& t : k2j.terms())
    if (t.xi.size() % 2 == 0) cur.add(t);
  std::vector<symcalc::GenericTerm> closed;
  while (!cur.empty()) {
    symcalc::GenericSymbol next(k2j.order());
    for (const auto& t : cur.terms()) {
      if (t.xi.empty()) {
        closed.push_back(t);
        continue;
      }
      const int r = static_cast<int>(t.xi.size());
      const int a = t.xi[0];
      for (int i = 1; i < r; ++i) {
        const int b = t.xi[i];
        symcalc::GenericTerm u = t;
        u.coef = t.coef / Rational(d + r - 2);
        u.xi.clear();
        for (int k = 1; k < r; ++k)
          if (k != i) u.xi.push_back(t.xi[k]);
        for (auto& node : u.nodes) {
          for (int& l : node)
            if (l == b) l = a;
          std::sort(node.begin(), node.end());
        }
        ++u.xi2;
        next.add(u);
      }
    }
    cur = std::move(next);
  }

  std::map<std::string, XTerm> acc;
  for (const auto& t : closed) {
    symcalc::GenericTerm g;
    g.coef = Rational(1);
    g.nodes = t.nodes;
    const std::string ck = symcalc::canonical_key(g);
    auto it = acc.find(ck);
    if (it == acc.end()) it = acc.emplace(ck, XTerm{symcalc::canonical_form(g), {}}).first;
    it->second.weights[RadialKey{t.k, t.nu + 1, t.xi2}] += t.coef * Rational(-2);
  }
  for (auto& [ck, xt] : acc) {
    std::erase_if(xt.weights, [](const auto& kv) { return kv.second.is_zero(); });
    if (!xt.weights.empty()) terms_.push_back(std::move(xt));
  }
}

namespace {

std::set<Exponent> support_closure(const MultiPoly& p) {
  std::set<Exponent> s;
  for (const auto& [e, c] : p.terms()) {
    std::vector<Exponent> stack{e};
    while (!stack.empty()) {
      Exponent x = stack.back();
      stack.pop_back();
      if (!s.insert(x).second) continue;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0) {
          Exponent y = x;
          --y[i];
          stack.push_back(y);
        }
    }
  }
  return s;
}

// Expands the label sums of one contraction into monomials of derivative exponents.
void expand_graph(const symcalc::GenericTerm& g, int d, const std::set<Exponent>& support,
                  std::map<std::vector<Exponent>, std::int64_t>& out) {
  const auto& nodes = g.nodes;
  std::vector<int> order;
  for (const auto& n : nodes)
    for (int l : n)
      if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
  const int nl = g.max_label() + 1;
  std::vector<std::vector<int>> touching(std::max(nl, 0));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (int l : nodes[i])
      if (touching[l].empty() || touching[l].back() != static_cast<int>(i)) touching[l].push_back(static_cast<int>(i));
  std::vector<Exponent> exps(nodes.size(), Exponent(d, 0));

  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == order.size()) {
      std::vector<Exponent> key = exps;
      std::sort(key.begin(), key.end());
      ++out[key];
      return;
    }
    const int l = order[pos];
    for (int axis = 0; axis < d; ++axis) {
      bool ok = true;
      for (int ni : touching[l]) {
        const int mult = static_cast<int>(std::count(nodes[ni].begin(), nodes[ni].end(), l));
        exps[ni][axis] += mult;
        if (!support.contains(exps[ni])) ok = false;
      }
      if (ok) self(self, pos + 1);
      for (int ni : touching[l]) {
        const int mult = static_cast<int>(std::count(nodes[ni].begin(), nodes[ni].end(), l));
        exps[ni][axis] -= mult;
      }
    }
  };
  rec(rec, 0);
}

}  // namespace

CompiledDensity::CompiledDensity(const TraceDensity& td, const MultiPoly& p, const InversePowerF& f)
    : d_(td.dim()),
      p_(p),
      t_(f.t()),
      mu_(f.mu()),
      scale_(f.scale()),
      table_(p, {Exponent(p.dim(), 0)}) {
  check_dim(p, d_);
  std::set<int> ords;
  for (const auto& xt : td.terms())
    for (const auto& [key, w] : xt.weights) ords.insert(2 * key.k + 1 - key.nu - 2 * key.q - d_);
  orders_.assign(ords.begin(), ords.end());
  auto slot = [&](int n) { return static_cast<int>(std::lower_bound(orders_.begin(), orders_.end(), n) - orders_.begin()); };

  const auto support = support_closure(p);
  std::map<Exponent, int> gamma_index;
  std::vector<Exponent> gammas{Exponent(d_, 0)};
  gamma_index[gammas[0]] = 0;
  std::map<std::vector<int>, Mono> monos;
  const std::size_t ns = orders_.size();

  for (const auto& xt : td.terms()) {
    std::vector<std::pair<int, double>> radial;  // (slot, weight * rho), abs
    std::vector<double> abs_w;
    for (const auto& [key, w] : xt.weights) {
      const RadialValue rho = radial_rho(key.k, key.nu, key.q, d_, mu_);
      const double c = w.to_double() * td.prefactor() * scale_;
      radial.emplace_back(slot(2 * key.k + 1 - key.nu - 2 * key.q - d_), c * rho.value);
      abs_w.push_back(std::abs(c) * rho.abs_value);
    }
    std::map<std::vector<Exponent>, std::int64_t> expanded;
    expand_graph(xt.graph, d_, support, expanded);
    for (const auto& [exps, count] : expanded) {
      std::vector<int> factors;
      for (const auto& e : exps) {
        auto it = gamma_index.find(e);
        if (it == gamma_index.end()) {
          it = gamma_index.emplace(e, static_cast<int>(gammas.size())).first;
          gammas.push_back(e);
        }
        factors.push_back(it->second);
      }
      std::sort(factors.begin(), factors.end());
      Mono& m = monos[factors];
      if (m.coef.empty()) {
        m.factors = factors;
        m.coef.assign(ns, 0.0);
        m.abs_coef.assign(ns, 0.0);
      }
      for (std::size_t i = 0; i < radial.size(); ++i) {
        m.coef[radial[i].first] += static_cast<double>(count) * radial[i].second;
        m.abs_coef[radial[i].first] += static_cast<double>(count) * abs_w[i];
      }
    }
  }
  table_ = DerivativeTable(p, gammas);
  for (auto& [key, m] : monos) monos_.push_back(std::move(m));
}

double CompiledDensity::eval(std::span<const double> x, bool absolute, std::vector<double>* parts) const {
  std::vector<double> vals(table_.size());
  table_.evaluate(x, vals);
  const double a = vals[0] + t_;
  if (!(a > 0.0)) throw std::domain_error("P(x) + t must be positive");
  const std::size_t ns = orders_.size();
  std::vector<double> pw(ns), acc(ns, 0.0);
  for (std::size_t i = 0; i < ns; ++i) pw[i] = std::pow(a, -mu_ - orders_[i]);
  for (const auto& m : monos_) {
    double prod = 1.0;
    for (int fi : m.factors) prod *= vals[fi];
    const auto& c = absolute ? m.abs_coef : m.coef;
    if (absolute) prod = std::abs(prod);
    for (std::size_t i = 0; i < ns; ++i) acc[i] += c[i] * prod;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    acc[i] *= pw[i];
    total += acc[i];
  }
  if (parts) *parts = acc;
  return total;
}

double CompiledDensity::operator()(std::span<const double> x) const { return eval(x, false, nullptr); }

double CompiledDensity::abs_density(std::span<const double> x) const { return eval(x, true, nullptr); }

void CompiledDensity::parts(std::span<const double> x, std::span<double> out) const {
  std::vector<double> pr;
  eval(x, false, &pr);
  std::copy(pr.begin(), pr.end(), out.begin());
}

DensityReport CompiledDensity::report(std::span<const double> x) const {
  std::vector<double> pr;
  DensityReport r;
  r.x.assign(x.begin(), x.end());
  r.value = eval(x, false, &pr);
  for (std::size_t i = 0; i < orders_.size(); ++i) r.parts[order_label(orders_[i])] = pr[i];
  return r;
}

const TraceDensity& trace_density(int j, int d, symcalc::Convention conv) {
  if (j < 0) throw std::invalid_argument("order j must be nonnegative");
  static std::mutex mtx;
  static std::map<symcalc::Convention, std::vector<symcalc::GenericSymbol>> symbols;
  static std::map<std::tuple<int, int, symcalc::Convention>, std::unique_ptr<TraceDensity>> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find({j, d, conv});
  if (it != cache.end()) return *it->second;
  auto& ks = symbols[conv];
  if (static_cast<int>(ks.size()) <= j) ks = symcalc::generic_parametrix(j, conv);
  auto td = std::make_unique<TraceDensity>(ks[j], d);
  return *cache.emplace(std::make_tuple(j, d, conv), std::move(td)).first->second;
}

DensityReport density_from_symbols(int j, int d, const MultiPoly& p, const InversePowerF& f,
                                   std::span<const double> x) {
  check_dim(p, d);
  return CompiledDensity(trace_density(j, d), p, f).report(x);
}

double density_concrete(const symcalc::ParamSymbol& k2j, const MultiPoly& p, const InversePowerF& f,
                        std::span<const double> x) {
  const int d = k2j.dim();
  check_dim(p, d);
  const double v = p.evaluate(x);
  std::map<std::tuple<int, int, int>, double> radial;
  double total = 0.0;
  for (const auto& t : k2j.terms()) {
    if (std::any_of(t.xi.begin(), t.xi.end(), [](int e) { return e % 2; })) continue;
    const int q = total_degree(t.xi) / 2;
    auto key = std::make_tuple(t.k, t.nu + 1, q);
    auto it = radial.find(key);
    if (it == radial.end()) it = radial.emplace(key, radial_direct(t.k, t.nu + 1, q, d, f, v).value).first;
    double prod = -2.0 * t.coef.to_double() * special::sphere_moment(t.xi, d) * it->second;
    for (const auto& g : t.derivs) prod *= derivative(p, g).evaluate(x);
    total += prod;
  }
  return total;
}

// ---------------------------------------------------------------------------

double c2_closed_density(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x) {
  if (d != 1 && d != 3) throw std::invalid_argument("closed C_2 formulas exist only for d = 1 and d = 3");
  check_dim(p, d);
  const double s = p.evaluate(x);
  double g2 = 0.0;
  for (int i = 0; i < d; ++i) {
    Exponent e(d, 0);
    e[i] = 1;
    const double gi = derivative(p, e).evaluate(x);
    g2 += gi * gi;
  }
  if (d == 1) return -f.deriv_real(3, s) * g2 / 16.0;
  return -f.deriv_real(1, s) * g2 / (48.0 * kPi);
}

namespace {

double c0_even_at(int d, const InversePowerF& f, double s) {
  auto g = [&](double r) { return std::pow(r, d - 1) * f.deriv_real(0, s + r); };
  const double a = s + f.t();
  const double radial = gk_panels(g, radial_cuts(a)).value;
  return 2.0 * ((d / 2) % 2 ? -1.0 : 1.0) * 2.0 * sphere_half_area(d) * radial;
}

}  // namespace

double c0_even_density(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x) {
  if (d % 2) throw std::invalid_argument("the C_0 double integral applies to even d");
  check_dim(p, d);
  return c0_even_at(d, f, p.evaluate(x));
}

// ---------------------------------------------------------------------------

namespace {

struct MultiResult {
  std::vector<CoeffResult> results;
  std::vector<std::vector<double>> replicates;  // Monte Carlo only
};

bool is_radial(const MultiPoly& p) {
  const int d = p.dim();
  std::vector<double> e1(d, 0.0);
  for (int i = 1; i <= 32; ++i) {
    const auto u = sphere_direction(d, static_cast<std::uint64_t>(i));
    for (double r : {0.3, 1.1, 2.7}) {
      std::vector<double> x(d);
      for (int k = 0; k < d; ++k) x[k] = r * u[k];
      e1[0] = r;
      const double a = p.evaluate(x), b = p.evaluate(e1);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b))) return false;
    }
  }
  return true;
}

MultiResult integrate_multi(const mcint::MultiDensity& density, int n_out, const MultiPoly& p,
                            const Integrator& integ) {
  const int d = p.dim();
  const double norm = std::pow(2.0 * kPi, -d);
  MultiResult mr;
  mr.results.assign(n_out, CoeffResult{});
  for (auto& r : mr.results) r.d = d;

  auto component = [&](int o) {
    return [&, o](std::span<const double> x) {
      std::vector<double> out(n_out);
      density(x, out);
      return out[o];
    };
  };
  auto envelope = [&](std::span<const double> x) {
    std::vector<double> out(n_out);
    density(x, out);
    double s = 0.0;
    for (double v : out) s += std::abs(v);
    return s;
  };

  switch (integ.kind) {
    case Integrator::Kind::mapped:
      for (int o = 0; o < n_out; ++o) {
        auto& r = mr.results[o];
        r.value = norm * mcint::mapped_quadrature(component(o), d, integ.scale, integ.panels, integ.order);
        r.method = Method::tensor_quadrature;
      }
      break;
    case Integrator::Kind::tensor: {
      const double h =
          integ.half_width > 0.0 ? integ.half_width : mcint::cutoff_radius(envelope, p, integ.cutoff_tol).radius;
      for (int o = 0; o < n_out; ++o) {
        const auto tr = mcint::tensor_quadrature(component(o), d, h, integ.nodes_per_axis);
        auto& r = mr.results[o];
        r.value = norm * tr.value;
        r.quad_error = norm * tr.difference;
        r.cutoff_radius = h;
        r.method = Method::tensor_quadrature;
      }
      break;
    }
    case Integrator::Kind::radial: {
      if (!is_radial(p)) throw std::invalid_argument("radial integration needs a rotation-invariant polynomial");
      const double area = 2.0 * sphere_half_area(d);
      const double s = integ.scale;
      const std::vector<double> cuts{0.0, 0.5 * s, s, 2.0 * s, 4.0 * s, std::numeric_limits<double>::infinity()};
      for (int o = 0; o < n_out; ++o) {
        auto g = [&](double r) {
          std::vector<double> x(d, 0.0), out(n_out);
          x[0] = r;
          density(x, out);
          return std::pow(r, d - 1) * out[o];
        };
        const RadialValue rv = gk_panels(g, cuts);
        auto& r = mr.results[o];
        r.value = norm * area * rv.value;
        r.method = Method::radial_quadrature;
      }
      break;
    }
    case Integrator::Kind::monte_carlo: {
      mcint::MCConfig cfg = integ.mc;
      double tail = cfg.tail_tol;
      if (cfg.cutoff_radius <= 0.0) {
        const auto rep = mcint::cutoff_radius(envelope, p, integ.cutoff_tol);
        cfg.cutoff_radius = rep.radius;
        tail = rep.tail_bound;
      }
      const auto est = mcint::mc_integrate_multi(density, n_out, d, cfg);
      for (int o = 0; o < n_out; ++o) {
        auto& r = mr.results[o];
        r.value = norm * est[o].mean;
        r.stderr_ = norm * est[o].stderr_;
        r.cutoff_radius = cfg.cutoff_radius;
        r.quad_error = norm * tail;
        r.method = Method::monte_carlo;
        std::vector<double> reps;
        for (double v : est[o].replicates) reps.push_back(norm * v);
        mr.replicates.push_back(std::move(reps));
      }
      break;
    }
  }
  return mr;
}

Method route_method(const Integrator& integ, Method deterministic) {
  switch (integ.kind) {
    case Integrator::Kind::monte_carlo: return Method::monte_carlo;
    case Integrator::Kind::tensor: return Method::tensor_quadrature;
    case Integrator::Kind::radial: return Method::radial_quadrature;
    case Integrator::Kind::mapped: return deterministic;
  }
  return deterministic;
}

double stderr_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double m = 0.0;
  for (double a : v) m += a;
  m /= n;
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  return std::sqrt(ss / (n - 1) / n);
}

}  // namespace

CoeffResult integrate_density(const mcint::Density& density, const MultiPoly& p, const Integrator& integ,
                              mcint::MCEstimate* mc_out) {
  auto multi = [&](std::span<const double> x, std::span<double> out) { out[0] = density(x); };
  auto mr = integrate_multi(multi, 1, p, integ);
  if (mc_out && !mr.replicates.empty()) {
    mc_out->mean = mr.results[0].value;
    mc_out->stderr_ = mr.results[0].stderr_;
    mc_out->replicates = mr.replicates[0];
  }
  return mr.results[0];
}

CoeffResult c0_even(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ) {
  if (d % 2) throw std::invalid_argument("c0_even needs an even dimension");
  check_dim(p, d);
  check_admissible(f, p);
  auto dens = [&](std::span<const double> x) { return c0_even_at(d, f, p.evaluate(x)); };
  CoeffResult r = integrate_density(dens, p, integ);
  r.j = 0;
  r.method = route_method(integ, Method::closed_form);
  r.route = "printed";
  return r;
}

CoeffResult pipeline_with_scale(int j, int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ) {
  check_dim(p, d);
  check_admissible(f, p);
  const CompiledDensity cd(trace_density(j, d), p, f);
  auto multi = [&](std::span<const double> x, std::span<double> out) {
    out[0] = cd(x);
    out[1] = cd.abs_density(x);
  };
  const auto mr = integrate_multi(multi, 2, p, integ);
  CoeffResult r = mr.results[0];
  r.j = j;
  r.abs_scale = mr.results[1].value;
  r.method = route_method(integ, Method::pipeline);
  r.route = "pipeline";
  return r;
}

CoeffResult c0_odd_check(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ) {
  if (d % 2 == 0) throw std::invalid_argument("c0_odd_check needs an odd dimension");
  return pipeline_with_scale(0, d, p, f, integ);
}

CoeffResult c2_closed(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ) {
  if (d != 1 && d != 3) throw std::invalid_argument("closed C_2 formulas exist only for d = 1 and d = 3");
  check_dim(p, d);
  check_admissible(f, p);
  std::vector<Exponent> gam{Exponent(d, 0)};
  for (int i = 0; i < d; ++i) {
    Exponent e(d, 0);
    e[i] = 1;
    gam.push_back(e);
  }
  const DerivativeTable table(p, gam);
  auto dens = [&](std::span<const double> x) {
    std::vector<double> v(gam.size());
    table.evaluate(x, v);
    double g2 = 0.0;
    for (int i = 1; i <= d; ++i) g2 += v[i] * v[i];
    return d == 1 ? -f.deriv_real(3, v[0]) * g2 / 16.0 : -f.deriv_real(1, v[0]) * g2 / (48.0 * kPi);
  };
  // the closed forms are written against dx rather than (2 pi)^{-d} dx
  CoeffResult r = integrate_density(dens, p, integ);
  const double unnorm = std::pow(2.0 * kPi, d);
  r.value *= unnorm;
  r.stderr_ *= unnorm;
  r.quad_error *= unnorm;
  r.j = 1;
  r.method = route_method(integ, Method::closed_form);
  r.route = "printed";
  return r;
}

CoeffResult c_total(int j, int d, const MultiPoly& p, const InversePowerF& f, Route route, const Integrator& integ) {
  check_dim(p, d);
  check_admissible(f, p);
  if (route == Route::pipeline) return pipeline_with_scale(j, d, p, f, integ);
  if (j == 0 && d % 2 == 0) return c0_even(d, p, f, integ);
  if (j == 1 && (d == 1 || d == 3)) return c2_closed(d, p, f, integ);
  if ((j == 0 && d % 2) || (j >= 1 && d % 2 && d >= 4 * j + 1)) {
    CoeffResult r;
    r.j = j;
    r.d = d;
    r.method = Method::closed_form;
    r.route = to_string(route);
    return r;
  }
  if (j == 2 && (d == 5 || d == 7)) {
    const PrintedDensity pd(d, p, f, route == Route::printed ? PrintedForm::pi_form : PrintedForm::b_form);
    CoeffResult r = integrate_density(pd, p, integ);
    r.j = j;
    r.method = route_method(integ, Method::closed_form);
    r.route = to_string(route);
    return r;
  }
  throw std::invalid_argument("no printed formula for this (j, d); use the pipeline route");
}

// ---------------------------------------------------------------------------

ConvexityReport convexity_conditions(const MultiPoly& p, double radius, int n_points) {
  const int d = p.dim();
  const InvariantEvaluator inv(p);
  std::vector<Exponent> gam;
  for (int i = 0; i < d; ++i)
    for (int k = i; k < d; ++k) {
      Exponent e(d, 0);
      ++e[i];
      ++e[k];
      gam.push_back(e);
    }
  const DerivativeTable hess(p, gam);
  const mcint::CounterRng rng(0x51f15eedULL);
  ConvexityReport rep{};
  rep.worst_mixed_margin = rep.worst_offdiag_margin = rep.worst_hessian_eig = std::numeric_limits<double>::infinity();
  std::vector<double> x(d), hv(gam.size());
  Eigen::MatrixXd h(d, d);
  double scale = 0.0;
  for (int n = 0; n < n_points; ++n) {
    if (n == 0)
      std::fill(x.begin(), x.end(), 0.0);
    else
      mcint::ball_point(rng, d, radius, 0, static_cast<std::uint64_t>(n), x);
    const auto iv = inv(x);
    rep.worst_mixed_margin = std::min(rep.worst_mixed_margin, 2.0 * iv[0] - iv[1]);
    rep.worst_offdiag_margin = std::min(rep.worst_offdiag_margin, 11.0 * kPi * iv[2] - iv[3]);
    hess.evaluate(x, hv);
    int m = 0;
    for (int i = 0; i < d; ++i)
      for (int k = i; k < d; ++k) h(i, k) = h(k, i) = hv[m++];
    scale = std::max(scale, h.norm());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    rep.worst_hessian_eig = std::min(rep.worst_hessian_eig, es.eigenvalues()(0));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  rep.mixed_ok = rep.worst_mixed_margin >= -tol;
  rep.offdiag_ok = rep.worst_offdiag_margin >= -tol;
  rep.convex_ok = rep.worst_hessian_eig >= -tol;
  rep.n_points = n_points;
  return rep;
}

// ---------------------------------------------------------------------------

DualRouteReport dual_route(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ, double tol) {
  if (d != 5 && d != 7) throw std::invalid_argument("the dual-route report covers d = 5 and d = 7");
  check_dim(p, d);
  check_admissible(f, p);
  DualRouteReport rep;
  rep.d = d;
  switch (integ.kind) {
    case Integrator::Kind::monte_carlo: rep.integrator = "monte_carlo"; break;
    case Integrator::Kind::tensor: rep.integrator = "tensor"; break;
    case Integrator::Kind::mapped: rep.integrator = "mapped"; break;
    case Integrator::Kind::radial: rep.integrator = "radial"; break;
  }

  const auto pi_c = printed_coefficients(d, PrintedForm::pi_form);
  const auto b_c = printed_coefficients(d, PrintedForm::b_form);
  std::set<std::string> keys;
  for (const auto& [k, v] : pi_c) keys.insert(k);
  for (const auto& [k, v] : b_c) keys.insert(k);
  for (const auto& k : keys) {
    const double b = b_c.contains(k) ? b_c.at(k) : 0.0;
    const double pf = pi_c.contains(k) ? pi_c.at(k) : 0.0;
    const double den = std::max(std::abs(b), std::abs(pf));
    TermDiff td{k, b, pf, den > 0 ? std::abs(b - pf) / den : 0.0, false};
    td.agree = td.rel_diff <= tol;
    if (!td.agree) rep.differing.push_back("coefficient " + k);
    rep.coefficients.push_back(td);
  }

  const PrintedDensity pd(d, p, f, PrintedForm::pi_form);
  const PrintedDensity bd(d, p, f, PrintedForm::b_form);
  const CompiledDensity cd(trace_density(2, d), p, f);
  const auto orders = cd.orders();
  const int no = static_cast<int>(orders.size());
  auto multi = [&](std::span<const double> x, std::span<double> out) {
    const auto a = pd.parts(x);
    const auto b = bd.parts(x);
    for (int k = 0; k < 4; ++k) {
      out[k] = a[k];
      out[4 + k] = b[k];
    }
    cd.parts(x, out.subspan(8, no));
  };
  const auto mr = integrate_multi(multi, 8 + no, p, integ);

  const int kmax = d == 5 ? 4 : 2;
  rep.printed_total = rep.printed_b_total = rep.pipeline_total = 0.0;
  for (int k = 0; k < kmax; ++k) {
    const std::string lab = order_label(k);
    rep.printed_parts[lab] = mr.results[k].value;
    rep.printed_b_parts[lab] = mr.results[4 + k].value;
    rep.printed_total += mr.results[k].value;
    rep.printed_b_total += mr.results[4 + k].value;
  }
  for (int i = 0; i < no; ++i) {
    rep.pipeline_parts[order_label(orders[i])] = mr.results[8 + i].value;
    rep.pipeline_total += mr.results[8 + i].value;
  }

  // paired replicate statistics (Monte Carlo only)
  double diff_b_stderr = 0.0;
  std::map<std::string, double> part_stderr;
  if (!mr.replicates.empty()) {
    const std::size_t nr = mr.replicates[0].size();
    std::vector<double> pr(nr, 0.0), br(nr, 0.0), qr(nr, 0.0);
    for (std::size_t r = 0; r < nr; ++r) {
      for (int k = 0; k < kmax; ++k) {
        pr[r] += mr.replicates[k][r];
        br[r] += mr.replicates[4 + k][r];
      }
      for (int i = 0; i < no; ++i) qr[r] += mr.replicates[8 + i][r];
    }
    rep.printed_stderr = stderr_of(pr);
    rep.pipeline_stderr = stderr_of(qr);
    std::vector<double> dp(nr), db(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      dp[r] = qr[r] - pr[r];
      db[r] = qr[r] - br[r];
    }
    rep.diff_stderr = stderr_of(dp);
    diff_b_stderr = stderr_of(db);
    for (int k = 0; k < kmax; ++k) {
      auto it = std::find(orders.begin(), orders.end(), k);
      if (it == orders.end()) continue;
      std::vector<double> dk(nr);
      for (std::size_t r = 0; r < nr; ++r) dk[r] = mr.replicates[8 + (it - orders.begin())][r] - mr.replicates[k][r];
      part_stderr[order_label(k)] = stderr_of(dk);
    }
  }

  auto differs = [&](double a, double b, double se) {
    return std::abs(a - b) > std::max(5.0 * se, tol * std::max(std::abs(a), std::abs(b)));
  };
  if (differs(rep.pipeline_total, rep.printed_total, rep.diff_stderr))
    rep.differing.push_back("total: pipeline vs printed pi-form");
  if (differs(rep.pipeline_total, rep.printed_b_total, diff_b_stderr))
    rep.differing.push_back("total: pipeline vs printed b-form");
  std::set<std::string> labels;
  for (const auto& [k, v] : rep.printed_parts) labels.insert(k);
  for (const auto& [k, v] : rep.pipeline_parts) labels.insert(k);
  for (const auto& lab : labels) {
    const double a = rep.pipeline_parts.contains(lab) ? rep.pipeline_parts.at(lab) : 0.0;
    const double b = rep.printed_parts.contains(lab) ? rep.printed_parts.at(lab) : 0.0;
    const double se = part_stderr.contains(lab) ? part_stderr.at(lab) : 0.0;
    if (differs(a, b, se)) rep.differing.push_back("part " + lab + ": pipeline vs printed pi-form");
  }
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const CoeffResult& r) {
  return {{"j", r.j},
          {"d", r.d},
          {"value", r.value},
          {"stderr", r.stderr_},
          {"method", to_string(r.method)},
          {"abs_scale", r.abs_scale},
          {"quad_error", r.quad_error},
          {"cutoff_radius", r.cutoff_radius},
          {"route", r.route}};
}

nlohmann::json to_json(const DensityReport& r) {
  return {{"x", r.x}, {"value", r.value}, {"parts", r.parts}};
}

nlohmann::json to_json(const DualRouteReport& r) {
  nlohmann::json coefs = nlohmann::json::array();
  for (const auto& t : r.coefficients)
    coefs.push_back({{"term", t.term}, {"b_form", t.b_form}, {"pi_form", t.pi_form}, {"rel_diff", t.rel_diff},
                     {"agree", t.agree}});
  return {{"d", r.d},
          {"integrator", r.integrator},
          {"coefficients", coefs},
          {"printed_parts", r.printed_parts},
          {"printed_b_parts", r.printed_b_parts},
          {"pipeline_parts", r.pipeline_parts},
          {"printed_total", r.printed_total},
          {"printed_b_total", r.printed_b_total},
          {"pipeline_total", r.pipeline_total},
          {"printed_stderr", r.printed_stderr},
          {"pipeline_stderr", r.pipeline_stderr},
          {"diff_stderr", r.diff_stderr},
          {"differing", r.differing}};
}

}  // namespace qtrace::coeffs
