#include "qtrace/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <nlohmann/json.hpp>

namespace qtrace {

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  int da = total_degree(a);
  int db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

MultiPoly::MultiPoly(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
}

MultiPoly::MultiPoly(int dim, const TermMap& terms) : MultiPoly(dim) {
  for (const auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != dim) throw std::invalid_argument("exponent length != dim");
    if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; }))
      throw std::invalid_argument("negative exponent");
    terms_[e] += c;
  }
  canonicalize();
}

MultiPoly MultiPoly::constant(int dim, double c) {
  return MultiPoly(dim, TermMap{{Exponent(dim, 0), c}});
}

MultiPoly MultiPoly::monomial(int dim, const Exponent& e, double c) {
  return MultiPoly(dim, TermMap{{e, c}});
}

MultiPoly MultiPoly::power_sum(int dim, int power) {
  TermMap t;
  for (int j = 0; j < dim; ++j) {
    Exponent e(dim, 0);
    e[j] = power;
    t[e] = 1.0;
  }
  return MultiPoly(dim, t);
}

void MultiPoly::canonicalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
  degree_ = 0;
  for (const auto& [e, c] : terms_) degree_ = std::max(degree_, total_degree(e));
}

double MultiPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

namespace {

template <class T>
T eval_impl(const MultiPoly& p, std::span<const T> x) {
  if (static_cast<int>(x.size()) != p.dim()) throw std::invalid_argument("point dimension mismatch");
  // powers[j][k] = x_j^k
  std::vector<std::vector<T>> powers(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    powers[j].assign(static_cast<std::size_t>(p.degree()) + 1, T(1));
    for (int k = 1; k <= p.degree(); ++k) powers[j][k] = powers[j][k - 1] * x[j];
  }
  T acc(0);
  for (const auto& [e, c] : p.terms()) {
    T m(c);
    for (std::size_t j = 0; j < e.size(); ++j)
      if (e[j]) m *= powers[j][e[j]];
    acc += m;
  }
  return acc;
}

}  // namespace

double MultiPoly::evaluate(std::span<const double> x) const { return eval_impl<double>(*this, x); }

std::complex<double> MultiPoly::evaluate(std::span<const std::complex<double>> x) const {
  return eval_impl<std::complex<double>>(*this, x);
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("dimension mismatch");
  MultiPoly r = a;
  for (const auto& [e, c] : b.terms_) r.terms_[e] += c;
  r.canonicalize();
  return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-1.0) * b; }

MultiPoly operator*(double s, const MultiPoly& a) {
  MultiPoly r = a;
  for (auto& [e, c] : r.terms_) c *= s;
  r.canonicalize();
  return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("dimension mismatch");
  MultiPoly r(a.dim_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e(ea.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
      r.terms_[e] += ca * cb;
    }
  r.canonicalize();
  return r;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest degree first reads naturally
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(c));
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    os << buf;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      os << "*x" << (j + 1);
      if (e[j] != 1) os << "^" << e[j];
    }
  }
  return os.str();
}

MultiPoly leading_part(const MultiPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("empty polynomial");
  MultiPoly::TermMap t;
  for (const auto& [e, c] : p.terms())
    if (total_degree(e) == p.degree()) t[e] = c;
  return MultiPoly(p.dim(), t);
}

MultiPoly derivative(const MultiPoly& p, const Exponent& gamma) {
  if (static_cast<int>(gamma.size()) != p.dim()) throw std::invalid_argument("multi-index length != dim");
  MultiPoly::TermMap t;
  for (const auto& [e, c] : p.terms()) {
    double coef = c;
    Exponent ne = e;
    bool vanish = false;
    for (std::size_t j = 0; j < e.size() && !vanish; ++j) {
      if (gamma[j] > e[j]) {
        vanish = true;
        break;
      }
      for (int k = 0; k < gamma[j]; ++k) coef *= (e[j] - k);
      ne[j] = e[j] - gamma[j];
    }
    if (!vanish) t[ne] += coef;
  }
  return MultiPoly(p.dim(), t);
}

namespace {

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<int> first_primes(int n) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < n; ++c) {
    bool prime = true;
    for (int p : primes)
      if (c % p == 0) {
        prime = false;
        break;
      }
    if (prime) primes.push_back(c);
  }
  return primes;
}

void normalize(std::vector<double>& v) {
  double n = 0;
  for (double a : v) n += a * a;
  n = std::sqrt(n);
  for (double& a : v) a /= n;
}

}  // namespace

std::vector<double> sphere_direction(int d, std::uint64_t i) {
  static const auto primes = first_primes(64);
  if (d > static_cast<int>(primes.size())) throw std::invalid_argument("dimension too large for Halton directions");
  std::vector<double> dir(d);
  for (int j = 0; j < d; ++j) {
    double u = radical_inverse(i, primes[j]);
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    dir[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
  }
  normalize(dir);
  return dir;
}

EllipticityCertificate is_elliptic(const MultiPoly& p, int n_dirs) {
  if (p.degree() < 2) throw std::invalid_argument("degree below 2");
  const int d = p.dim();
  if (n_dirs <= 0) n_dirs = 10000 * d;
  const MultiPoly pm = leading_part(p);

  EllipticityCertificate cert;
  cert.n_dirs = n_dirs;
  cert.min_value = std::numeric_limits<double>::infinity();

  // keep a handful of best samples to polish
  std::vector<std::pair<double, std::vector<double>>> best;
  for (int i = 1; i <= n_dirs; ++i) {
    const auto dir = sphere_direction(d, static_cast<std::uint64_t>(i));
    double v = pm.evaluate(dir);
    if (best.size() < 8 || v < best.back().first) {
      best.emplace_back(v, dir);
      std::sort(best.begin(), best.end(), [](auto& a, auto& b) { return a.first < b.first; });
      if (best.size() > 8) best.pop_back();
    }
  }

  std::vector<MultiPoly> grad;
  for (int j = 0; j < d; ++j) {
    Exponent g(d, 0);
    g[j] = 1;
    grad.push_back(derivative(pm, g));
  }
  for (auto& [v, x] : best) {
    // projected gradient descent on the sphere with backtracking
    double step = 0.1;
    for (int it = 0; it < 500 && step > 1e-14; ++it) {
      std::vector<double> g(d);
      double radial = 0;
      for (int j = 0; j < d; ++j) {
        g[j] = grad[j].evaluate(x);
        radial += g[j] * x[j];
      }
      for (int j = 0; j < d; ++j) g[j] -= radial * x[j];
      std::vector<double> y(d);
      for (int j = 0; j < d; ++j) y[j] = x[j] - step * g[j];
      normalize(y);
      double vy = pm.evaluate(y);
      if (vy < v) {
        x = y;
        v = vy;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (v < cert.min_value) {
      cert.min_value = v;
      cert.direction = x;
    }
  }
  cert.elliptic = cert.min_value > 0.0;
  return cert;
}

ScalingResult scaling_reduce(std::complex<double> lambda, double tau, int m) {
  if (!(tau > 0.0)) throw std::domain_error("scaling requires tau > 0");
  if (m < 2) throw std::domain_error("scaling requires m >= 2");
  ScalingResult r;
  r.epsilon = std::pow(tau, -1.0 / m);
  r.hbar = std::pow(tau, -static_cast<double>(m + 1) / m);
  r.z = lambda / tau;
  return r;
}

namespace {

class PolyParser {
public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  MultiPoly parse(int dim) {
    std::vector<std::pair<double, std::vector<std::pair<int, int>>>> terms;
    skip();
    int sign = 1;
    if (peek('+')) {
      ++pos_;
    } else if (peek('-')) {
      sign = -1;
      ++pos_;
    }
    terms.push_back(term(sign));
    skip();
    while (pos_ < s_.size()) {
      if (peek('+')) {
        ++pos_;
        sign = 1;
      } else if (peek('-')) {
        ++pos_;
        sign = -1;
      } else {
        fail("expected '+' or '-'");
      }
      terms.push_back(term(sign));
      skip();
    }
    int maxvar = 0;
    for (auto& t : terms)
      for (auto& [v, p] : t.second) maxvar = std::max(maxvar, v);
    if (dim == 0) dim = std::max(1, maxvar);
    if (maxvar > dim) throw std::invalid_argument("variable index exceeds dimension");
    MultiPoly::TermMap map;
    for (auto& [c, vars] : terms) {
      Exponent e(dim, 0);
      for (auto& [v, p] : vars) e[v - 1] += p;
      map[e] += c;
    }
    return MultiPoly(dim, map);
  }

private:
  std::pair<double, std::vector<std::pair<int, int>>> term(int sign) {
    double coef = sign;
    std::vector<std::pair<int, int>> vars;
    factor(coef, vars);
    skip();
    while (peek('*')) {
      ++pos_;
      factor(coef, vars);
      skip();
    }
    return {coef, vars};
  }

  void factor(double& coef, std::vector<std::pair<int, int>>& vars) {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == 'x' || c == 'X') {
      ++pos_;
      int idx = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) idx = integer();
      if (idx < 1) fail("variable index must be >= 1");
      int p = 1;
      skip();
      if (peek('^')) {
        ++pos_;
        skip();
        p = integer();
      }
      vars.emplace_back(idx, p);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      coef *= number();
    } else if (c == '(') {
      fail("parentheses are not supported");
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
  }

  double number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' || s_[pos_] == 'e' ||
            s_[pos_] == 'E' ||
            ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
             (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) fail("bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + tok + "'");
    }
    return 0;
  }

  int integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("polynomial parse error at " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_polynomial(std::string_view text, int dim) { return PolyParser(text).parse(dim); }

MultiPoly poly_from_json(const nlohmann::json& j) {
  int dim = j.at("dim").get<int>();
  MultiPoly::TermMap map;
  for (const auto& t : j.at("terms")) {
    Exponent e = t.at("exps").get<Exponent>();
    map[e] += t.at("coef").get<double>();
  }
  return MultiPoly(dim, map);
}

nlohmann::json poly_to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exps", e}, {"coef", c}});
  return {{"dim", p.dim()}, {"terms", terms}};
}

MultiPoly load_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open polynomial file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return poly_from_json(nlohmann::json::parse(text));
  return parse_polynomial(text);
}

DerivativeTable::DerivativeTable(const MultiPoly& p, const std::vector<Exponent>& gammas)
    : dim_(p.dim()), gammas_(gammas) {
  for (const auto& g : gammas) {
    MultiPoly dp = derivative(p, g);
    std::vector<FlatTerm> flat;
    for (const auto& [e, c] : dp.terms()) {
      flat.push_back({c, static_cast<int>(exps_.size())});
      for (int v : e) {
        exps_.push_back(v);
        max_exp_ = std::max(max_exp_, v);
      }
    }
    polys_.push_back(std::move(flat));
  }
}

void DerivativeTable::evaluate(std::span<const double> x, std::span<double> out) const {
  const int stride = max_exp_ + 1;
  // small fixed buffer keeps this allocation free for typical sizes
  double stack_buf[16 * 16];
  std::vector<double> heap;
  double* pw = stack_buf;
  if (dim_ * stride > 16 * 16) {
    heap.resize(static_cast<std::size_t>(dim_ * stride));
    pw = heap.data();
  }
  for (int j = 0; j < dim_; ++j) {
    pw[j * stride] = 1.0;
    for (int k = 1; k <= max_exp_; ++k) pw[j * stride + k] = pw[j * stride + k - 1] * x[j];
  }
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    double acc = 0.0;
    for (const auto& t : polys_[i]) {
      double m = t.coef;
      const int* e = exps_.data() + t.offset;
      for (int j = 0; j < dim_; ++j)
        if (e[j]) m *= pw[j * stride + e[j]];
      acc += m;
    }
    out[i] = acc;
  }
}

}  // namespace qtrace
