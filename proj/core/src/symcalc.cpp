#include "qtrace/symcalc.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qtrace::symcalc {

namespace {

Rational power4(int n) {
  std::int64_t p = 1;
  for (int i = 0; i < n; ++i) p *= 4;
  return Rational(p);
}

std::int64_t factorial(int n) {
  std::int64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string exponent_str(const Exponent& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  return s + ")";
}

// all multi-indices of length d and total degree n, in lexicographic order
void multi_indices(int d, int n, Exponent& cur, int pos, std::vector<Exponent>& out) {
  if (pos == d - 1) {
    cur[pos] = n;
    out.push_back(cur);
    return;
  }
  for (int a = n; a >= 0; --a) {
    cur[pos] = a;
    multi_indices(d, n - a, cur, pos + 1, out);
  }
}

std::vector<Exponent> multi_indices(int d, int n) {
  std::vector<Exponent> out;
  Exponent cur(d, 0);
  multi_indices(d, n, cur, 0, out);
  return out;
}

Exponent unit(int d, int i) {
  Exponent e(d, 0);
  e.at(i) += 1;
  return e;
}

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Concrete mode

bool ParamSymbol::Key::operator<(const Key& o) const {
  return std::tie(k, nu, xi, derivs) < std::tie(o.k, o.nu, o.xi, o.derivs);
}

void ParamSymbol::add(SymbolTerm t) {
  if (t.coef.is_zero()) return;
  if (static_cast<int>(t.xi.size()) != dim_) throw std::invalid_argument("xi multi-index has wrong length");
  for (const auto& g : t.derivs) {
    if (static_cast<int>(g.size()) != dim_) throw std::invalid_argument("derivative multi-index has wrong length");
    if (total_degree(g) == 0) throw std::invalid_argument("bare P outside the (P - z) generator");
  }
  std::sort(t.derivs.begin(), t.derivs.end());
  Key key{std::move(t.derivs), t.nu, std::move(t.xi), t.k};
  auto [it, inserted] = terms_.try_emplace(std::move(key), t.coef);
  if (!inserted) {
    it->second = it->second + t.coef;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void ParamSymbol::add(const ParamSymbol& other, const Rational& scale) {
  if (other.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  for (const auto& [key, c] : other.terms_) add(SymbolTerm{c * scale, key.derivs, key.nu, key.xi, key.k});
}

std::vector<SymbolTerm> ParamSymbol::terms() const {
  std::vector<SymbolTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back(SymbolTerm{c, key.derivs, key.nu, key.xi, key.k});
  return out;
}

std::string ParamSymbol::to_string() const {
  std::ostringstream os;
  for (const auto& [key, c] : terms_) {
    os << (c < Rational(0) ? "" : "+") << c.str();
    for (std::size_t i = 0; i < key.derivs.size();) {
      std::size_t j = i;
      while (j < key.derivs.size() && key.derivs[j] == key.derivs[i]) ++j;
      os << " d" << exponent_str(key.derivs[i]) << "P";
      if (j - i > 1) os << "^" << (j - i);
      i = j;
    }
    if (key.nu) os << " (P-z)^" << key.nu;
    if (total_degree(key.xi)) os << " xi" << exponent_str(key.xi);
    os << " / L^" << key.k + 1 << "\n";
  }
  return os.str();
}

ParamSymbol k0(int dim) {
  ParamSymbol s(dim, 0);
  s.add(SymbolTerm{Rational(1), {}, 0, Exponent(dim, 0), 0});
  return s;
}

ParamSymbol d_x(const ParamSymbol& s, int axis) {
  const int d = s.dim();
  if (axis < 0 || axis >= d) throw std::out_of_range("axis out of range");
  const Exponent e = unit(d, axis);
  ParamSymbol r(d, s.order());
  for (const auto& [key, c] : s.raw()) {
    for (std::size_t m = 0; m < key.derivs.size(); ++m) {
      auto dv = key.derivs;
      dv[m] = add(dv[m], e);
      r.add(SymbolTerm{c, std::move(dv), key.nu, key.xi, key.k});
    }
    auto dv = key.derivs;
    dv.push_back(e);
    if (key.nu > 0) r.add(SymbolTerm{c * Rational(key.nu), dv, key.nu - 1, key.xi, key.k});
    r.add(SymbolTerm{c * Rational(-2 * (key.k + 1)), std::move(dv), key.nu + 1, key.xi, key.k + 1});
  }
  return r;
}

ParamSymbol d_xi(const ParamSymbol& s, int axis) {
  const int d = s.dim();
  if (axis < 0 || axis >= d) throw std::out_of_range("axis out of range");
  ParamSymbol r(d, s.order());
  for (const auto& [key, c] : s.raw()) {
    if (key.xi[axis] > 0) {
      auto xi = key.xi;
      xi[axis] -= 1;
      r.add(SymbolTerm{c * Rational(key.xi[axis]), key.derivs, key.nu, std::move(xi), key.k});
    }
    r.add(SymbolTerm{c * Rational(-2 * (key.k + 1)), key.derivs, key.nu, add(key.xi, unit(d, axis)), key.k + 1});
  }
  return r;
}

namespace {

// s multiplied by prod of extra factors: nu_add copies of (P - z), extra derivatives
void accumulate(ParamSymbol& out, const ParamSymbol& s, const Rational& scale, int nu_add,
                const std::vector<Exponent>& extra) {
  for (const auto& [key, c] : s.raw()) {
    auto dv = key.derivs;
    dv.insert(dv.end(), extra.begin(), extra.end());
    out.add(SymbolTerm{c * scale, std::move(dv), key.nu + nu_add, key.xi, key.k});
  }
}

}  // namespace

ParamSymbol next_order(const std::vector<ParamSymbol>& history, Convention conv) {
  if (history.empty()) throw std::invalid_argument("next_order needs K_0 in the history");
  const int j = static_cast<int>(history.size());
  const int d = history[0].dim();
  for (int l = 0; l < j; ++l)
    if (history[l].order() != l || history[l].dim() != d) throw std::invalid_argument("incomplete history");

  ParamSymbol sum(d, j);
  for (int l = 0; l < j; ++l) {
    const int N = j - l;
    const Rational sign = (conv == Convention::weyl && N % 2) ? Rational(-1) : Rational(1);
    const ParamSymbol& K = history[l];

    if (N == 1) {  // alpha = 2 e_i, beta = 0: (1/4) Delta_x K
      for (int i = 0; i < d; ++i) sum.add(d_x(d_x(K, i), i), sign * Rational(1, 4));
    }

    // alpha = 0, |beta| = 2N: d_x^beta (P - z)^2 * d_xi^beta K / (4^N beta!)
    std::map<Exponent, ParamSymbol> dxi_cache;
    std::function<const ParamSymbol&(const Exponent&)> dxi_of = [&](const Exponent& b) -> const ParamSymbol& {
      auto it = dxi_cache.find(b);
      if (it != dxi_cache.end()) return it->second;
      if (total_degree(b) == 0) return dxi_cache.emplace(b, K).first->second;
      int axis = 0;
      while (b[axis] == 0) ++axis;
      Exponent prev = b;
      prev[axis] -= 1;
      ParamSymbol r = d_xi(dxi_of(prev), axis);
      return dxi_cache.emplace(b, std::move(r)).first->second;
    };

    for (const Exponent& beta : multi_indices(d, 2 * N)) {
      std::int64_t bfact = 1;
      for (int b : beta) bfact *= factorial(b);
      const Rational gamma = sign / (power4(N) * Rational(bfact));
      const ParamSymbol& D = dxi_of(beta);
      if (D.empty()) continue;
      // Leibniz over beta' <= beta
      std::vector<Exponent> parts;
      Exponent cur(d, 0);
      std::function<void(int)> rec = [&](int pos) {
        if (pos == d) {
          parts.push_back(cur);
          return;
        }
        for (int a = 0; a <= beta[pos]; ++a) {
          cur[pos] = a;
          rec(pos + 1);
        }
      };
      rec(0);
      for (const Exponent& b1 : parts) {
        Exponent b2(d);
        std::int64_t c = 1;
        for (int i = 0; i < d; ++i) {
          b2[i] = beta[i] - b1[i];
          c *= binomial(beta[i], b1[i]);
        }
        std::vector<Exponent> extra;
        int nu_add = 0;
        for (const Exponent* g : std::array<const Exponent*, 2>{&b1, &b2}) {
          if (total_degree(*g) == 0)
            ++nu_add;
          else
            extra.push_back(*g);
        }
        accumulate(sum, D, gamma * Rational(c), nu_add, extra);
      }
    }
  }

  // K_{2j} = -K_0 * sum
  ParamSymbol r(d, j);
  for (const auto& [key, c] : sum.raw()) r.add(SymbolTerm{-c, key.derivs, key.nu, key.xi, key.k + 1});
  return r;
}

std::vector<ParamSymbol> parametrix(int dim, int jmax, Convention conv) {
  std::vector<ParamSymbol> ks{k0(dim)};
  for (int j = 1; j <= jmax; ++j) ks.push_back(next_order(ks, conv));
  return ks;
}

std::map<int, ParamSymbol> q_decomposition(const ParamSymbol& s) {
  std::map<int, ParamSymbol> out;
  for (const auto& t : s.terms()) out.try_emplace(t.k, s.dim(), s.order()).first->second.add(t);
  return out;
}

int valuation(const ParamSymbol& q) {
  int v = kInfiniteValuation;
  for (const auto& [key, c] : q.raw()) v = std::min(v, key.nu + total_degree(key.xi));
  return v;
}

Evaluator::Evaluator(const ParamSymbol& s, const MultiPoly& p) : terms_(s.terms()), p_(p) {
  if (p.dim() != s.dim()) throw std::invalid_argument("dimension mismatch between symbol and polynomial");
  for (const auto& t : terms_)
    for (const auto& g : t.derivs)
      if (!derivs_.count(g)) derivs_.emplace(g, derivative(p, g));
}

cplx Evaluator::operator()(std::span<const double> x, std::span<const double> xi, cplx z) const {
  const int d = p_.dim();
  if (static_cast<int>(x.size()) != d || static_cast<int>(xi.size()) != d)
    throw std::invalid_argument("point dimension mismatch");
  std::map<Exponent, double> dv;
  for (const auto& [g, poly] : derivs_) dv.emplace(g, poly.evaluate(x));
  const cplx pz = p_.evaluate(x) - z;
  double xi2 = 0.0;
  for (double v : xi) xi2 += v * v;
  const cplx L = xi2 + pz * pz;
  cplx sum = 0.0;
  for (const auto& t : terms_) {
    cplx v = t.coef.to_double();
    for (const auto& g : t.derivs) v *= dv.at(g);
    for (int i = 0; i < d; ++i) v *= std::pow(xi[i], t.xi[i]);
    v *= std::pow(pz, t.nu);
    v /= std::pow(L, t.k + 1);
    sum += v;
  }
  return sum;
}

Evaluator instantiate(const ParamSymbol& s, const MultiPoly& p) { return Evaluator(s, p); }

// ---------------------------------------------------------------------------
// Generic mode

int GenericTerm::max_label() const {
  int m = -1;
  for (int a : xi) m = std::max(m, a);
  for (const auto& n : nodes)
    for (int a : n) m = std::max(m, a);
  for (auto [a, b] : deltas) m = std::max({m, a, b});
  return m;
}

namespace {

struct Graph {
  int n = 0;
  std::vector<int> order, loops, xis;
  std::vector<std::vector<int>> mult;
};

Graph build_graph(const GenericTerm& t) {
  Graph g;
  g.n = static_cast<int>(t.nodes.size());
  g.order.assign(g.n, 0);
  g.loops.assign(g.n, 0);
  g.xis.assign(g.n, 0);
  g.mult.assign(g.n, std::vector<int>(g.n, 0));
  std::map<int, std::vector<int>> where;  // label -> node indices (-1 for a xi slot)
  for (int i = 0; i < g.n; ++i) {
    g.order[i] = static_cast<int>(t.nodes[i].size());
    for (int a : t.nodes[i]) where[a].push_back(i);
  }
  for (int a : t.xi) where[a].push_back(-1);
  for (const auto& [a, w] : where) {
    if (w.size() != 2) throw std::logic_error("label " + std::to_string(a) + " is not contracted exactly twice");
    const int u = w[0], v = w[1];
    if (u < 0 && v < 0) throw std::logic_error("xi-xi pair left unreduced");
    if (u < 0 || v < 0) {
      ++g.xis[std::max(u, v)];
    } else if (u == v) {
      ++g.loops[u];
    } else {
      ++g.mult[u][v];
      ++g.mult[v][u];
    }
  }
  return g;
}

std::vector<int> rank_by(const std::vector<std::vector<int>>& sig) {
  std::vector<std::vector<int>> sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> r(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i)
    r[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[i]) - sorted.begin());
  return r;
}

std::vector<int> refine(const Graph& g, std::vector<int> colors) {
  for (;;) {
    std::vector<std::vector<int>> sig(g.n);
    for (int i = 0; i < g.n; ++i) {
      std::vector<int> s{colors[i]};
      std::vector<std::pair<int, int>> nb;
      for (int j = 0; j < g.n; ++j)
        if (j != i && g.mult[i][j]) nb.emplace_back(colors[j], g.mult[i][j]);
      std::sort(nb.begin(), nb.end());
      for (auto [c, m] : nb) {
        s.push_back(c);
        s.push_back(m);
      }
      sig[i] = std::move(s);
    }
    auto next = rank_by(sig);
    const int before = *std::max_element(colors.begin(), colors.end());
    const int after = *std::max_element(next.begin(), next.end());
    colors = std::move(next);
    if (after == before) return colors;
  }
}

std::vector<int> encode(const Graph& g, const std::vector<int>& perm) {
  std::vector<int> code;
  code.reserve(3 * g.n + g.n * g.n / 2);
  for (int p : perm) {
    code.push_back(g.order[p]);
    code.push_back(g.loops[p]);
    code.push_back(g.xis[p]);
  }
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b) code.push_back(g.mult[perm[a]][perm[b]]);
  return code;
}

void search(const Graph& g, std::vector<int> colors, std::vector<int>& best, std::vector<int>& best_perm) {
  colors = refine(g, std::move(colors));
  // first cell with more than one member
  std::map<int, std::vector<int>> cells;
  for (int i = 0; i < g.n; ++i) cells[colors[i]].push_back(i);
  for (const auto& [c, members] : cells) {
    if (members.size() < 2) continue;
    for (int v : members) {
      std::vector<std::vector<int>> sig(g.n);
      for (int i = 0; i < g.n; ++i) sig[i] = {colors[i], i == v ? 0 : 1};
      search(g, rank_by(sig), best, best_perm);
    }
    return;
  }
  std::vector<int> perm(g.n);
  for (int i = 0; i < g.n; ++i) perm[colors[i]] = i;
  auto code = encode(g, perm);
  if (best.empty() || code < best) {
    best = std::move(code);
    best_perm = std::move(perm);
  }
}

std::vector<int> canonical_code(const GenericTerm& t) {
  const Graph g = build_graph(t);
  std::vector<int> head{t.nu, t.k, t.xi2, g.n};
  if (g.n == 0) return head;
  std::vector<std::vector<int>> sig(g.n);
  for (int i = 0; i < g.n; ++i) sig[i] = {g.order[i], g.loops[i], g.xis[i]};
  std::vector<int> best, perm;
  search(g, rank_by(sig), best, perm);
  head.insert(head.end(), best.begin(), best.end());
  return head;
}

std::string code_string(const std::vector<int>& code) {
  std::string s;
  for (int c : code) {
    s += std::to_string(c);
    s += ',';
  }
  return s;
}

GenericTerm from_code(const std::vector<int>& code, const Rational& coef) {
  GenericTerm t;
  t.coef = coef;
  t.nu = code[0];
  t.k = code[1];
  t.xi2 = code[2];
  const int n = code[3];
  t.nodes.assign(n, {});
  int label = 0;
  const int* adj = code.data() + 4 + 3 * n;
  for (int p = 0; p < n; ++p) {
    const int loops = code[4 + 3 * p + 1];
    for (int i = 0; i < loops; ++i) {
      t.nodes[p].push_back(label);
      t.nodes[p].push_back(label);
      ++label;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int m = *adj++;
      for (int i = 0; i < m; ++i) {
        t.nodes[a].push_back(label);
        t.nodes[b].push_back(label);
        ++label;
      }
    }
  for (int p = 0; p < n; ++p) {
    const int xis = code[4 + 3 * p + 2];
    for (int i = 0; i < xis; ++i) {
      t.nodes[p].push_back(label);
      t.xi.push_back(label);
      ++label;
    }
  }
  for (auto& nd : t.nodes) std::sort(nd.begin(), nd.end());
  return t;
}

// resolves deltas, turns xi_a xi_a into |xi|^2 and sorts node labels
GenericTerm close(GenericTerm t) {
  for (std::size_t i = 0; i < t.deltas.size(); ++i) {
    const auto [keep, drop] = t.deltas[i];
    auto rename = [&](int& a) {
      if (a == drop) a = keep;
    };
    for (int& a : t.xi) rename(a);
    for (auto& nd : t.nodes)
      for (int& a : nd) rename(a);
    for (std::size_t j = i + 1; j < t.deltas.size(); ++j) {
      rename(t.deltas[j].first);
      rename(t.deltas[j].second);
    }
  }
  t.deltas.clear();
  std::map<int, int> count;
  for (int a : t.xi) ++count[a];
  std::vector<int> xi;
  for (auto [a, c] : count) {
    if (c == 2)
      ++t.xi2;
    else if (c == 1)
      xi.push_back(a);
    else
      throw std::logic_error("xi label used more than twice");
  }
  t.xi = std::move(xi);
  for (auto& nd : t.nodes) std::sort(nd.begin(), nd.end());
  return t;
}

void push(std::vector<GenericTerm>& out, GenericTerm t, const Rational& factor) {
  t.coef = t.coef * factor;
  if (!t.coef.is_zero()) out.push_back(std::move(t));
}

std::vector<GenericTerm> gdx(const GenericTerm& t, int a) {
  std::vector<GenericTerm> out;
  for (std::size_t m = 0; m < t.nodes.size(); ++m) {
    GenericTerm r = t;
    r.nodes[m].push_back(a);
    std::sort(r.nodes[m].begin(), r.nodes[m].end());
    push(out, std::move(r), Rational(1));
  }
  if (t.nu > 0) {
    GenericTerm r = t;
    r.nu -= 1;
    r.nodes.push_back({a});
    push(out, std::move(r), Rational(t.nu));
  }
  GenericTerm r = t;
  r.nu += 1;
  r.k += 1;
  r.nodes.push_back({a});
  push(out, std::move(r), Rational(-2 * (t.k + 1)));
  return out;
}

std::vector<GenericTerm> gdxi(const GenericTerm& t, int a) {
  std::vector<GenericTerm> out;
  for (std::size_t m = 0; m < t.xi.size(); ++m) {
    GenericTerm r = t;
    const int c = r.xi[m];
    r.xi.erase(r.xi.begin() + static_cast<long>(m));
    r.deltas.emplace_back(c, a);
    push(out, std::move(r), Rational(1));
  }
  if (t.xi2 > 0) {
    GenericTerm r = t;
    r.xi2 -= 1;
    r.xi.push_back(a);
    push(out, std::move(r), Rational(2 * t.xi2));
  }
  GenericTerm r = t;
  r.k += 1;
  r.xi.push_back(a);
  push(out, std::move(r), Rational(-2 * (t.k + 1)));
  return out;
}

}  // namespace

std::string canonical_key(const GenericTerm& t) { return code_string(canonical_code(close(t))); }

GenericTerm canonical_form(const GenericTerm& t) { return from_code(canonical_code(close(t)), t.coef); }

void GenericSymbol::add(const GenericTerm& t) {
  if (t.coef.is_zero()) return;
  const auto code = canonical_code(close(t));
  const std::string key = code_string(code);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, from_code(code, t.coef));
    return;
  }
  it->second.coef = it->second.coef + t.coef;
  if (it->second.coef.is_zero()) terms_.erase(it);
}

std::vector<GenericTerm> GenericSymbol::terms() const {
  std::vector<GenericTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, t] : terms_) out.push_back(t);
  return out;
}

std::string describe(const GenericTerm& t) {
  auto name = [](int a) {
    std::string s;
    if (a < 26) {
      s += static_cast<char>('a' + a);
    } else {
      s = "l" + std::to_string(a);
    }
    return s;
  };
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << " ";
    first = false;
  };
  for (const auto& nd : t.nodes) {
    sep();
    os << "d_";
    for (int a : nd) os << name(a);
    os << "P";
  }
  if (t.nu) {
    sep();
    os << "(P-z)^" << t.nu;
  }
  if (t.xi2) {
    sep();
    os << "|xi|^" << 2 * t.xi2;
  }
  for (int a : t.xi) {
    sep();
    os << "xi_" << name(a);
  }
  if (first) os << "1";
  os << " / L^" << t.k + 1;
  return os.str();
}

std::string GenericSymbol::to_string() const {
  std::vector<std::pair<std::tuple<int, int, int, std::string>, const GenericTerm*>> rows;
  for (const auto& [key, t] : terms_) rows.push_back({{t.k, t.nu, t.xi_degree(), key}, &t});
  std::sort(rows.begin(), rows.end());
  std::ostringstream os;
  for (const auto& [key, t] : rows)
    os << (t->coef < Rational(0) ? "" : "+") << t->coef.str() << " " << describe(*t) << "\n";
  return os.str();
}

GenericSymbol generic_k0() {
  GenericSymbol s(0);
  GenericTerm t;
  t.coef = Rational(1);
  s.add(t);
  return s;
}

GenericSymbol generic_next_order(const std::vector<GenericSymbol>& history, Convention conv) {
  if (history.empty()) throw std::invalid_argument("next_order needs K_0 in the history");
  const int j = static_cast<int>(history.size());
  for (int l = 0; l < j; ++l)
    if (history[l].order() != l) throw std::invalid_argument("incomplete history");

  GenericSymbol sum(j);
  for (int l = 0; l < j; ++l) {
    const int N = j - l;
    const Rational sign = (conv == Convention::weyl && N % 2) ? Rational(-1) : Rational(1);
    const int n = 2 * N;
    const Rational gamma = sign / (power4(N) * Rational(factorial(n)));

    for (const GenericTerm& base : history[l].terms()) {
      const int fresh = base.max_label() + 1;
      if (N == 1) {
        for (const auto& t1 : gdx(base, fresh))
          for (auto t2 : gdx(t1, fresh)) {
            t2.coef = t2.coef * sign * Rational(1, 4);
            sum.add(t2);
          }
      }
      // d_xi^{b_1 .. b_n} of the base term
      std::vector<GenericTerm> open{base};
      for (int i = 0; i < n; ++i) {
        std::vector<GenericTerm> next;
        for (const auto& t : open) {
          auto d = gdxi(t, fresh + i);
          next.insert(next.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
        }
        open.swap(next);
      }
      // d_x^{b_1 .. b_n} (P - z)^2 split as d_{b_1..b_s}(P-z) d_{b_s+1..b_n}(P-z)
      for (const auto& t : open) {
        for (int s = 0; s <= n; ++s) {
          GenericTerm r = t;
          r.coef = r.coef * gamma * Rational(binomial(n, s));
          std::vector<int> left, right;
          for (int i = 0; i < s; ++i) left.push_back(fresh + i);
          for (int i = s; i < n; ++i) right.push_back(fresh + i);
          for (auto* part : std::array<std::vector<int>*, 2>{&left, &right}) {
            if (part->empty())
              r.nu += 1;
            else
              r.nodes.push_back(*part);
          }
          sum.add(r);
        }
      }
    }
  }

  GenericSymbol r(j);
  for (GenericTerm t : sum.terms()) {
    t.coef = -t.coef;
    t.k += 1;
    r.add(t);
  }
  return r;
}

std::vector<GenericSymbol> generic_parametrix(int jmax, Convention conv) {
  std::vector<GenericSymbol> ks{generic_k0()};
  for (int j = 1; j <= jmax; ++j) ks.push_back(generic_next_order(ks, conv));
  return ks;
}

ParamSymbol expand(const GenericSymbol& s, int dim) {
  ParamSymbol out(dim, s.order());
  for (const GenericTerm& t : s.terms()) {
    const int nl = t.max_label() + 1;
    std::vector<int> assign(nl, 0);
    // |xi|^{2m} = sum over compositions c of m of m!/prod c_i! xi^{2c}
    std::vector<std::pair<Exponent, std::int64_t>> xi2_terms;
    for (const Exponent& c : multi_indices(dim, t.xi2)) {
      std::int64_t w = factorial(t.xi2);
      Exponent e(dim);
      for (int i = 0; i < dim; ++i) {
        w /= factorial(c[i]);
        e[i] = 2 * c[i];
      }
      xi2_terms.emplace_back(std::move(e), w);
    }
    std::function<void(int)> rec = [&](int pos) {
      if (pos < nl) {
        for (int v = 0; v < dim; ++v) {
          assign[pos] = v;
          rec(pos + 1);
        }
        return;
      }
      std::vector<Exponent> derivs;
      for (const auto& nd : t.nodes) {
        Exponent g(dim, 0);
        for (int a : nd) g[assign[a]] += 1;
        derivs.push_back(std::move(g));
      }
      Exponent xi(dim, 0);
      for (int a : t.xi) xi[assign[a]] += 1;
      for (const auto& [e, w] : xi2_terms)
        out.add(SymbolTerm{t.coef * Rational(w), derivs, t.nu, add(xi, e), t.k});
    };
    rec(0);
  }
  return out;
}

std::map<int, GenericSymbol> q_decomposition(const GenericSymbol& s) {
  std::map<int, GenericSymbol> out;
  for (const auto& t : s.terms()) out.try_emplace(t.k, s.order()).first->second.add(t);
  return out;
}

int valuation(const GenericSymbol& q) {
  int v = kInfiniteValuation;
  for (const auto& t : q.terms()) v = std::min(v, t.nu + t.xi_degree());
  return v;
}

bool StructureReport::lemma_ok() const {
  return std::all_of(lemma.begin(), lemma.end(), [](const LemmaCheck& c) { return c.pass; });
}

StructureReport check_structure(const std::vector<GenericSymbol>& ks) {
  StructureReport rep;
  rep.jmax = static_cast<int>(ks.size()) - 1;
  for (int j = 0; j <= rep.jmax; ++j) {
    rep.term_counts.push_back(ks[j].size());
    if (j == 0) continue;
    for (const auto& t : ks[j].terms()) {
      if (t.k < j + 1 || t.k > 3 * j) rep.index_range_ok = false;
      const int deg = t.nu + t.xi_degree();
      rep.max_degree_excess = std::max(rep.max_degree_excess, deg - t.k);
      if (deg > t.k - 2) {
        rep.degree_bound_ok = false;
        if (rep.degree_violations.size() < 8)
          rep.degree_violations.push_back("j=" + std::to_string(j) + ": " + t.coef.str() + " " + describe(t));
      }
    }
    const auto q = q_decomposition(ks[j]);
    for (int k = 2 * j + 2; k <= 3 * j; ++k) {
      auto it = q.find(k);
      const int val = it == q.end() ? kInfiniteValuation : valuation(it->second);
      const int req = 2 * (k - 1 - 2 * j);
      rep.lemma.push_back(LemmaCheck{j, k, val, req, val >= req});
    }
  }
  return rep;
}

StructureReport check_structure(int jmax, Convention conv) {
  return check_structure(generic_parametrix(jmax, conv));
}

}  // namespace qtrace::symcalc
