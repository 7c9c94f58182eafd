#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "qtrace/polynomial.hpp"
#include "qtrace/rational.hpp"

namespace qtrace::symcalc {

using cplx = std::complex<double>;

/// Sign of the even-order coefficients in the composition recursion.
///
/// `printed` uses Gamma(a,b) = (-1)^{|b|} / (2^{2N} a! b!) as it is commonly
/// written for this problem; `weyl` inserts the (i/2)^{2N} = (-1)^N factor of
/// the Weyl product. The two conventions give K_{2j} differing by (-1)^j.
enum class Convention { printed, weyl };

// ---------------------------------------------------------------------------
// Concrete mode: multi-indices of a fixed length d.

/// One term coef * prod_g d^g P * (P - z)^nu * xi^xi_exp / L^{k+1}.
struct SymbolTerm {
  Rational coef;
  std::vector<Exponent> derivs;  ///< sorted multiset; no zero multi-index
  int nu = 0;
  Exponent xi;
  int k = 0;
};

/// A formal sum of SymbolTerm in canonical form (like terms combined).
class ParamSymbol {
public:
  struct Key {
    std::vector<Exponent> derivs;
    int nu;
    Exponent xi;
    int k;
    bool operator<(const Key& o) const;
  };

  ParamSymbol(int dim, int order) : dim_(dim), order_(order) {}

  int dim() const { return dim_; }
  int order() const { return order_; }
  void set_order(int j) { order_ = j; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(SymbolTerm t);
  void add(const ParamSymbol& other, const Rational& scale = Rational(1));
  std::vector<SymbolTerm> terms() const;
  const std::map<Key, Rational>& raw() const { return terms_; }

  /// Deterministic text: one term per line, sorted, exact p/q coefficients.
  std::string to_string() const;

private:
  int dim_;
  int order_;
  std::map<Key, Rational> terms_;
};

/// K_0 = 1 / L.
ParamSymbol k0(int dim);
ParamSymbol d_x(const ParamSymbol& s, int axis);
ParamSymbol d_xi(const ParamSymbol& s, int axis);

/// K_{2j} from K_0 .. K_{2(j-1)}; history[l] must have order l.
ParamSymbol next_order(const std::vector<ParamSymbol>& history, Convention conv = Convention::printed);

/// K_0 .. K_{2 jmax} in concrete mode.
std::vector<ParamSymbol> parametrix(int dim, int jmax, Convention conv = Convention::printed);

/// Groups terms by denominator power k (denominator L^{k+1}).
std::map<int, ParamSymbol> q_decomposition(const ParamSymbol& s);

inline constexpr int kInfiniteValuation = std::numeric_limits<int>::max();

/// min over terms of nu + |xi|; kInfiniteValuation for an empty group.
int valuation(const ParamSymbol& q);

/// Evaluates the symbol with every d^gamma P replaced by the actual derivative.
class Evaluator {
public:
  Evaluator(const ParamSymbol& s, const MultiPoly& p);
  cplx operator()(std::span<const double> x, std::span<const double> xi, cplx z) const;

private:
  std::vector<SymbolTerm> terms_;
  MultiPoly p_;
  std::map<Exponent, MultiPoly> derivs_;
};

Evaluator instantiate(const ParamSymbol& s, const MultiPoly& p);

// ---------------------------------------------------------------------------
// Generic mode: axis sums kept symbolic.
//
// A term is a contraction: every axis label is summed over 1..d and appears
// in exactly two slots. Slots belong to P-derivative factors (a node with
// labels {a, b, c} stands for d_a d_b d_c P) or to xi factors. Pairs xi_a xi_a
// are stored as powers of |xi|^2.

struct GenericTerm {
  Rational coef;
  int nu = 0;
  int k = 0;
  int xi2 = 0;                         ///< power of |xi|^2
  std::vector<int> xi;                 ///< labels of single xi factors
  std::vector<std::vector<int>> nodes; ///< sorted label lists, each nonempty
  std::vector<std::pair<int, int>> deltas;  ///< Kronecker deltas between open labels

  int xi_degree() const { return 2 * xi2 + static_cast<int>(xi.size()); }
  int max_label() const;
};

/// Canonical encoding of a closed term's contraction graph (nu, k, xi2 included).
std::string canonical_key(const GenericTerm& t);
/// Rebuilds a canonical representative (labels renumbered) from a closed term.
GenericTerm canonical_form(const GenericTerm& t);

class GenericSymbol {
public:
  explicit GenericSymbol(int order = 0) : order_(order) {}

  int order() const { return order_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds a closed term (canonicalises and combines).
  void add(const GenericTerm& t);
  std::vector<GenericTerm> terms() const;
  std::string to_string() const;

private:
  int order_;
  std::map<std::string, GenericTerm> terms_;
};

GenericSymbol generic_k0();
GenericSymbol generic_next_order(const std::vector<GenericSymbol>& history,
                                 Convention conv = Convention::printed);
std::vector<GenericSymbol> generic_parametrix(int jmax, Convention conv = Convention::printed);

/// Expands the axis sums at a concrete dimension (oracle comparison).
ParamSymbol expand(const GenericSymbol& s, int dim);

std::map<int, GenericSymbol> q_decomposition(const GenericSymbol& s);
int valuation(const GenericSymbol& q);

/// Human-readable factor text such as "(d1d1P)(d1d2P)^2 xi1".
std::string describe(const GenericTerm& t);

// ---------------------------------------------------------------------------
// Structural checks.

struct LemmaCheck {
  int j;
  int k;
  int valuation;
  int required;
  bool pass;
};

struct StructureReport {
  int jmax;
  std::vector<LemmaCheck> lemma;     ///< val Q_k^{2j} >= 2(k-1-2j), 2j+2 <= k <= 3j
  bool index_range_ok = true;        ///< j+1 <= k <= 3j for every term, j >= 1
  bool degree_bound_ok = true;       ///< nu + |xi| <= k - 2 for every term, j >= 1
  int max_degree_excess = std::numeric_limits<int>::min();  ///< max(nu + |xi| - k)
  std::vector<std::string> degree_violations;  ///< first few offenders
  std::vector<std::size_t> term_counts;
  bool lemma_ok() const;
};

/// Runs the index-range, degree and valuation checks in generic mode.
StructureReport check_structure(int jmax, Convention conv = Convention::printed);
StructureReport check_structure(const std::vector<GenericSymbol>& ks);

}  // namespace qtrace::symcalc
