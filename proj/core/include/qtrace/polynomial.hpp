#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qtrace {

using Exponent = std::vector<int>;

/// Graded lexicographic order: total degree first, then lexicographic.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

int total_degree(const Exponent& e);

/// Sparse multivariate polynomial over the reals in canonical form.
///
/// Terms are kept in graded-lex order with no zero coefficients, so two
/// polynomials are equal iff their term maps are equal. Values are immutable
/// once built; every operation returns a new polynomial.
class MultiPoly {
public:
  using TermMap = std::map<Exponent, double, GrlexLess>;

  explicit MultiPoly(int dim);
  MultiPoly(int dim, const TermMap& terms);

  static MultiPoly constant(int dim, double c);
  static MultiPoly monomial(int dim, const Exponent& e, double c = 1.0);
  /// Sum of x_j^power over all axes.
  static MultiPoly power_sum(int dim, int power);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const Exponent& e) const;

  double evaluate(std::span<const double> x) const;
  std::complex<double> evaluate(std::span<const std::complex<double>> x) const;

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(double s, const MultiPoly& a);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Text form `c*x1^a1*...*xd^ad + ...` with 17 significant digits.
  std::string to_string() const;

private:
  void canonicalize();

  int dim_;
  int degree_ = 0;
  TermMap terms_;
};

/// Sum of the terms of total degree exactly deg(P). Throws on the zero polynomial.
MultiPoly leading_part(const MultiPoly& p);

/// Exact formal partial derivative d^gamma P.
MultiPoly derivative(const MultiPoly& p, const Exponent& gamma);

struct EllipticityCertificate {
  bool elliptic = false;
  double min_value = 0.0;            ///< smallest P_m found on the unit sphere
  std::vector<double> direction;     ///< where it was found
  int n_dirs = 0;
};

/// i-th deterministic unit direction in R^d (Halton point through the Gaussian quantile).
std::vector<double> sphere_direction(int d, std::uint64_t i);

/// Sampled check that the leading part is positive on the unit sphere.
///
/// Directions come from a Halton sequence pushed through the Gaussian
/// quantile and normalised; the best samples are then polished by projected
/// gradient descent. This is evidence, not a proof.
EllipticityCertificate is_elliptic(const MultiPoly& p, int n_dirs = 0);

struct ScalingResult {
  double hbar;
  std::complex<double> z;
  double epsilon;
};

/// x = tau^{1/m} y reduction: hbar = tau^{-(m+1)/m}, z = lambda / tau, epsilon = tau^{-1/m}.
ScalingResult scaling_reduce(std::complex<double> lambda, double tau, int m);

/// Parses the text form. `dim == 0` infers the dimension from the largest
/// variable index; a bare `x` is accepted as `x1`.
MultiPoly parse_polynomial(std::string_view text, int dim = 0);

MultiPoly poly_from_json(const nlohmann::json& j);
nlohmann::json poly_to_json(const MultiPoly& p);

/// Loads either JSON (`{dim, terms}`) or the text form from a file.
MultiPoly load_polynomial(const std::string& path);

/// Precomputes a fixed set of partial derivatives of P for fast repeated
/// evaluation at many points (one shared table of powers per point).
class DerivativeTable {
public:
  DerivativeTable(const MultiPoly& p, const std::vector<Exponent>& gammas);

  int dim() const { return dim_; }
  std::size_t size() const { return polys_.size(); }
  const Exponent& gamma(std::size_t i) const { return gammas_[i]; }

  /// Writes d^gamma_i P(x) into out[i].
  void evaluate(std::span<const double> x, std::span<double> out) const;

private:
  struct FlatTerm {
    double coef;
    int offset;  // into exps_
  };
  int dim_;
  int max_exp_ = 0;
  std::vector<Exponent> gammas_;
  std::vector<std::vector<FlatTerm>> polys_;
  std::vector<int> exps_;
};

}  // namespace qtrace
