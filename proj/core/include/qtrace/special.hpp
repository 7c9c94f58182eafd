#pragma once

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace qtrace::special {

/// Lanczos approximation (g = 7, 9 terms), reflection for x < 1/2.
double lanczos_gamma(double x);

/// Gamma with exact products for integer and half-integer arguments,
/// Lanczos elsewhere.
double gamma(double x);
double beta(double x, double y);

/// b_j(d) = \int (1+|eta|^2)^{-j} d eta = pi^{d/2} Gamma(j - d/2) / Gamma(j).
double b_plain(int j, int d);
/// b_{j,1}(d) = (b_{j-1}(d) - b_j(d)) / d.
double b_one(int j, int d);
/// b_{j,2}(d) = B(5/2, j - (d+4)/2) b_j(d-1).
double b_two(int j, int d);
/// b_{j,1,1}(d) = (pi/8) B(3, j - (d+4)/2) b_j(d-2).
double b_oneone(int j, int d);
/// The same quantity with the factor pi dropped, as it appears in print.
/// Only used to reproduce and diff the printed numeric constants.
double b_oneone_printed(int j, int d);

/// General moment \int eta_1^{2k} eta_2^{2l} (1+|eta|^2)^{-j} d eta via
/// sphere_moment and a Beta integral. Requires j > k + l + d/2.
double b_general(int j, int k, int l, int d);

/// M(gamma, d) with \int xi^gamma g(|xi|^2) d xi = M \int_0^inf u^{(d+|gamma|)/2-1} g(u) du.
/// `gamma` may be shorter than d (missing entries are zero); every entry must be even.
double sphere_moment(const std::vector<int>& gamma, int d);

/// Independent route for b_{j,k,l}(d): sphere_moment times an adaptive
/// quadrature of the radial integral. Returns {value, estimated error}.
std::pair<double, double> b_general_quadrature(int j, int k, int l, int d);

struct ACoeffs {
  double a1;          ///< from the defining integral (source of truth)
  double a2;          ///< b_{6,1,1}(d)
  double a1_combo;    ///< the printed linear combination, evaluated verbatim
  double discrepancy; ///< |a1 - a1_combo|
};

/// a_1 = (16 b_{6,2} - 8 b_{5,1} + b_4) / 96 and a_2 = b_{6,1,1}; d in {5, 7}.
ACoeffs a_coeffs(int d);

/// Memoised b_{j,k,l}(d) values for one dimension. Safe for concurrent reads.
class BTable {
public:
  explicit BTable(int d) : d_(d) {}
  int dim() const { return d_; }

  double operator()(int j, int k = 0, int l = 0) const;
  /// All entries computed so far, keyed by (j, k, l).
  std::map<std::tuple<int, int, int>, double> snapshot() const;

private:
  int d_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int>, double> values_;
};

}  // namespace qtrace::special
