#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "qtrace/polynomial.hpp"

namespace qtrace::qepver {

using cplx = std::complex<double>;

/// L(z) = L0 + z L1 + z^2 with L0 symmetric positive definite and L1 symmetric.
class QuadPencil {
public:
  QuadPencil(Eigen::MatrixXd L0, Eigen::MatrixXd L1);

  int size() const { return static_cast<int>(L0_.rows()); }
  const Eigen::MatrixXd& L0() const { return L0_; }
  const Eigen::MatrixXd& L1() const { return L1_; }
  Eigen::MatrixXcd at(cplx z) const;

private:
  Eigen::MatrixXd L0_, L1_;
};

/// A = [[0, I], [-L0, -L1]].
Eigen::MatrixXd companion(const QuadPencil& p);
std::vector<cplx> companion_eigenvalues(const QuadPencil& p);

/// Roots of det(L0 + z L1 + z^2), from the interpolated characteristic polynomial.
std::vector<cplx> determinant_roots(const QuadPencil& p);

/// Random pencil with entries of L0 = B B^T + n I and L1 symmetric, reproducible from the seed.
QuadPencil random_pencil(int n, std::uint64_t seed);

inline constexpr int kMaxDerivativeOrder = 8;

/// -(1/k!) Tr d^k/dz^k [L(z)^{-1} L'(z)] from the exact derivative recurrences.
cplx trace_rhs(const QuadPencil& p, cplx z, int k);

/// |Tr (A - z)^{-k-1} - rhs| / (1 + |lhs|) with the left side by direct inversion.
double trace_identity_residual(const QuadPencil& p, cplx z, int k);

/// Same with the left side as sum_lambda (lambda - z)^{-k-1} over companion eigenvalues.
double lidskii_residual(const QuadPencil& p, cplx z, int k);

// ---------------------------------------------------------------------------
// One-dimensional discretisation.

/// Dirichlet finite differences on n interior points of [-X, X]:
/// L0 = -D^2 + P^2 + g x^{m-1} (the last term only for the (m, g) family), L1 = -2 P.
QuadPencil discretize_1d(const MultiPoly& p, double X, int n);
/// The family L_{m,g}(lambda) = -D^2 + (x^m - lambda)^2 + g x^{m-1}.
QuadPencil discretize_lmg(int m, double g, double X, int n);

/// Eigenvalues of smallest modulus by shift-invert Arnoldi about sigma = 0.
/// Only Ritz pairs with relative residual below 1e-8 are returned.
std::vector<cplx> smallest_eigenvalues(const QuadPencil& p, int count, int krylov = 0);

struct EigenPath {
  cplx value;                    ///< on the finest level
  std::vector<cplx> history;     ///< one entry per level
  double max_step = 0.0;         ///< max |lambda_{l+1} - lambda_l| / max(1, |lambda|)
  bool converged = false;
};

struct RefinementStudy {
  std::vector<std::pair<double, int>> levels;  ///< (X, n)
  std::vector<EigenPath> paths;
  double tol = 1e-3;
  int n_converged() const;
  std::vector<cplx> converged() const;
};

using PencilBuilder = std::function<QuadPencil(double X, int n)>;

/// Level l uses X_l = X (1 + l/2) and n_l = n 2^l (1 + l/2), so the box grows while
/// the mesh width halves. Eigenvalues of the coarsest level are followed by nearest
/// match; a path is converged when every step is below tol.
RefinementStudy refinement_study(const PencilBuilder& build, double X, int n, int levels = 3, int count = 24,
                                 double tol = 1e-3);

struct LocationViolation {
  cplx value;
  std::string reason;
};

/// Re lambda < -tol or |Im lambda| < tol with tol = rel * |lambda|.
std::vector<LocationViolation> location_check(const std::vector<cplx>& eigenvalues, double rel = 1e-6);

struct CountingProfile {
  std::map<double, int> counts;  ///< R -> N(R)
  double slope = 0.0;            ///< least-squares slope of log N vs log R where 0 < N < total
  int total = 0;
  bool saturated = false;        ///< the largest R already counts every eigenvalue
};

CountingProfile counting_profile(const std::vector<cplx>& eigenvalues, const std::vector<double>& radii);

nlohmann::json to_json(const RefinementStudy& s);
nlohmann::json to_json(const CountingProfile& c);

}  // namespace qtrace::qepver
