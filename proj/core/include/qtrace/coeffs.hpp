#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qtrace/mcint.hpp"
#include "qtrace/polynomial.hpp"
#include "qtrace/symcalc.hpp"
#include "qtrace/testfun.hpp"

namespace qtrace::coeffs {

/// Throws std::invalid_argument naming the threshold d(m+1)/m unless mu exceeds it.
void check_admissible(const InversePowerF& f, const MultiPoly& p);

enum class Method { closed_form, pipeline, monte_carlo, tensor_quadrature, radial_quadrature };
std::string to_string(Method m);

struct CoeffResult {
  int j = 0;
  int d = 0;
  double value = 0.0;
  double stderr_ = 0.0;
  Method method = Method::closed_form;
  double abs_scale = 0.0;  ///< x-integral of the absolute integrand, when available
  double quad_error = 0.0; ///< refinement difference for deterministic rules
  double cutoff_radius = 0.0;
  std::string route;
};

struct DensityReport {
  std::vector<double> x;
  double value = 0.0;
  std::map<std::string, double> parts;
};

// ---------------------------------------------------------------------------
// Radial integrals R_{k,nu,q}(v) = \int_0^inf u^{q+d/2-1} J_{k,nu}(f, u, v) du.
//
// For f = (s+t)^{-mu}, R(v) = (v+t)^{2q+d+nu-1-mu-2k} rho_{k,nu,q}, so one
// quadrature per (k, nu, q, d, mu) serves every x.

struct RadialValue {
  double value;
  double abs_value;  ///< \int |u^{..} J| du
};

RadialValue radial_rho(int k, int nu, int q, int d, double mu);
/// Direct quadrature at a given v without the scaling shortcut (oracle).
RadialValue radial_direct(int k, int nu, int q, int d, const InversePowerF& f, double v);

// ---------------------------------------------------------------------------
// Pipeline: trace integrand -2 (P - z) K_{2j}, xi-integration, residues.

struct RadialKey {
  int k;
  int nu;
  int q;
  auto operator<=>(const RadialKey&) const = default;
};

/// A closed P-derivative contraction with its radial weights after the xi-integral.
/// The weight of R_{k,nu,q} is `weights[key] * prefactor()`.
struct XTerm {
  symcalc::GenericTerm graph;  ///< nodes only, canonical labels, coef unused
  std::map<RadialKey, Rational> weights;
};

class TraceDensity {
public:
  TraceDensity(const symcalc::GenericSymbol& k2j, int d);
  int dim() const { return d_; }
  int order() const { return j_; }
  const std::vector<XTerm>& terms() const { return terms_; }
  /// pi^{d/2} / Gamma(d/2), half the area of the unit sphere.
  double prefactor() const { return prefactor_; }

private:
  int d_;
  int j_;
  double prefactor_;
  std::vector<XTerm> terms_;
};

/// TraceDensity bound to a polynomial and a test function, flattened into
/// monomials of derivative values for fast evaluation.
class CompiledDensity {
public:
  CompiledDensity(const TraceDensity& td, const MultiPoly& p, const InversePowerF& f);

  double operator()(std::span<const double> x) const;
  /// Upper envelope \sum |term| using the absolute radial integrals.
  double abs_density(std::span<const double> x) const;
  /// Contributions grouped by the f-derivative order n (part ~ f^{(n)}(P(x))).
  DensityReport report(std::span<const double> x) const;
  /// Order-n parts in the order of orders().
  void parts(std::span<const double> x, std::span<double> out) const;
  std::vector<int> orders() const { return orders_; }
  std::size_t monomial_count() const { return monos_.size(); }

private:
  double eval(std::span<const double> x, bool absolute, std::vector<double>* parts) const;

  int d_;
  MultiPoly p_;
  double t_, mu_, scale_;
  DerivativeTable table_;
  std::vector<int> orders_;  ///< distinct n
  struct Mono {
    std::vector<int> factors;         ///< indices into the derivative table
    std::vector<double> coef;         ///< per order slot, radial value folded in
    std::vector<double> abs_coef;
  };
  std::vector<Mono> monos_;
};

/// Builds (and caches) the trace density for order j in dimension d.
const TraceDensity& trace_density(int j, int d, symcalc::Convention conv = symcalc::Convention::printed);

DensityReport density_from_symbols(int j, int d, const MultiPoly& p, const InversePowerF& f,
                                   std::span<const double> x);

/// Independent density from the concrete-d symbol with sphere moments (oracle).
double density_concrete(const symcalc::ParamSymbol& k2j, const MultiPoly& p, const InversePowerF& f,
                        std::span<const double> x);

// ---------------------------------------------------------------------------
// Printed closed forms.

/// C_2 densities for d = 1: -(1/16) f'''(P) P'^2; d = 3: -(1/(48 pi)) f'(P) |grad P|^2.
/// These are integrated against dx (no (2 pi)^{-d}) to give C_2.
double c2_closed_density(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x);

/// 2 (-1)^{d/2} \int f(P(x) + |eta|) d eta, the C_0 density for even d.
double c0_even_density(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x);

enum class PrintedForm { pi_form, b_form };

/// Named derivative invariants appearing in the printed A_k.
inline constexpr std::array<const char*, 13> kInvariantNames = {
    "sum_j d_j^4 P",
    "sum_{j<k} d_j^2 d_k^2 P",
    "sum_j (d_j^2 P)^2",
    "sum_{j!=k} (d_jk P)^2",
    "(Lap P)^2",
    "sum_{j!=k} d_j^2 P d_k^2 P",
    "|grad P|^2 Lap P",
    "sum_j d_j^2 P (d_j P)^2",
    "sum_{j!=k} d_j^2 P (d_k P)^2",
    "sum_{j!=k} d_jk P d_j P d_k P",
    "|grad P|^4",
    "sum_j (d_j P)^4",
    "sum_{j!=k} (d_j P)^2 (d_k P)^2",
};
using Invariants = std::array<double, 13>;

class InvariantEvaluator {
public:
  explicit InvariantEvaluator(const MultiPoly& p);
  Invariants operator()(std::span<const double> x) const;

private:
  int d_;
  DerivativeTable table_;
  int grad_, hess_, d4_, d22_;  // offsets into the table
};

/// Coefficient of every named invariant in A_k, keyed "A<k>:<invariant>".
std::map<std::string, double> printed_coefficients(int d, PrintedForm form);

/// The printed C_4 density for d in {5, 7}; parts "A0 f", "A1 f'", ...
DensityReport c4_density_printed(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x,
                                 PrintedForm form = PrintedForm::pi_form);

/// Compiled evaluator for the printed density (used by the integrators).
class PrintedDensity {
public:
  PrintedDensity(int d, const MultiPoly& p, const InversePowerF& f, PrintedForm form = PrintedForm::pi_form);
  double operator()(std::span<const double> x) const;
  /// A_k(x) f^{(k)}(P(x)) for k = 0..3 (zeros beyond the printed range).
  std::array<double, 4> parts(std::span<const double> x) const;

private:
  int d_;
  MultiPoly p_;
  InversePowerF f_;
  InvariantEvaluator inv_;
  std::array<std::vector<std::pair<int, double>>, 4> rows_;
};

// ---------------------------------------------------------------------------
// Assembled coefficients.

enum class Route { printed, printed_b, pipeline };
std::string to_string(Route r);

struct Integrator {
  /// `radial` needs a rotation-invariant density (P a polynomial in |x|^2)
  /// and integrates along one ray.
  enum class Kind { monte_carlo, tensor, mapped, radial } kind = Kind::mapped;
  mcint::MCConfig mc;            ///< cutoff_radius <= 0 picks it automatically
  int nodes_per_axis = 16;       ///< tensor
  double half_width = 0.0;       ///< tensor box; 0 uses the automatic cutoff
  double scale = 1.0;            ///< mapped
  int panels = 8;                ///< mapped
  int order = 16;                ///< mapped
  double cutoff_tol = 1e-6;
};

/// Integrates a density over R^d with the chosen integrator, times (2 pi)^{-d}.
CoeffResult integrate_density(const mcint::Density& density, const MultiPoly& p, const Integrator& integ,
                              mcint::MCEstimate* mc_out = nullptr);

CoeffResult c0_even(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ);
CoeffResult c0_odd_check(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ);
CoeffResult c2_closed(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ);
CoeffResult c_total(int j, int d, const MultiPoly& p, const InversePowerF& f, Route route, const Integrator& integ);

/// Vanishing check: value and the x-integral of the absolute integrand envelope.
CoeffResult pipeline_with_scale(int j, int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ);

struct ConvexityReport {
  double worst_mixed_margin;     ///< min over samples of 2 sum d_j^4 P - sum_{j<k} d_j^2 d_k^2 P
  double worst_offdiag_margin;   ///< min of 11 pi sum (d_j^2 P)^2 - sum_{j != k} (d_jk P)^2
  double worst_hessian_eig;      ///< min Hessian eigenvalue seen
  bool mixed_ok, offdiag_ok, convex_ok;
  int n_points;
};

/// Samples the d = 5 sufficient conditions (d = 7 checks convexity only) on a
/// deterministic grid of points in the ball of the given radius.
ConvexityReport convexity_conditions(const MultiPoly& p, double radius = 2.0, int n_points = 4000);

// ---------------------------------------------------------------------------
// Dual-route comparison of C_4 for d in {5, 7}.

struct TermDiff {
  std::string term;
  double b_form;
  double pi_form;
  double rel_diff;
  bool agree;
};

struct DualRouteReport {
  int d;
  std::string integrator;
  std::vector<TermDiff> coefficients;        ///< b-form vs pi-form per named invariant
  std::map<std::string, double> printed_parts;    ///< \int A_k f^{(k)} d~x, pi-form
  std::map<std::string, double> printed_b_parts;  ///< same for the b-form
  std::map<std::string, double> pipeline_parts;   ///< \int of the pipeline order-n parts
  double printed_total, printed_b_total, pipeline_total;
  double printed_stderr = 0.0, pipeline_stderr = 0.0;
  double diff_stderr = 0.0;  ///< stderr of (pipeline - printed) from paired samples
  std::vector<std::string> differing;        ///< named terms or routes that disagree
};

DualRouteReport dual_route(int d, const MultiPoly& p, const InversePowerF& f, const Integrator& integ,
                           double tol = 1e-6);

nlohmann::json to_json(const CoeffResult& r);
nlohmann::json to_json(const DensityReport& r);
nlohmann::json to_json(const DualRouteReport& r);

}  // namespace qtrace::coeffs
