#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "qtrace/testfun.hpp"

namespace qtrace::contour {

/// Gauss-Legendre rule on [-1, 1]: nodes ascending, matching weights.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (thread-safe after first use of each n).
const GaussRule& gauss_legendre(int n);

/// Two rays at angles +-theta0 joined by the arc |z| = r0 through arg z = pi.
///
/// The path comes in along the upper ray, sweeps the arc and leaves along the
/// lower ray, so the region to its right (containing the positive axis) is
/// encircled counterclockwise. It is closed at |z| = R_max by an arc through
/// arg z = 0 whose contribution is reported as the tail.
struct ContourSpec {
  double r0 = 0.5;
  double theta0 = 0.75 * std::numbers::pi;
  double R_max = 0.0;  ///< 0 picks the radius from the decay of g
  int n_nodes = 64;
  double tail_tol = 1e-12;
};

struct ContourResult {
  cplx value;            ///< (1/2 pi i) times the closed integral
  double abs_scale;      ///< (1/2 pi) \int |g| |dz|, the size cancellation starts from
  double tail_estimate;  ///< |closing-arc part| / 2 pi
  bool tail_warning;     ///< tail_estimate > tail_tol
  double R_max;
};

ContourResult contour_integrate(const std::function<cplx(cplx)>& g, const ContourSpec& spec = {});

/// (1/2 pi i) \oint (v - z)^nu / (u + (v - z)^2)^{k+1} f(z) dz by quadrature.
ContourResult residue_by_quadrature(int k, int nu, const TestFunction& f, double u, double v,
                                    const ContourSpec& spec = {});

enum class JRoute { automatic, series, direct };

/// Closed form of the residue integral above for the counterclockwise contour.
///
/// J_{0,nu} = -(i^{nu-1}/2) u^{(nu-1)/2} ((-1)^{nu+1} f(v + i sqrt u) + f(v - i sqrt u))
/// and J_{k,nu} = ((-1)^k / k!) d^k/du^k J_{0,nu}. The direct route differentiates
/// through sqrt(u) exactly; the series route sums the Taylor expansion in u and
/// is used automatically when u < (dist to the nearest singularity of f)^2 / 4.
cplx J(int k, int nu, const TestFunction& f, double u, double v, JRoute route = JRoute::automatic);

/// The closed form with the sign as printed (clockwise orientation): -J.
cplx J_printed(int k, int nu, const TestFunction& f, double u, double v);

/// I^k_nu(f)(u, v), identified with J_{k,nu}.
cplx I(int k, int nu, const TestFunction& f, double u, double v);

/// I(k, nu+1, f) - (nu/2k) I(k-1, nu-1, f) + (1/2k) I(k-1, nu, f'); zero by parts in z.
cplx ibp_residual(int k, int nu, const TestFunction& f, double u, double v);

/// (1/2 pi i) \oint dz/(z - 1) on the default contour; 1 for the adopted orientation.
cplx orientation_calibration();

}  // namespace qtrace::contour
