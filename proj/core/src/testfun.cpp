#include "qtrace/testfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtrace {

cplx TestFunction::taylor(int q, cplx s) const {
  double fact = 1.0;
  for (int i = 2; i <= q; ++i) fact *= i;
  return deriv(q, s) / fact;
}

InversePowerF::InversePowerF(double t, double mu) : t_(t), mu_(mu) {
  if (!(t > 0.0)) throw std::invalid_argument("test function needs t > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("test function needs mu > 0");
  integer_mu_ = mu == std::floor(mu);
}

cplx InversePowerF::deriv(int k, cplx s) const {
  if (k < 0) throw std::invalid_argument("negative derivative order");
  const cplx w = s + t_;
  if (w == cplx(0.0, 0.0)) throw std::domain_error("test function pole at s = -t");
  double poch = scale_;
  for (int i = 0; i < k; ++i) poch *= -(mu_ + i);
  if (integer_mu_) {
    const int n = static_cast<int>(mu_) + k;
    // w^{-n} by binary powering
    cplx base = 1.0 / w, r = 1.0;
    for (int e = n; e > 0; e >>= 1) {
      if (e & 1) r *= base;
      base *= base;
    }
    return poch * r;
  }
  if (w.imag() == 0.0 && w.real() < 0.0) throw std::domain_error("test function evaluated on its branch cut");
  return poch * std::pow(w, -(mu_ + k));
}

cplx InversePowerF::taylor(int q, cplx s) const {
  if (q < 0) throw std::invalid_argument("negative derivative order");
  const cplx w = s + t_;
  if (w == cplx(0.0, 0.0)) throw std::domain_error("test function pole at s = -t");
  cplx r = deriv(0, s);
  const cplx inv = 1.0 / w;
  for (int i = 0; i < q; ++i) r *= -(mu_ + i) / (i + 1.0) * inv;
  return r;
}

InversePowerF InversePowerF::scaled(double factor) const {
  InversePowerF r = *this;
  r.scale_ *= factor;
  return r;
}

double decay_threshold(int d, int m) { return static_cast<double>(d) * (m + 1) / m; }

double default_mu(int d, int m) { return std::floor(decay_threshold(d, m)) + 1.0; }

bool decay_admissible(const InversePowerF& f, int d, int m) {
  if (d < 1 || m < 2) throw std::invalid_argument("admissibility needs d >= 1, m >= 2");
  return f.mu() > decay_threshold(d, m);
}

bool in_sector(cplx z, const SectorSpec& sector) {
  if (std::abs(z) < sector.r0) return false;
  double arg = std::arg(z);  // (-pi, pi]
  if (arg < 0) arg += 2.0 * std::numbers::pi;
  return arg > std::numbers::pi / 2 + sector.delta && arg < 3.0 * std::numbers::pi / 2 - sector.delta;
}

}  // namespace qtrace
