#pragma once

#include <complex>
#include <memory>

namespace qtrace {

using cplx = std::complex<double>;

/// Holomorphic test function: value and k-th derivative at complex points.
class TestFunction {
public:
  virtual ~TestFunction() = default;
  virtual cplx deriv(int k, cplx s) const = 0;
  cplx operator()(cplx s) const { return deriv(0, s); }
  double deriv_real(int k, double s) const { return deriv(k, cplx(s, 0.0)).real(); }
  /// f^{(q)}(s) / q!
  virtual cplx taylor(int q, cplx s) const;
  /// Distance from s to the nearest singularity (radius of the Taylor series).
  virtual double singularity_distance(cplx s) const = 0;
};

/// g = f^{(order)} for a borrowed f.
class DerivativeOf final : public TestFunction {
public:
  DerivativeOf(const TestFunction& f, int order) : f_(f), order_(order) {}
  cplx deriv(int k, cplx s) const override { return f_.deriv(k + order_, s); }
  double singularity_distance(cplx s) const override { return f_.singularity_distance(s); }

private:
  const TestFunction& f_;
  int order_;
};

/// f(s) = (s + t)^{-mu}, t > 0, mu > 0.
///
/// For integer mu the power is formed by repeated multiplication, so there is
/// no branch cut and only the pole at s = -t. Non-integer mu uses the
/// principal branch with the cut along (-inf, -t].
class InversePowerF final : public TestFunction {
public:
  InversePowerF(double t, double mu);

  double t() const { return t_; }
  double mu() const { return mu_; }
  bool integer_mu() const { return integer_mu_; }

  /// (-1)^k mu (mu+1) ... (mu+k-1) (s+t)^{-mu-k}
  cplx deriv(int k, cplx s) const override;
  /// Binomial-series coefficient (mu)_q / q! (-1)^q (s+t)^{-mu-q}, no factorial overflow.
  cplx taylor(int q, cplx s) const override;
  double singularity_distance(cplx s) const override { return std::abs(s + t_); }

  /// Multiplies the function by a constant. Every coefficient is linear in f.
  InversePowerF scaled(double factor) const;
  double scale() const { return scale_; }

private:
  double t_;
  double mu_;
  double scale_ = 1.0;
  bool integer_mu_;
};

/// Default exponent floor(d(m+1)/m) + 1.
double default_mu(int d, int m);

/// True iff mu > d(m+1)/m, the trace-class threshold.
bool decay_admissible(const InversePowerF& f, int d, int m);
double decay_threshold(int d, int m);

/// Lambda = {|z| >= r0, pi/2 + delta < arg z < 3pi/2 - delta}.
struct SectorSpec {
  double r0;
  double delta;
};

bool in_sector(cplx z, const SectorSpec& sector);

}  // namespace qtrace
