#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qtrace/coeffs.hpp"
#include "qtrace/special.hpp"

namespace qtrace::coeffs {

namespace {

constexpr double kPi = std::numbers::pi;

enum Inv {
  kD4,
  kMixed22,
  kSq2,
  kOffdiag2,
  kLap2,
  kCross22,
  kGrad2Lap,
  kD2Grad2,
  kCrossD2Grad2,
  kHessGrad,
  kGrad4,
  kGradPow4,
  kCrossGrad4,
};

Exponent unit(int d, int i, int power) {
  Exponent e(d, 0);
  e[i] = power;
  return e;
}

std::vector<Exponent> invariant_gammas(int d) {
  std::vector<Exponent> g;
  g.push_back(Exponent(d, 0));
  for (int i = 0; i < d; ++i) g.push_back(unit(d, i, 1));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Exponent e(d, 0);
      ++e[i];
      ++e[j];
      g.push_back(e);
    }
  for (int i = 0; i < d; ++i) g.push_back(unit(d, i, 4));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Exponent e(d, 0);
      e[i] = 2;
      e[j] = 2;
      g.push_back(e);
    }
  return g;
}

// (k, invariant, coefficient) rows of A_k
using Row = std::tuple<int, int, double>;

std::vector<Row> rows_for(int d, PrintedForm form) {
  if (d != 5 && d != 7) throw std::invalid_argument("printed C_4 formulas exist only for d = 5 and d = 7");
  const double p2 = kPi * kPi, p3 = p2 * kPi, p4 = p3 * kPi;
  if (form == PrintedForm::pi_form) {
    if (d == 5)
      return {{0, kD4, p3 / 24},          {0, kMixed22, -p3 / 48},     {1, kSq2, -11 * p3 / 480},
              {1, kOffdiag2, p2 / 480},   {1, kLap2, -p3 / 160},       {1, kCross22, -p2 / 240},
              {2, kGrad2Lap, p3 / 96},    {2, kD2Grad2, p3 / 160},     {2, kCrossD2Grad2, p2 / 480},
              {2, kHessGrad, p2 / 240},   {3, kGrad4, -p3 / 576},      {3, kGradPow4, -p3 / 960},
              {3, kCrossGrad4, -p3 / 960}};
    return {{0, kD2Grad2, p4 / 120}, {0, kCrossD2Grad2, p3 / 360}, {0, kHessGrad, p3 / 180},
            {1, kGrad4, -p4 / 240},  {1, kGradPow4, -p4 / 240},    {1, kCrossGrad4, -p3 / 240}};
  }
  using special::b_one;
  using special::b_oneone;
  using special::b_plain;
  using special::b_two;
  const double b4 = b_plain(4, d), b5 = b_plain(5, d), b6 = b_plain(6, d), b7 = b_plain(7, d);
  const double b51 = b_one(5, d), b61 = b_one(6, d), b71 = b_one(7, d);
  const double b72 = b_two(7, d), b711 = b_oneone(7, d);
  const double g2 = 14 * b5 - 16 * b6 - b4 + 2 * b51 - 40 * b61 + 32 * b71;
  const double g3 = 24 * b6 - 8 * b5 - 16 * b7;
  if (d == 5) {
    const auto a = special::a_coeffs(5);
    return {{0, kD4, -20 * a.a1},
            {0, kMixed22, -20 * a.a2},
            {1, kSq2, 8 * (a.a1 - b72)},
            {1, kOffdiag2, 4 * (a.a2 - 2 * b71)},
            {1, kLap2, 0.5 * (b4 - 4 * b5 - 2 * b51 + 16 * b61)},
            {1, kCross22, -16 * b711},
            {2, kGrad2Lap, g2 / 4},
            {2, kD2Grad2, 8 * b72},
            {2, kCrossD2Grad2, 8 * b711},
            {2, kHessGrad, 16 * b711},
            {3, kGrad4, g3 / 12},
            {3, kGradPow4, -4.0 / 3.0 * b72},
            {3, kCrossGrad4, -4 * b711}};
  }
  return {{0, kGrad2Lap, g2 / 2},      {0, kD2Grad2, 16 * b72}, {0, kCrossD2Grad2, 16 * b711},
          {0, kHessGrad, 32 * b711},   {1, kGrad4, g3 / 2},     {1, kGradPow4, -8 * b72},
          {1, kCrossGrad4, -24 * b711}};
}

void check_dim(const MultiPoly& p, int d) {
  if (p.dim() != d) throw std::invalid_argument("polynomial dimension does not match d");
}

}  // namespace

InvariantEvaluator::InvariantEvaluator(const MultiPoly& p)
    : d_(p.dim()), table_(p, invariant_gammas(p.dim())) {
  grad_ = 1;
  hess_ = grad_ + d_;
  d4_ = hess_ + d_ * (d_ + 1) / 2;
  d22_ = d4_ + d_;
}

Invariants InvariantEvaluator::operator()(std::span<const double> x) const {
  std::vector<double> v(table_.size());
  table_.evaluate(x, v);
  const int d = d_;
  auto g = [&](int i) { return v[grad_ + i]; };
  auto h = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    // row-major upper triangle offset
    return v[hess_ + i * d - i * (i - 1) / 2 + (j - i)];
  };
  Invariants r{};
  int m = 0;
  double grad2 = 0, lap = 0;
  for (int i = 0; i < d; ++i) {
    r[kD4] += v[d4_ + i];
    grad2 += g(i) * g(i);
    lap += h(i, i);
    r[kSq2] += h(i, i) * h(i, i);
    r[kD2Grad2] += h(i, i) * g(i) * g(i);
    r[kGradPow4] += std::pow(g(i), 4);
    for (int j = i + 1; j < d; ++j) {
      r[kMixed22] += v[d22_ + m++];
      r[kOffdiag2] += 2 * h(i, j) * h(i, j);
      r[kHessGrad] += 2 * h(i, j) * g(i) * g(j);
    }
  }
  r[kLap2] = lap * lap;
  r[kCross22] = lap * lap - r[kSq2];
  r[kGrad2Lap] = grad2 * lap;
  r[kCrossD2Grad2] = lap * grad2 - r[kD2Grad2];
  r[kGrad4] = grad2 * grad2;
  r[kCrossGrad4] = grad2 * grad2 - r[kGradPow4];
  return r;
}

std::map<std::string, double> printed_coefficients(int d, PrintedForm form) {
  std::map<std::string, double> out;
  for (const auto& [k, inv, c] : rows_for(d, form))
    out["A" + std::to_string(k) + ":" + kInvariantNames[inv]] = c;
  return out;
}

PrintedDensity::PrintedDensity(int d, const MultiPoly& p, const InversePowerF& f, PrintedForm form)
    : d_(d), p_(p), f_(f), inv_(p) {
  check_dim(p, d);
  for (const auto& [k, inv, c] : rows_for(d, form)) rows_[k].emplace_back(inv, c);
}

std::array<double, 4> PrintedDensity::parts(std::span<const double> x) const {
  const Invariants iv = inv_(x);
  const double s = p_.evaluate(x);
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    if (rows_[k].empty()) continue;
    double a = 0;
    for (const auto& [inv, c] : rows_[k]) a += c * iv[inv];
    out[k] = a * f_.deriv_real(k, s);
  }
  return out;
}

double PrintedDensity::operator()(std::span<const double> x) const {
  const auto pr = parts(x);
  return pr[0] + pr[1] + pr[2] + pr[3];
}

DensityReport c4_density_printed(int d, const MultiPoly& p, const InversePowerF& f, std::span<const double> x,
                                 PrintedForm form) {
  const PrintedDensity pd(d, p, f, form);
  const auto pr = pd.parts(x);
  static const char* labels[4] = {"A0 f", "A1 f'", "A2 f''", "A3 f'''"};
  DensityReport r;
  r.x.assign(x.begin(), x.end());
  const int kmax = d == 5 ? 4 : 2;
  for (int k = 0; k < kmax; ++k) {
    r.parts[labels[k]] = pr[k];
    r.value += pr[k];
  }
  return r;
}

}  // namespace qtrace::coeffs
