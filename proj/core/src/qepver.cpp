#include "qtrace/qepver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/Polynomials>

namespace qtrace::qepver {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

void check_order(int k) {
  if (k < 1 || k > kMaxDerivativeOrder)
    throw std::invalid_argument("derivative order must lie in 1.." + std::to_string(kMaxDerivativeOrder));
}

void check_not_eigenvalue(const QuadPencil& p, cplx z) {
  for (cplx l : companion_eigenvalues(p))
    if (std::abs(l - z) < 1e-8) throw std::domain_error("z lies within 1e-8 of an eigenvalue");
}

}  // namespace

QuadPencil::QuadPencil(Eigen::MatrixXd L0, Eigen::MatrixXd L1) : L0_(std::move(L0)), L1_(std::move(L1)) {
  const auto n = L0_.rows();
  if (n < 1 || L0_.cols() != n || L1_.rows() != n || L1_.cols() != n)
    throw std::invalid_argument("pencil blocks must be square of equal size");
  const double s0 = std::max(1.0, L0_.cwiseAbs().maxCoeff()), s1 = std::max(1.0, L1_.cwiseAbs().maxCoeff());
  if ((L0_ - L0_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * s0) throw std::invalid_argument("L0 is not symmetric");
  if ((L1_ - L1_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * s1) throw std::invalid_argument("L1 is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(L0_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("L0 is not positive definite");
}

Eigen::MatrixXcd QuadPencil::at(cplx z) const {
  Eigen::MatrixXcd m = L0_.cast<cplx>() + z * L1_.cast<cplx>();
  m.diagonal().array() += z * z;
  return m;
}

Eigen::MatrixXd companion(const QuadPencil& p) {
  const int n = p.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -p.L0();
  a.bottomRightCorner(n, n) = -p.L1();
  return a;
}

std::vector<cplx> companion_eigenvalues(const QuadPencil& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion(p), false);
  if (es.info() != Eigen::Success) throw std::runtime_error("companion eigensolver failed");
  std::vector<cplx> out(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::vector<cplx> determinant_roots(const QuadPencil& p) {
  const int n = p.size(), deg = 2 * n, N = deg + 1;
  // scale z = rho w so the coefficients stay balanced
  const double rho = std::sqrt(std::max(1.0, p.L0().norm() / std::sqrt(static_cast<double>(n))));
  std::vector<cplx> vals(N);
  for (int j = 0; j < N; ++j) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / N);
    vals[j] = p.at(rho * w).determinant();
  }
  Eigen::VectorXcd coef(N);
  for (int k = 0; k < N; ++k) {
    cplx c = 0.0;
    for (int j = 0; j < N; ++j) c += vals[j] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / N);
    coef[k] = c / static_cast<double>(N);
  }
  Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(coef);
  std::vector<cplx> out;
  for (int i = 0; i < solver.roots().size(); ++i) out.push_back(rho * solver.roots()[i]);
  return out;
}

QuadPencil random_pencil(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(n, n), c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      b(i, j) = g(gen);
      c(i, j) = g(gen);
    }
  Eigen::MatrixXd l0 = b * b.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd l1 = c + c.transpose();
  return QuadPencil(l0, l1);
}

cplx trace_rhs(const QuadPencil& p, cplx z, int k) {
  check_order(k);
  const int n = p.size();
  const Eigen::MatrixXcd L = p.at(z);
  Eigen::MatrixXcd d1 = p.L1().cast<cplx>();
  d1.diagonal().array() += 2.0 * z;
  const Eigen::MatrixXcd d2 = 2.0 * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(L);
  // M^{(j)} from L M = I: M^{(j)} = -L^{-1} (j L' M^{(j-1)} + C(j,2) L'' M^{(j-2)})
  std::vector<Eigen::MatrixXcd> M{lu.inverse()};
  for (int j = 1; j <= k; ++j) {
    Eigen::MatrixXcd s = j * (d1 * M[j - 1]);
    if (j >= 2) s += binom(j, 2) * (d2 * M[j - 2]);
    M.push_back(-lu.solve(s));
  }
  // d^k (M L') = M^{(k)} L' + k M^{(k-1)} L''
  Eigen::MatrixXcd dk = M[k] * d1 + static_cast<double>(k) * (M[k - 1] * d2);
  return -dk.trace() / factorial(k);
}

double trace_identity_residual(const QuadPencil& p, cplx z, int k) {
  check_order(k);
  check_not_eigenvalue(p, z);
  const int m = 2 * p.size();
  Eigen::MatrixXcd a = companion(p).cast<cplx>();
  a.diagonal().array() -= z;
  const Eigen::MatrixXcd inv = a.partialPivLu().inverse();
  Eigen::MatrixXcd pw = Eigen::MatrixXcd::Identity(m, m);
  for (int i = 0; i <= k; ++i) pw = pw * inv;
  const cplx lhs = pw.trace();
  return std::abs(lhs - trace_rhs(p, z, k)) / (1.0 + std::abs(lhs));
}

double lidskii_residual(const QuadPencil& p, cplx z, int k) {
  check_order(k);
  check_not_eigenvalue(p, z);
  cplx lhs = 0.0;
  for (cplx l : companion_eigenvalues(p)) lhs += std::pow(l - z, -(k + 1));
  return std::abs(lhs - trace_rhs(p, z, k)) / (1.0 + std::abs(lhs));
}

// ---------------------------------------------------------------------------

namespace {

QuadPencil finite_difference(const std::function<double(double)>& pot0, const std::function<double(double)>& pot1,
                             double X, int n) {
  if (n < 16) throw std::invalid_argument("grid needs at least 16 points");
  if (!(X > 0.0)) throw std::invalid_argument("half-width must be positive");
  const double h = 2.0 * X / (n + 1);
  Eigen::MatrixXd l0 = Eigen::MatrixXd::Zero(n, n), l1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double x = -X + (i + 1) * h;
    l0(i, i) = 2.0 / (h * h) + pot0(x);
    if (i + 1 < n) l0(i, i + 1) = l0(i + 1, i) = -1.0 / (h * h);
    l1(i, i) = pot1(x);
  }
  return QuadPencil(l0, l1);
}

}  // namespace

QuadPencil discretize_1d(const MultiPoly& p, double X, int n) {
  if (p.dim() != 1) throw std::invalid_argument("discretize_1d needs a polynomial in one variable");
  auto P = [&](double x) { return p.evaluate(std::span<const double>(&x, 1)); };
  return finite_difference([&](double x) { return P(x) * P(x); }, [&](double x) { return -2.0 * P(x); }, X, n);
}

QuadPencil discretize_lmg(int m, double g, double X, int n) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  return finite_difference([&](double x) { return std::pow(x, 2 * m) + g * std::pow(x, m - 1); },
                           [&](double x) { return -2.0 * std::pow(x, m); }, X, n);
}

std::vector<cplx> smallest_eigenvalues(const QuadPencil& p, int count, int krylov) {
  const int n = p.size(), N = 2 * n;
  int m = krylov > 0 ? krylov : std::max(4 * count, 80);
  m = std::min(m, N);
  const Eigen::LLT<Eigen::MatrixXd> llt(p.L0());
  // A^{-1} [a; b] = [-L0^{-1}(b + L1 a); a]
  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(N);
    const auto a = x.head(n), b = x.tail(n);
    y.head(n) = -llt.solve(b + p.L1() * a);
    y.tail(n) = a;
    return y;
  };
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(N, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd v0(N);
  for (int i = 0; i < N; ++i) v0[i] = 1.0 + 0.1 * std::sin(1.0 + i);
  V.col(0) = v0.normalized();
  int steps = m;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = apply(V.col(j));
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        const double c = V.col(i).dot(w);
        H(i, j) += c;
        w -= c * V.col(i);
      }
    const double nw = w.norm();
    H(j + 1, j) = nw;
    if (nw < 1e-14) {
      steps = j + 1;
      break;
    }
    V.col(j + 1) = w / nw;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(steps, steps).cast<cplx>());
  const double s0 = p.L0().norm(), s1 = p.L1().norm();
  std::vector<cplx> out;
  for (int i = 0; i < steps; ++i) {
    const cplx theta = es.eigenvalues()[i];
    if (std::abs(theta) < 1e-300) continue;
    const cplx lambda = 1.0 / theta;
    const Eigen::VectorXcd y = V.leftCols(steps).cast<cplx>() * es.eigenvectors().col(i);
    const Eigen::VectorXcd u = y.head(n);
    const double un = u.norm();
    if (un == 0.0) continue;
    const Eigen::VectorXcd r = p.L0() * u + lambda * (p.L1() * u) + lambda * lambda * u;
    const double rel = r.norm() / ((s0 + std::abs(lambda) * s1 + std::norm(lambda)) * un);
    if (rel < 1e-8) out.push_back(lambda);
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  if (static_cast<int>(out.size()) > count) out.resize(count);
  return out;
}

int RefinementStudy::n_converged() const {
  return static_cast<int>(std::count_if(paths.begin(), paths.end(), [](const EigenPath& e) { return e.converged; }));
}

std::vector<cplx> RefinementStudy::converged() const {
  std::vector<cplx> out;
  for (const auto& e : paths)
    if (e.converged) out.push_back(e.value);
  return out;
}

RefinementStudy refinement_study(const PencilBuilder& build, double X, int n, int levels, int count, double tol) {
  if (levels < 2) throw std::invalid_argument("refinement needs at least two levels");
  RefinementStudy st;
  st.tol = tol;
  std::vector<std::vector<cplx>> spectra;
  for (int l = 0; l < levels; ++l) {
    const double grow = 1.0 + 0.5 * l;
    const double Xl = X * grow;
    const int nl = static_cast<int>(std::lround(n * std::ldexp(1.0, l) * grow));
    st.levels.emplace_back(Xl, nl);
    spectra.push_back(smallest_eigenvalues(build(Xl, nl), count));
  }
  for (cplx start : spectra[0]) {
    EigenPath path;
    path.history.push_back(start);
    cplx cur = start;
    bool lost = false;
    for (int l = 1; l < levels; ++l) {
      if (spectra[l].empty()) {
        lost = true;
        break;
      }
      const cplx next = *std::min_element(spectra[l].begin(), spectra[l].end(),
                                          [&](cplx a, cplx b) { return std::abs(a - cur) < std::abs(b - cur); });
      path.max_step = std::max(path.max_step, std::abs(next - cur) / std::max(1.0, std::abs(next)));
      path.history.push_back(next);
      cur = next;
    }
    path.value = cur;
    path.converged = !lost && path.max_step < tol;
    st.paths.push_back(path);
  }
  return st;
}

std::vector<LocationViolation> location_check(const std::vector<cplx>& eigenvalues, double rel) {
  std::vector<LocationViolation> out;
  for (cplx l : eigenvalues) {
    const double tol = rel * std::abs(l);
    if (l.real() < -tol) out.push_back({l, "negative real part"});
    if (std::abs(l.imag()) < tol) out.push_back({l, "on the real axis"});
  }
  return out;
}

CountingProfile counting_profile(const std::vector<cplx>& eigenvalues, const std::vector<double>& radii) {
  CountingProfile c;
  c.total = static_cast<int>(eigenvalues.size());
  for (double R : radii)
    c.counts[R] = static_cast<int>(
        std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](cplx l) { return std::abs(l) <= R; }));
  std::vector<std::pair<double, double>> pts;
  for (auto [R, N] : c.counts)
    if (N > 0 && N < c.total) pts.emplace_back(std::log(R), std::log(static_cast<double>(N)));
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    c.slope = sxx > 0 ? sxy / sxx : 0.0;
  }
  c.saturated = !c.counts.empty() && c.counts.rbegin()->second == c.total;
  return c;
}

nlohmann::json to_json(const RefinementStudy& s) {
  nlohmann::json levels = nlohmann::json::array(), paths = nlohmann::json::array();
  for (auto [X, n] : s.levels) levels.push_back({{"X", X}, {"n", n}});
  for (const auto& p : s.paths)
    paths.push_back({{"re", p.value.real()}, {"im", p.value.imag()}, {"max_step", p.max_step},
                     {"converged", p.converged}});
  return {{"levels", levels}, {"tol", s.tol}, {"paths", paths}, {"n_converged", s.n_converged()}};
}

nlohmann::json to_json(const CountingProfile& c) {
  nlohmann::json counts = nlohmann::json::array();
  for (auto [R, N] : c.counts) counts.push_back({{"R", R}, {"N", N}});
  return {{"counts", counts}, {"slope", c.slope}, {"total", c.total}, {"saturated", c.saturated}};
}

}  // namespace qtrace::qepver
