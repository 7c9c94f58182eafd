#include "qtrace/mcint.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "qtrace/contour.hpp"
#include "qtrace/special.hpp"

namespace qtrace::mcint {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double pairwise(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double a : v) s += a;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise(v.subspan(0, h)) + pairwise(v.subspan(h));
}

[[noreturn]] void non_finite(std::span<const double> x) {
  std::ostringstream os;
  os << "non-finite density sample at x = (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw std::runtime_error(os.str());
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t index, std::uint32_t lane) const {
  std::uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ lane);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index, std::uint32_t lane) const {
  return (static_cast<double>(bits(stream, index, lane) >> 11) + 0.5) * 0x1.0p-53;
}

double ball_volume(int d, double radius) {
  return std::pow(std::numbers::pi, 0.5 * d) / special::gamma(0.5 * d + 1.0) * std::pow(radius, d);
}

void ball_point(const CounterRng& rng, int d, double radius, std::uint64_t replicate, std::uint64_t index,
                std::span<double> out) {
  double norm2 = 0.0;
  for (int i = 0; i < d; i += 2) {
    // Box-Muller on lanes (i, i+1)
    const double u1 = rng.uniform(replicate, index, static_cast<std::uint32_t>(i));
    const double u2 = rng.uniform(replicate, index, static_cast<std::uint32_t>(i + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(2.0 * std::numbers::pi * u2);
    norm2 += out[i] * out[i];
    if (i + 1 < d) {
      out[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
      norm2 += out[i + 1] * out[i + 1];
    }
  }
  const double u = rng.uniform(replicate, index, static_cast<std::uint32_t>(d + 1));
  const double scale = radius * std::pow(u, 1.0 / d) / std::sqrt(norm2);
  for (int i = 0; i < d; ++i) out[i] *= scale;
}

std::vector<MCEstimate> mc_integrate_multi(const MultiDensity& density, int n_out, int d, const MCConfig& config) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (n_out < 1) throw std::invalid_argument("need at least one output");
  if (config.n_samples < 1 || config.n_replicates < 1) throw std::invalid_argument("empty Monte Carlo configuration");
  if (!(config.cutoff_radius > 0.0)) throw std::invalid_argument("cutoff radius must be positive");

  const CounterRng rng(config.seed);
  const double volume = ball_volume(d, config.cutoff_radius);
  constexpr std::int64_t kBlock = 4096;
  const std::size_t m = static_cast<std::size_t>(n_out);

  // means[r * m + o]
  std::vector<double> means(config.n_replicates * m, 0.0);
  auto replicate = [&](int r) {
    std::vector<double> x(d), out(m);
    std::vector<std::vector<double>> blocks(m), buf(m);
    for (std::int64_t start = 0; start < config.n_samples; start += kBlock) {
      const std::int64_t end = std::min(config.n_samples, start + kBlock);
      for (auto& b : buf) b.clear();
      for (std::int64_t i = start; i < end; ++i) {
        ball_point(rng, d, config.cutoff_radius, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i), x);
        density(x, out);
        for (std::size_t o = 0; o < m; ++o) {
          if (!std::isfinite(out[o])) non_finite(x);
          buf[o].push_back(out[o]);
        }
      }
      for (std::size_t o = 0; o < m; ++o) blocks[o].push_back(pairwise(buf[o]));
    }
    for (std::size_t o = 0; o < m; ++o)
      means[r * m + o] = volume * pairwise(blocks[o]) / static_cast<double>(config.n_samples);
  };

  int workers = config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.n_replicates);
  if (workers == 1) {
    for (int r = 0; r < config.n_replicates; ++r) replicate(r);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (int r = w; r < config.n_replicates; r += workers) replicate(r);
      }));
    for (auto& j : jobs) j.get();
  }

  std::vector<MCEstimate> res(m);
  for (std::size_t o = 0; o < m; ++o) {
    MCEstimate& est = res[o];
    est.config = config;
    for (int r = 0; r < config.n_replicates; ++r) est.replicates.push_back(means[r * m + o]);
    est.mean = pairwise(est.replicates) / config.n_replicates;
    if (config.n_replicates > 1) {
      double ss = 0.0;
      for (double v : est.replicates) ss += (v - est.mean) * (v - est.mean);
      est.stderr_ = std::sqrt(ss / (config.n_replicates - 1) / config.n_replicates);
    }
    est.tail_bound = config.tail_tol;
  }
  return res;
}

MCEstimate mc_integrate(const Density& density, int d, const MCConfig& config) {
  auto multi = [&](std::span<const double> x, std::span<double> out) { out[0] = density(x); };
  return mc_integrate_multi(multi, 1, d, config)[0];
}

namespace {

struct AxisRule {
  std::vector<double> x, w;
};

AxisRule composite(double a, double b, int n) {
  const int panels = (n + 15) / 16;
  const int per = (n + panels - 1) / panels;
  const auto& g = contour::gauss_legendre(per);
  AxisRule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, c = lo + 0.5 * h;
    for (int i = 0; i < per; ++i) {
      r.x.push_back(c + 0.5 * h * g.nodes[i]);
      r.w.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

double tensor(const Density& density, int d, const AxisRule& rule) {
  const std::size_t n = rule.x.size();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  std::vector<double> partial;
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      x[i] = rule.x[idx[i]];
      w *= rule.w[idx[i]];
    }
    const double v = density(x);
    if (!std::isfinite(v)) non_finite(x);
    total += w * v;
    int k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  return total;
}

}  // namespace

TensorResult tensor_quadrature(const Density& density, int d, double half_width, int nodes_per_axis) {
  if (d < 1 || d > 5) throw std::invalid_argument("tensor quadrature is limited to d <= 5");
  if (nodes_per_axis < 1 || !(half_width > 0.0)) throw std::invalid_argument("bad tensor grid");
  TensorResult r;
  r.nodes_per_axis = nodes_per_axis;
  r.coarse = tensor(density, d, composite(-half_width, half_width, nodes_per_axis));
  r.value = tensor(density, d, composite(-half_width, half_width, 2 * nodes_per_axis));
  r.difference = std::abs(r.value - r.coarse);
  return r;
}

double mapped_quadrature(const Density& density, int d, double scale, int panels, int order) {
  if (d < 1 || d > 5) throw std::invalid_argument("tensor quadrature is limited to d <= 5");
  const double h = std::numbers::pi / panels;
  const auto& g = contour::gauss_legendre(order);
  AxisRule rule;
  for (int p = 0; p < panels; ++p) {
    const double c = -0.5 * std::numbers::pi + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      const double th = c + 0.5 * h * g.nodes[i];
      const double sec = 1.0 / std::cos(th);
      rule.x.push_back(scale * std::tan(th));
      rule.w.push_back(0.5 * h * g.weights[i] * scale * sec * sec);
    }
  }
  return tensor(density, d, rule);
}

CutoffReport cutoff_radius(const Density& density, const MultiPoly& p, double tol, double r_start, int n_dirs) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int d = p.dim();
  if (!is_elliptic(p).elliptic) throw std::domain_error("polynomial is not elliptic; the tail is not controlled");
  std::vector<std::vector<double>> dirs;
  for (int i = 1; i <= n_dirs; ++i) dirs.push_back(sphere_direction(d, static_cast<std::uint64_t>(i)));

  std::vector<double> x(d);
  auto shell_sup = [&](double r) {
    double sup = 0.0;
    for (double t : {1.0, 1.25, 1.5, 1.75, 2.0})
      for (const auto& u : dirs) {
        for (int i = 0; i < d; ++i) x[i] = r * t * u[i];
        sup = std::max(sup, std::abs(density(x)));
      }
    return sup;
  };

  // bound[i] for the shell [r_start 2^i, r_start 2^{i+1}]; stop once shells are negligible
  std::vector<std::pair<double, double>> shells;
  double r = r_start;
  for (int i = 0; i < 60; ++i, r *= 2.0) {
    const double b = 2.0 * shell_sup(r) * (ball_volume(d, 2.0 * r) - ball_volume(d, r));
    shells.emplace_back(r, b);
    if (i >= 3 && b < 1e-6 * tol && shells[i - 1].second < 1e-3 * tol) break;
  }
  CutoffReport rep;
  rep.shells = shells;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    double tail = 0.0;
    for (std::size_t k = i; k < shells.size(); ++k) tail += shells[k].second;
    if (tail < tol) {
      rep.radius = shells[i].first;
      rep.tail_bound = tail;
      return rep;
    }
  }
  throw std::runtime_error("tail bound never fell below the tolerance");
}

nlohmann::json to_json(const MCConfig& c) {
  return {{"n_samples", c.n_samples},     {"n_replicates", c.n_replicates}, {"seed", c.seed},
          {"cutoff_radius", c.cutoff_radius}, {"tail_tol", c.tail_tol},       {"events", "samples per replicate"}};
}

nlohmann::json to_json(const MCEstimate& e) {
  return {{"mean", e.mean},           {"stderr", e.stderr_},  {"replicates", e.replicates},
          {"tail_bound", e.tail_bound}, {"config", to_json(e.config)}};
}

}  // namespace qtrace::mcint
