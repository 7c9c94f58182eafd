#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qtrace/polynomial.hpp"

namespace qtrace::mcint {

using Density = std::function<double(std::span<const double>)>;

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, index, lane), so work can be split in any way.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t stream, std::uint64_t index, std::uint32_t lane) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t index, std::uint32_t lane) const;

private:
  std::uint64_t seed_;
};

struct MCConfig {
  std::int64_t n_samples = 1'000'000;  ///< per replicate
  int n_replicates = 20;
  std::uint64_t seed = 20240611;
  double cutoff_radius = 1.0;
  double tail_tol = 1e-6;
  int workers = 0;  ///< 0 uses the hardware concurrency
};

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> replicates;
  double tail_bound = 0.0;
  MCConfig config;
};

/// Plain Monte Carlo over the ball |x| <= cutoff_radius with uniform sampling.
/// Replicates use independent substreams; each replicate mean is a fixed-order
/// pairwise sum, so the result does not depend on the number of workers.
MCEstimate mc_integrate(const Density& density, int d, const MCConfig& config);

/// Several integrands evaluated on the same samples; out has n_out entries.
using MultiDensity = std::function<void(std::span<const double>, std::span<double>)>;
std::vector<MCEstimate> mc_integrate_multi(const MultiDensity& density, int n_out, int d, const MCConfig& config);

/// The point used for sample `index` of replicate `replicate`.
void ball_point(const CounterRng& rng, int d, double radius, std::uint64_t replicate, std::uint64_t index,
                std::span<double> out);

double ball_volume(int d, double radius);

struct TensorResult {
  double value = 0.0;       ///< with 2n nodes per axis
  double coarse = 0.0;      ///< with n nodes per axis
  double difference = 0.0;  ///< |value - coarse|
  int nodes_per_axis = 0;
};

/// Gauss-Legendre tensor grid on [-h, h]^d with n and 2n nodes per axis.
/// Refuses d > 5.
TensorResult tensor_quadrature(const Density& density, int d, double half_width, int nodes_per_axis);

/// Tensor rule on all of R^d through x = scale * tan(theta) per axis, with
/// `panels` Gauss-Legendre panels of `order` nodes on (-pi/2, pi/2).
double mapped_quadrature(const Density& density, int d, double scale, int panels = 8, int order = 16);

struct CutoffReport {
  double radius = 0.0;
  double tail_bound = 0.0;
  std::vector<std::pair<double, double>> shells;  ///< (inner radius, bound on that shell)
};

/// Smallest dyadic radius R >= r_start whose sampled tail bound is below tol.
///
/// The shell [r, 2r] contributes (sup of |density| over sampled points in the
/// shell) times its volume. Directions are the Halton set used by the
/// ellipticity check, whose failure makes the tail uncontrolled and is an error.
CutoffReport cutoff_radius(const Density& density, const MultiPoly& p, double tol, double r_start = 0.5,
                           int n_dirs = 256);

nlohmann::json to_json(const MCConfig& c);
nlohmann::json to_json(const MCEstimate& e);

}  // namespace qtrace::mcint
