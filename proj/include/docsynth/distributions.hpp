#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "docsynth/rng.hpp"

// Primitive samplers over RngStream. None of these use <random>
// distributions, whose algorithms are implementation-defined and would break
// cross-platform reproducibility.
namespace docsynth::dist {

double normal(RngStream& rng, double mean, double stddev);
double standard_normal(RngStream& rng);
double exponential(RngStream& rng, double mean);
/// Gamma with shape k and scale s (mean k*s). Marsaglia-Tsang.
double gamma(RngStream& rng, double shape, double scale);
double inverse_gamma(RngStream& rng, double shape, double scale);
double beta(RngStream& rng, double a, double b);
bool bernoulli(RngStream& rng, double p);
std::vector<double> dirichlet(RngStream& rng, std::span<const double> alpha);
/// Index drawn with probability proportional to `weights`.
std::size_t categorical(RngStream& rng, std::span<const double> weights);
std::int64_t poisson(RngStream& rng, double rate);
double cauchy(RngStream& rng, double location, double scale);
double uniform(RngStream& rng, double lo, double hi);
std::int64_t uniform_int(RngStream& rng, std::int64_t lo, std::int64_t hi);

/// Cumulative table for repeated categorical draws from a large fixed
/// probability vector (the per-document vocabulary).
class CategoricalTable {
 public:
  CategoricalTable() = default;
  explicit CategoricalTable(std::span<const double> weights);

  std::size_t operator()(RngStream& rng) const;
  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace docsynth::dist
