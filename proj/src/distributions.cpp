#include "docsynth/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace docsynth::dist {

double standard_normal(RngStream& rng) {
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double normal(RngStream& rng, double mean, double stddev) {
  return mean + stddev * standard_normal(rng);
}

double exponential(RngStream& rng, double mean) { return -mean * std::log(rng.uniform_open()); }

double gamma(RngStream& rng, double shape, double scale) {
  if (shape < 1.0) {
    // Boost: G(k) = G(k + 1) * U^(1/k).
    const double g = gamma(rng, shape + 1.0, 1.0);
    return scale * g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double inverse_gamma(RngStream& rng, double shape, double scale) {
  return scale / gamma(rng, shape, 1.0);
}

double beta(RngStream& rng, double a, double b) {
  const double x = gamma(rng, a, 1.0);
  const double y = gamma(rng, b, 1.0);
  const double total = x + y;
  if (!(total > 0.0)) return a / (a + b);  // both draws underflowed
  return x / total;
}

bool bernoulli(RngStream& rng, double p) { return rng.uniform() < p; }

std::vector<double> dirichlet(RngStream& rng, std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma(rng, alpha[k], 1.0);
    total += out[k];
  }
  if (!(total > 0.0)) {
    // Every component underflowed (tiny concentrations): the limit is a
    // vertex of the simplex chosen in proportion to alpha.
    std::fill(out.begin(), out.end(), 0.0);
    out[categorical(rng, alpha)] = 1.0;
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

std::size_t categorical(RngStream& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target < acc) return k;
  }
  // Rounding left target == total; return the last non-zero weight.
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return 0;
}

std::int64_t poisson(RngStream& rng, double rate) {
  if (rate <= 0.0) return 0;
  if (rate < 30.0) {
    // Sequential inversion.
    const double u = rng.uniform();
    double p = std::exp(-rate);
    double cdf = p;
    std::int64_t k = 0;
    while (u >= cdf && k < 10000) {
      ++k;
      p *= rate / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Transformed rejection with squeeze (Hormann, PTRS).
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + rate + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double kd = static_cast<double>(k);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -rate + kd * loglam - std::lgamma(kd + 1.0))
      return k;
  }
}

double cauchy(RngStream& rng, double location, double scale) {
  return location + scale * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
}

double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::int64_t uniform_int(RngStream& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
  if (span == 0) return static_cast<std::int64_t>(rng());
  // Rejection below 2^64 mod span removes the modulo bias.
  const std::uint64_t threshold = (0 - span) % span;
  std::uint64_t r = rng();
  while (r < threshold) r = rng();
  return lo + static_cast<std::int64_t>(r % span);
}

CategoricalTable::CategoricalTable(std::span<const double> weights) : cdf_(weights.size()) {
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    cdf_[k] = acc;
  }
}

std::size_t CategoricalTable::operator()(RngStream& rng) const {
  if (cdf_.empty()) return 0;
  const double target = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace docsynth::dist
