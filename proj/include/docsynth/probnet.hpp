#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "docsynth/rng.hpp"

namespace docsynth {

enum class Family {
  DirichletCategorical,
  BetaBernoulli,
  NormalWithNormalInvGammaPrior,
  ShiftedExponentialWithGammaScale,
  Poisson,
  TruncatedCauchy,
  UniformContinuous,
  UniformDiscrete,
};

std::string_view to_string(Family family) noexcept;
std::optional<Family> family_from_string(std::string_view name) noexcept;

// Hyperparameter records, one per family. Field names follow the JSON keys
// used in template files.

struct DirichletParams {
  std::vector<double> alpha;
  bool operator==(const DirichletParams&) const = default;
};

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
  bool operator==(const BetaParams&) const = default;
};

/// mean ~ N(mu0, var0), variance ~ InvGamma(a0, b0), value ~ N(mean, variance).
struct NormalParams {
  double mu0 = 0.0;
  double var0 = 1.0;
  double a0 = 2.0;
  double b0 = 1.0;
  bool operator==(const NormalParams&) const = default;
};

/// value = theta + Exp(mean excess lambda).
///
/// The exponential rate 1/lambda carries a Gamma(shape, rate = scale) prior,
/// so lambda itself is InvGamma(shape, scale): `scale` acts as a scale on the
/// sampled value (doubling it doubles the mean excess) and the posterior
/// update is additive in both parameters.
struct ShiftedExpParams {
  double theta = 0.0;
  double shape = 2.0;
  double scale = 1.0;
  bool operator==(const ShiftedExpParams&) const = default;
};

struct PoissonParams {
  double rate = 1.0;
  bool operator==(const PoissonParams&) const = default;
};

/// Truncation bounds live in Support and are mandatory for this family.
struct CauchyParams {
  double mu = 0.0;
  double gamma = 1.0;
  bool operator==(const CauchyParams&) const = default;
};

struct UniformParams {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const UniformParams&) const = default;
};

struct UniformDiscreteParams {
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  bool operator==(const UniformDiscreteParams&) const = default;
};

using Hyperparams = std::variant<DirichletParams, BetaParams, NormalParams, ShiftedExpParams,
                                 PoissonParams, CauchyParams, UniformParams, UniformDiscreteParams>;

struct Support {
  std::optional<double> min;
  std::optional<double> max;
  /// Round draws to the nearest integer before clamping.
  bool integer = false;
  bool operator==(const Support&) const = default;
};

struct DistributionSpec {
  Hyperparams params;
  Support support;
  /// Informational unit tag from the template file ("pt", "px", "fraction", ...).
  std::string unit;

  Family family() const noexcept { return static_cast<Family>(params.index()); }

  /// Throws InvalidHyperparam naming `id` and the offending field.
  void validate(std::string_view id) const;

  bool operator==(const DistributionSpec&) const = default;
};

nlohmann::ordered_json to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const nlohmann::json& j, std::string_view id);

struct NodeRef {
  std::string id;
  std::vector<std::string> parent_ids;
  DistributionSpec spec;
};

using NodeHandle = std::size_t;

/// Directed acyclic graph of network nodes. Immutable once built; sampling and
/// inference only read it.
class Registry {
 public:
  /// Parents must already be registered.
  NodeHandle register_node(NodeRef node);

  /// Builds from nodes in arbitrary order; reports UnknownParent or
  /// CycleDetected for the whole set.
  static Registry build(std::vector<NodeRef> nodes);

  bool contains(std::string_view id) const;
  const NodeRef& node(std::string_view id) const;
  const NodeRef& node(NodeHandle handle) const { return nodes_.at(handle); }
  NodeHandle handle(std::string_view id) const;
  std::span<const NodeRef> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  std::vector<NodeRef> nodes_;
  std::unordered_map<std::string, NodeHandle> index_;
};

/// Per-template hyperparameter table: node id -> distribution with the
/// template's hyperparameter values.
using ParamTable = std::map<std::string, DistributionSpec, std::less<>>;

/// Intermediate parameters realized in the first stage of a two-stage draw.
/// Layout per family:
///   Dirichlet   -> category probabilities
///   Beta        -> {p}
///   Normal      -> {mean, variance}
///   ShiftedExp  -> {mean excess}
///   others      -> {}
struct Realized {
  std::vector<double> params;
  bool operator==(const Realized&) const = default;
};

struct Sample {
  double value = 0.0;
  Realized realized;

  std::size_t index() const noexcept { return static_cast<std::size_t>(value); }
  bool flag() const noexcept { return value != 0.0; }
};

/// First stage: draw the conditional's parameters from their priors.
Realized realize(const DistributionSpec& spec, RngStream& rng);
/// Second stage: draw an observed value given realized parameters. Support
/// bounds are enforced with up to 100 rejection attempts, then clamping.
double draw_value(const DistributionSpec& spec, const Realized& realized, RngStream& rng);
/// Both stages.
Sample sample(const DistributionSpec& spec, RngStream& rng);

/// Looks the node up in `params` (MissingTemplateParam if absent) and checks
/// the family against the registry before sampling.
Sample sample_hierarchical(const Registry& registry, std::string_view node_id,
                           const ParamTable& params, RngStream& rng);

// Closed-form conjugate updates.

std::vector<double> posterior_update_dirichlet(std::span<const double> alpha0,
                                               std::span<const std::int64_t> counts);

BetaParams posterior_update_beta(double a0, double b0, std::int64_t successes,
                                 std::int64_t failures);

ShiftedExpParams posterior_update_gamma_exponential(const ShiftedExpParams& prior,
                                                    std::span<const double> observations);

/// One fixed-point sweep: the mean is updated with the variance held at its
/// prior expectation, then the variance is updated from residuals about the
/// new mean.
NormalParams posterior_update_normal(const NormalParams& prior,
                                     std::span<const double> observations);

struct ObservationSet {
  std::string node_id;
  /// Category indices for Dirichlet nodes, 0/1 for Beta nodes, raw values
  /// otherwise.
  std::vector<double> values;
};

/// Applies the conjugate update of every observed node. Nodes without
/// observations keep their parameters; the input table is not modified.
ParamTable posterior_infer(std::span<const ObservationSet> dataset, const Registry& registry,
                           const ParamTable& params);

/// Reads line-delimited JSON records {"node_id", "value"} or
/// {"node_id", "category_index"}; records of one node are merged in file order.
std::vector<ObservationSet> load_observations(const std::filesystem::path& path);
std::vector<ObservationSet> parse_observations(std::istream& in, std::string_view source);

}  // namespace docsynth
