#include "docsynth/probnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "docsynth/distributions.hpp"
#include "docsynth/error.hpp"

namespace docsynth {
namespace {

constexpr int kRejectionAttempts = 100;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void invalid(std::string_view id, std::string_view field, std::string_view why) {
  throw Error(ErrorCode::InvalidHyperparam,
              std::string(id) + "." + std::string(field) + " " + std::string(why));
}

void require_positive(std::string_view id, std::string_view field, double v) {
  if (!std::isfinite(v) || v <= 0.0) invalid(id, field, "must be finite and > 0");
}

void require_finite(std::string_view id, std::string_view field, double v) {
  if (!std::isfinite(v)) invalid(id, field, "must be finite");
}

double round_half_up(double x) { return std::floor(x + 0.5); }

double clamp_to(const Support& s, double x) {
  if (s.min && x < *s.min) x = *s.min;
  if (s.max && x > *s.max) x = *s.max;
  return x;
}

bool inside(const Support& s, double x) {
  return (!s.min || x >= *s.min) && (!s.max || x <= *s.max);
}

template <class Draw>
double bounded(const Support& s, Draw&& draw) {
  double x = draw();
  if (s.integer) return clamp_to(s, round_half_up(x));
  if (!s.min && !s.max) return x;
  for (int attempt = 1; attempt < kRejectionAttempts && !inside(s, x); ++attempt) x = draw();
  return clamp_to(s, x);
}

double number(const nlohmann::json& j, std::string_view key, std::string_view id) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ParseError, std::string(id) + ": missing '" + std::string(key) + "'");
  if (!it->is_number())
    throw Error(ErrorCode::ParseError, std::string(id) + ": '" + std::string(key) + "' is not a number");
  return it->get<double>();
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::DirichletCategorical: return "dirichlet";
    case Family::BetaBernoulli: return "beta_bernoulli";
    case Family::NormalWithNormalInvGammaPrior: return "normal_nig";
    case Family::ShiftedExponentialWithGammaScale: return "shifted_exponential";
    case Family::Poisson: return "poisson";
    case Family::TruncatedCauchy: return "truncated_cauchy";
    case Family::UniformContinuous: return "uniform";
    case Family::UniformDiscrete: return "uniform_discrete";
  }
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view name) noexcept {
  for (int f = 0; f <= static_cast<int>(Family::UniformDiscrete); ++f)
    if (to_string(static_cast<Family>(f)) == name) return static_cast<Family>(f);
  return std::nullopt;
}

void DistributionSpec::validate(std::string_view id) const {
  if (support.min) require_finite(id, "min", *support.min);
  if (support.max) require_finite(id, "max", *support.max);
  if (support.min && support.max && *support.min > *support.max) invalid(id, "min", "exceeds max");

  std::visit(Overloaded{
                 [&](const DirichletParams& p) {
                   if (p.alpha.size() < 2) invalid(id, "alpha", "needs at least 2 categories");
                   for (std::size_t k = 0; k < p.alpha.size(); ++k)
                     require_positive(id, "alpha[" + std::to_string(k) + "]", p.alpha[k]);
                 },
                 [&](const BetaParams& p) {
                   require_positive(id, "a", p.a);
                   require_positive(id, "b", p.b);
                 },
                 [&](const NormalParams& p) {
                   require_finite(id, "mu0", p.mu0);
                   require_positive(id, "var0", p.var0);
                   require_positive(id, "a0", p.a0);
                   require_positive(id, "b0", p.b0);
                 },
                 [&](const ShiftedExpParams& p) {
                   require_finite(id, "theta", p.theta);
                   require_positive(id, "shape", p.shape);
                   require_positive(id, "scale", p.scale);
                 },
                 [&](const PoissonParams& p) { require_positive(id, "rate", p.rate); },
                 [&](const CauchyParams& p) {
                   require_finite(id, "mu", p.mu);
                   require_positive(id, "gamma", p.gamma);
                   if (!support.min || !support.max) invalid(id, "min/max", "truncation bounds are required");
                   if (!(*support.min < *support.max)) invalid(id, "min", "must be < max");
                 },
                 [&](const UniformParams& p) {
                   require_finite(id, "lo", p.lo);
                   require_finite(id, "hi", p.hi);
                   if (!(p.lo < p.hi)) invalid(id, "lo", "must be < hi");
                 },
                 [&](const UniformDiscreteParams& p) {
                   if (p.lo > p.hi) invalid(id, "lo", "must be <= hi");
                 },
             },
             params);
}

nlohmann::ordered_json to_json(const DistributionSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = std::string(to_string(spec.family()));
  std::visit(Overloaded{
                 [&](const DirichletParams& p) { j["alpha"] = p.alpha; },
                 [&](const BetaParams& p) { j["a"] = p.a; j["b"] = p.b; },
                 [&](const NormalParams& p) {
                   j["mu0"] = p.mu0; j["var0"] = p.var0; j["a0"] = p.a0; j["b0"] = p.b0;
                 },
                 [&](const ShiftedExpParams& p) {
                   j["theta"] = p.theta; j["shape"] = p.shape; j["scale"] = p.scale;
                 },
                 [&](const PoissonParams& p) { j["rate"] = p.rate; },
                 [&](const CauchyParams& p) { j["mu"] = p.mu; j["gamma"] = p.gamma; },
                 [&](const UniformParams& p) { j["lo"] = p.lo; j["hi"] = p.hi; },
                 [&](const UniformDiscreteParams& p) { j["lo"] = p.lo; j["hi"] = p.hi; },
             },
             spec.params);
  if (spec.support.min) j["min"] = *spec.support.min;
  if (spec.support.max) j["max"] = *spec.support.max;
  if (spec.support.integer) j["integer"] = true;
  if (!spec.unit.empty()) j["unit"] = spec.unit;
  return j;
}

DistributionSpec spec_from_json(const nlohmann::json& j, std::string_view id) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, std::string(id) + ": expected an object");
  const auto fam_it = j.find("family");
  if (fam_it == j.end() || !fam_it->is_string())
    throw Error(ErrorCode::ParseError, std::string(id) + ": missing 'family'");
  const auto family = family_from_string(fam_it->get<std::string>());
  if (!family)
    throw Error(ErrorCode::ParseError, std::string(id) + ": unknown family '" + fam_it->get<std::string>() + "'");

  DistributionSpec spec;
  switch (*family) {
    case Family::DirichletCategorical: {
      DirichletParams p;
      if (j.contains("alpha")) {
        if (!j["alpha"].is_array()) throw Error(ErrorCode::ParseError, std::string(id) + ": 'alpha' must be an array");
        for (const auto& v : j["alpha"]) {
          if (!v.is_number()) throw Error(ErrorCode::ParseError, std::string(id) + ": non-numeric alpha");
          p.alpha.push_back(v.get<double>());
        }
      } else if (j.contains("symmetric") && j.contains("dim")) {
        p.alpha.assign(static_cast<std::size_t>(number(j, "dim", id)), number(j, "symmetric", id));
      } else {
        throw Error(ErrorCode::ParseError, std::string(id) + ": missing 'alpha'");
      }
      spec.params = std::move(p);
      break;
    }
    case Family::BetaBernoulli:
      spec.params = BetaParams{number(j, "a", id), number(j, "b", id)};
      break;
    case Family::NormalWithNormalInvGammaPrior:
      spec.params = NormalParams{number(j, "mu0", id), number(j, "var0", id), number(j, "a0", id),
                                 number(j, "b0", id)};
      break;
    case Family::ShiftedExponentialWithGammaScale:
      spec.params = ShiftedExpParams{number(j, "theta", id), number(j, "shape", id), number(j, "scale", id)};
      break;
    case Family::Poisson:
      spec.params = PoissonParams{number(j, "rate", id)};
      break;
    case Family::TruncatedCauchy:
      spec.params = CauchyParams{number(j, "mu", id), number(j, "gamma", id)};
      break;
    case Family::UniformContinuous:
      spec.params = UniformParams{number(j, "lo", id), number(j, "hi", id)};
      break;
    case Family::UniformDiscrete:
      spec.params = UniformDiscreteParams{static_cast<std::int64_t>(number(j, "lo", id)),
                                          static_cast<std::int64_t>(number(j, "hi", id))};
      break;
  }
  if (j.contains("min")) spec.support.min = number(j, "min", id);
  if (j.contains("max")) spec.support.max = number(j, "max", id);
  if (j.contains("integer")) spec.support.integer = j["integer"].get<bool>();
  if (j.contains("unit")) spec.unit = j["unit"].get<std::string>();
  return spec;
}

// --- Registry ---------------------------------------------------------------

NodeHandle Registry::register_node(NodeRef node) {
  if (index_.contains(node.id)) throw Error(ErrorCode::DuplicateId, node.id);
  for (const auto& parent : node.parent_ids) {
    if (parent == node.id) throw Error(ErrorCode::CycleDetected, node.id + " -> " + node.id);
    if (!index_.contains(parent))
      throw Error(ErrorCode::UnknownParent, node.id + " references unregistered parent " + parent);
  }
  node.spec.validate(node.id);
  const NodeHandle handle = nodes_.size();
  index_.emplace(node.id, handle);
  nodes_.push_back(std::move(node));
  return handle;
}

Registry Registry::build(std::vector<NodeRef> nodes) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!position.emplace(nodes[i].id, i).second) throw Error(ErrorCode::DuplicateId, nodes[i].id);
  for (const auto& n : nodes)
    for (const auto& parent : n.parent_ids)
      if (!position.contains(parent))
        throw Error(ErrorCode::UnknownParent, n.id + " references unregistered parent " + parent);

  // Depth-first topological order; a grey node reached again closes a cycle.
  enum class Mark { White, Grey, Black };
  std::vector<Mark> mark(nodes.size(), Mark::White);
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (mark[i] == Mark::Black) return;
    if (mark[i] == Mark::Grey) throw Error(ErrorCode::CycleDetected, "cycle through " + nodes[i].id);
    mark[i] = Mark::Grey;
    for (const auto& parent : nodes[i].parent_ids) self(self, position.at(parent));
    mark[i] = Mark::Black;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) visit(visit, i);

  Registry registry;
  for (std::size_t i : order) registry.register_node(std::move(nodes[i]));
  return registry;
}

bool Registry::contains(std::string_view id) const { return index_.contains(std::string(id)); }

NodeHandle Registry::handle(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, std::string(id));
  return it->second;
}

const NodeRef& Registry::node(std::string_view id) const { return nodes_[handle(id)]; }

// --- Sampling ---------------------------------------------------------------

Realized realize(const DistributionSpec& spec, RngStream& rng) {
  return std::visit(
      Overloaded{
          [&](const DirichletParams& p) { return Realized{dist::dirichlet(rng, p.alpha)}; },
          [&](const BetaParams& p) { return Realized{{dist::beta(rng, p.a, p.b)}}; },
          [&](const NormalParams& p) {
            const double mean = dist::normal(rng, p.mu0, std::sqrt(p.var0));
            const double variance = dist::inverse_gamma(rng, p.a0, p.b0);
            return Realized{{mean, variance}};
          },
          [&](const ShiftedExpParams& p) {
            const double rate = dist::gamma(rng, p.shape, 1.0 / p.scale);
            return Realized{{1.0 / rate}};
          },
          [&](const auto&) { return Realized{}; },
      },
      spec.params);
}

double draw_value(const DistributionSpec& spec, const Realized& realized, RngStream& rng) {
  const Support& s = spec.support;
  return std::visit(
      Overloaded{
          [&](const DirichletParams&) {
            return static_cast<double>(dist::categorical(rng, realized.params));
          },
          [&](const BetaParams&) { return dist::bernoulli(rng, realized.params.at(0)) ? 1.0 : 0.0; },
          [&](const NormalParams&) {
            const double mean = realized.params.at(0);
            const double sd = std::sqrt(realized.params.at(1));
            return bounded(s, [&] { return dist::normal(rng, mean, sd); });
          },
          [&](const ShiftedExpParams& p) {
            const double mean_excess = realized.params.at(0);
            return bounded(s, [&] { return p.theta + dist::exponential(rng, mean_excess); });
          },
          [&](const PoissonParams& p) {
            return clamp_to(s, static_cast<double>(dist::poisson(rng, p.rate)));
          },
          [&](const CauchyParams& p) {
            // Truncation is part of the family, so reject even for integer support.
            double x = dist::cauchy(rng, p.mu, p.gamma);
            for (int attempt = 1; attempt < kRejectionAttempts && !inside(s, x); ++attempt)
              x = dist::cauchy(rng, p.mu, p.gamma);
            if (s.integer) x = round_half_up(x);
            return clamp_to(s, x);
          },
          [&](const UniformParams& p) { return bounded(s, [&] { return dist::uniform(rng, p.lo, p.hi); }); },
          [&](const UniformDiscreteParams& p) {
            return clamp_to(s, static_cast<double>(dist::uniform_int(rng, p.lo, p.hi)));
          },
      },
      spec.params);
}

Sample sample(const DistributionSpec& spec, RngStream& rng) {
  Sample out;
  out.realized = realize(spec, rng);
  out.value = draw_value(spec, out.realized, rng);
  return out;
}

Sample sample_hierarchical(const Registry& registry, std::string_view node_id, const ParamTable& params,
                           RngStream& rng) {
  const NodeRef& node = registry.node(node_id);
  const auto it = params.find(node_id);
  if (it == params.end()) throw Error(ErrorCode::MissingTemplateParam, std::string(node_id));
  if (it->second.family() != node.spec.family())
    throw Error(ErrorCode::InvalidHyperparam,
                std::string(node_id) + ": template family " + std::string(to_string(it->second.family())) +
                    " does not match registered family " + std::string(to_string(node.spec.family())));
  return sample(it->second, rng);
}

// --- Conjugate updates --------------------------------------------------------

std::vector<double> posterior_update_dirichlet(std::span<const double> alpha0,
                                               std::span<const std::int64_t> counts) {
  if (alpha0.size() != counts.size())
    throw Error(ErrorCode::DimensionMismatch, "alpha has " + std::to_string(alpha0.size()) +
                                                  " categories, counts has " + std::to_string(counts.size()));
  std::vector<double> out(alpha0.begin(), alpha0.end());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 0) throw Error(ErrorCode::NegativeCount, "counts[" + std::to_string(k) + "]");
    out[k] += static_cast<double>(counts[k]);
  }
  return out;
}

BetaParams posterior_update_beta(double a0, double b0, std::int64_t successes, std::int64_t failures) {
  if (successes < 0) throw Error(ErrorCode::NegativeCount, "successes");
  if (failures < 0) throw Error(ErrorCode::NegativeCount, "failures");
  return {a0 + static_cast<double>(successes), b0 + static_cast<double>(failures)};
}

ShiftedExpParams posterior_update_gamma_exponential(const ShiftedExpParams& prior,
                                                    std::span<const double> observations) {
  // Prior on the exponential rate is Gamma(shape, rate = scale); the
  // likelihood contributes n to the shape and the summed excess to the rate.
  double excess = 0.0;
  for (double x : observations) {
    if (x < prior.theta)
      throw Error(ErrorCode::ObservationBelowLocation,
                  std::to_string(x) + " < theta " + std::to_string(prior.theta));
    excess += x - prior.theta;
  }
  return {prior.theta, prior.shape + static_cast<double>(observations.size()), prior.scale + excess};
}

NormalParams posterior_update_normal(const NormalParams& prior, std::span<const double> observations) {
  if (observations.empty()) return prior;
  const auto n = static_cast<double>(observations.size());
  double sum = 0.0;
  for (double x : observations) sum += x;

  // Expected variance under the InvGamma prior; its mode when the mean is undefined.
  const double variance = prior.a0 > 1.0 ? prior.b0 / (prior.a0 - 1.0) : prior.b0 / (prior.a0 + 1.0);

  NormalParams post;
  const double precision = 1.0 / prior.var0 + n / variance;
  post.var0 = 1.0 / precision;
  post.mu0 = post.var0 * (prior.mu0 / prior.var0 + sum / variance);

  double ss = 0.0;
  for (double x : observations) ss += (x - post.mu0) * (x - post.mu0);
  post.a0 = prior.a0 + 0.5 * n;
  post.b0 = prior.b0 + 0.5 * ss;
  return post;
}

ParamTable posterior_infer(std::span<const ObservationSet> dataset, const Registry& registry,
                           const ParamTable& params) {
  ParamTable out = params;
  for (const ObservationSet& obs : dataset) {
    if (!registry.contains(obs.node_id)) throw Error(ErrorCode::UnknownNode, obs.node_id);
    const auto it = out.find(obs.node_id);
    if (it == out.end()) throw Error(ErrorCode::MissingTemplateParam, obs.node_id);
    DistributionSpec& spec = it->second;

    switch (spec.family()) {
      case Family::DirichletCategorical: {
        auto& p = std::get<DirichletParams>(spec.params);
        std::vector<std::int64_t> counts(p.alpha.size(), 0);
        for (double v : obs.values) {
          if (v < 0.0 || v != std::floor(v) || v >= static_cast<double>(counts.size()))
            throw Error(ErrorCode::DimensionMismatch,
                        obs.node_id + ": category index " + std::to_string(v) + " outside [0, " +
                            std::to_string(counts.size()) + ")");
          ++counts[static_cast<std::size_t>(v)];
        }
        p.alpha = posterior_update_dirichlet(p.alpha, counts);
        break;
      }
      case Family::BetaBernoulli: {
        auto& p = std::get<BetaParams>(spec.params);
        std::int64_t successes = 0;
        std::int64_t failures = 0;
        for (double v : obs.values) {
          if (v == 1.0) ++successes;
          else if (v == 0.0) ++failures;
          else throw Error(ErrorCode::InvalidArgument, obs.node_id + ": Bernoulli observation must be 0 or 1");
        }
        p = posterior_update_beta(p.a, p.b, successes, failures);
        break;
      }
      case Family::ShiftedExponentialWithGammaScale: {
        auto& p = std::get<ShiftedExpParams>(spec.params);
        p = posterior_update_gamma_exponential(p, obs.values);
        break;
      }
      case Family::NormalWithNormalInvGammaPrior: {
        auto& p = std::get<NormalParams>(spec.params);
        p = posterior_update_normal(p, obs.values);
        break;
      }
      default:
        throw Error(ErrorCode::UnsupportedFamily,
                    obs.node_id + " (" + std::string(to_string(spec.family())) + ")");
    }
  }
  return out;
}

std::vector<ObservationSet> parse_observations(std::istream& in, std::string_view source) {
  std::vector<ObservationSet> sets;
  std::map<std::string, std::size_t> position;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (!record.is_object() || !record.contains("node_id") || !record["node_id"].is_string())
      throw Error(ErrorCode::ParseError, where + ": missing node_id");
    double value = 0.0;
    if (record.contains("category_index") && record["category_index"].is_number_integer()) {
      value = record["category_index"].get<double>();
    } else if (record.contains("value") && record["value"].is_number()) {
      value = record["value"].get<double>();
    } else if (record.contains("value") && record["value"].is_boolean()) {
      value = record["value"].get<bool>() ? 1.0 : 0.0;
    } else {
      throw Error(ErrorCode::ParseError, where + ": record needs 'value' or 'category_index'");
    }
    const auto id = record["node_id"].get<std::string>();
    auto [it, inserted] = position.emplace(id, sets.size());
    if (inserted) sets.push_back({id, {}});
    sets[it->second].values.push_back(value);
  }
  return sets;
}

std::vector<ObservationSet> load_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_observations(in, path.string());
}

}  // namespace docsynth
