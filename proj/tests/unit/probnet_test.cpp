#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "docsynth/distributions.hpp"
#include "docsynth/error.hpp"
#include "docsynth/probnet.hpp"
#include "oracles.hpp"

using namespace docsynth;

namespace {

DistributionSpec dirichlet(std::vector<double> alpha) { return {DirichletParams{std::move(alpha)}, {}, {}}; }
DistributionSpec beta(double a, double b) { return {BetaParams{a, b}, {}, {}}; }
DistributionSpec normal(double mu0, double var0, double a0, double b0) {
  return {NormalParams{mu0, var0, a0, b0}, {}, {}};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

std::vector<double> values_of(const DistributionSpec& spec, int n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample(spec, rng).value;
  return xs;
}

}  // namespace

// --- registry ---------------------------------------------------------------

TEST(Registry, RegistersLeafNode) {
  Registry r;
  const auto h = r.register_node({"margin", {}, normal(0.1, 0.01, 3, 0.001)});
  EXPECT_EQ(h, 0u);
  EXPECT_TRUE(r.contains("margin"));
  EXPECT_EQ(r.node("margin").spec.family(), Family::NormalWithNormalInvGammaPrior);
}

TEST(Registry, SmallestCycleIsDetected) {
  EXPECT_EQ(code_of([] {
              Registry::build({{"a", {"b"}, beta(1, 1)}, {"b", {"a"}, beta(1, 1)}});
            }),
            ErrorCode::CycleDetected);
  Registry r;
  EXPECT_EQ(code_of([&] { r.register_node({"a", {"a"}, beta(1, 1)}); }), ErrorCode::CycleDetected);
}

TEST(Registry, ZeroConcentrationIsRejected) {
  Registry r;
  try {
    r.register_node({"columns", {}, dirichlet({1, 0, 1})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidHyperparam);
    EXPECT_NE(std::string(e.what()).find("columns.alpha[1]"), std::string::npos);
  }
}

TEST(Registry, DuplicateAndUnknownParent) {
  Registry r;
  r.register_node({"template", {}, dirichlet({1, 1})});
  EXPECT_EQ(code_of([&] { r.register_node({"template", {}, beta(1, 1)}); }), ErrorCode::DuplicateId);
  EXPECT_EQ(code_of([&] { r.register_node({"x", {"nope"}, beta(1, 1)}); }), ErrorCode::UnknownParent);
  EXPECT_EQ(code_of([] { Registry::build({{"x", {"nope"}, beta(1, 1)}}); }), ErrorCode::UnknownParent);
}

TEST(Registry, BuildAcceptsAnyOrder) {
  auto r = Registry::build({{"c", {"b"}, beta(1, 1)}, {"b", {"a"}, beta(1, 1)}, {"a", {}, beta(1, 1)}});
  EXPECT_LT(r.handle("a"), r.handle("b"));
  EXPECT_LT(r.handle("b"), r.handle("c"));
}

TEST(DistributionSpec, InvariantViolations) {
  EXPECT_EQ(code_of([] { dirichlet({1.0}).validate("x"); }), ErrorCode::InvalidHyperparam);
  EXPECT_EQ(code_of([] { beta(0, 1).validate("x"); }), ErrorCode::InvalidHyperparam);
  EXPECT_EQ(code_of([] { normal(0, 0, 1, 1).validate("x"); }), ErrorCode::InvalidHyperparam);
  EXPECT_EQ(code_of([] { DistributionSpec{ShiftedExpParams{NAN, 1, 1}, {}, {}}.validate("x"); }),
            ErrorCode::InvalidHyperparam);
  EXPECT_EQ(code_of([] { DistributionSpec{PoissonParams{0}, {}, {}}.validate("x"); }),
            ErrorCode::InvalidHyperparam);
  // Cauchy needs finite bounds with min < max.
  EXPECT_EQ(code_of([] { DistributionSpec{CauchyParams{0, 1}, {}, {}}.validate("x"); }),
            ErrorCode::InvalidHyperparam);
  EXPECT_EQ(code_of([] { DistributionSpec{CauchyParams{0, 1}, {5.0, 5.0}, {}}.validate("x"); }),
            ErrorCode::InvalidHyperparam);
}

TEST(DistributionSpec, JsonRoundTrip) {
  DistributionSpec s{CauchyParams{6, 2}, {1.0, 60.0, true}, "rows"};
  EXPECT_EQ(spec_from_json(to_json(s), "t"), s);
  DistributionSpec d{DirichletParams{{0.5, 2, 3}}, {}, {}};
  EXPECT_EQ(spec_from_json(to_json(d), "t"), d);
  const auto sym = spec_from_json(nlohmann::json::parse(R"({"family":"dirichlet","symmetric":0.5,"dim":4})"), "v");
  EXPECT_EQ(std::get<DirichletParams>(sym.params).alpha, std::vector<double>(4, 0.5));
  EXPECT_EQ(code_of([] { spec_from_json(nlohmann::json::parse(R"({"family":"zipf"})"), "z"); }),
            ErrorCode::ParseError);
}

// --- sampling ---------------------------------------------------------------

TEST(Sampling, DirichletDominantCategory) {
  const auto xs = values_of(dirichlet({1e9, 1, 1}), 10000, 11);
  int zeros = 0;
  for (double x : xs) zeros += x == 0.0;
  EXPECT_GE(zeros / 10000.0, 0.999);
}

TEST(Sampling, SymmetricBetaBernoulliIsFair) {
  const auto xs = values_of(beta(3, 3), 100000, 12);
  double s = 0;
  for (double x : xs) s += x;
  EXPECT_NEAR(s / xs.size(), 0.5, 0.01);
}

TEST(Sampling, ShiftedExponentialRespectsLocation) {
  const DistributionSpec spec{ShiftedExpParams{9.0, 2.0, 3.0}, {}, "pt"};
  for (double x : values_of(spec, 20000, 13)) ASSERT_GE(x, 9.0);
}

TEST(Sampling, CollapsedNormalPriorConcentratesOnMean) {
  const auto xs = values_of(normal(0.12, 1e-12, 1e6, 1e-6), 5000, 14);
  for (double x : xs) ASSERT_NEAR(x, 0.12, 1e-3);
}

TEST(Sampling, RecordsIntermediateParameters) {
  RngStream rng(15);
  const auto s = sample(normal(0.1, 0.01, 3, 0.002), rng);
  ASSERT_EQ(s.realized.params.size(), 2u);
  EXPECT_GT(s.realized.params[1], 0.0);
  RngStream again(15);
  const auto t = sample(normal(0.1, 0.01, 3, 0.002), again);
  EXPECT_EQ(s.value, t.value);
  EXPECT_EQ(s.realized, t.realized);
}

TEST(Sampling, HierarchicalLookupAndErrors) {
  Registry r;
  r.register_node({"header.present", {}, beta(1, 1)});
  ParamTable params;
  RngStream rng(16);
  EXPECT_EQ(code_of([&] { sample_hierarchical(r, "header.present", params, rng); }),
            ErrorCode::MissingTemplateParam);
  params["header.present"] = normal(0, 1, 2, 1);
  EXPECT_EQ(code_of([&] { sample_hierarchical(r, "header.present", params, rng); }),
            ErrorCode::InvalidHyperparam);
  params["header.present"] = beta(1e-9, 1e6);
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(sample_hierarchical(r, "header.present", params, rng).flag());
  EXPECT_EQ(code_of([&] { sample_hierarchical(r, "nope", params, rng); }), ErrorCode::UnknownNode);
}

TEST(Sampling, IntegerSupportRoundsThenClamps) {
  DistributionSpec words{NormalParams{1.0, 1e-9, 100, 99 * 4.0}, {1.0, std::nullopt, true}, {}};
  for (double x : values_of(words, 20000, 17)) {
    ASSERT_GE(x, 1.0);
    ASSERT_EQ(x, std::floor(x));
  }
}

TEST(SamplingProperty, SupportHoldsOverFuzzedDraws) {
  // 1,000 random specs x 1,000 draws each.
  RngStream gen(18);
  long checked = 0;
  for (int c = 0; c < 1000; ++c) {
    const double lo = dist::uniform(gen, -5, 5);
    const double hi = lo + dist::uniform(gen, 0.01, 10);
    DistributionSpec spec;
    switch (c % 5) {
      case 0: spec = {NormalParams{dist::uniform(gen, -10, 10), dist::uniform(gen, 0.1, 20), 2.5, 1.0}, {lo, hi, false}, {}}; break;
      case 1: spec = {ShiftedExpParams{lo, dist::uniform(gen, 0.5, 5), dist::uniform(gen, 0.1, 5)}, {lo, hi, false}, {}}; break;
      case 2: spec = {CauchyParams{dist::uniform(gen, -20, 20), dist::uniform(gen, 0.1, 5)}, {lo, hi, c % 2 == 0}, {}}; break;
      case 3: spec = {PoissonParams{dist::uniform(gen, 0.1, 50)}, {1.0, 40.0, true}, {}}; break;
      default: spec = {UniformParams{lo - 3, hi + 3}, {lo, hi, false}, {}}; break;
    }
    spec.validate("fuzz");
    RngStream rng(1000 + c);
    for (int i = 0; i < 1000; ++i) {
      const double x = sample(spec, rng).value;
      ASSERT_GE(x, *spec.support.min);
      ASSERT_LE(x, *spec.support.max);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000000);
}

// Moments of 10^5 draws within 3 standard errors of the analytic marginal.
TEST(SamplingProperty, MomentMatchingPerFamily) {
  const int n = 100000;
  struct Case {
    const char* name;
    DistributionSpec spec;
    double mean;
    double variance;
  };
  const std::vector<double> alpha = {2, 5, 3};
  const double p0 = 0.2, p1 = 0.5, p2 = 0.3;
  const double cat_mean = p1 + 2 * p2;
  const double cat_var = p1 + 4 * p2 - cat_mean * cat_mean;
  const double a = 10, b = 6, theta = 2;  // Lomax excess: finite fourth moment
  const double lomax_mean = b / (a - 1);
  const double lomax_var = b * b * a / ((a - 1) * (a - 1) * (a - 2));
  // Truncated Cauchy on [mu + gamma*za, mu + gamma*zb].
  const double mu = 6, g = 2, za = (1 - mu) / g, zb = (60 - mu) / g;
  const double zn = std::atan(zb) - std::atan(za);
  const double ez = (std::log1p(zb * zb) - std::log1p(za * za)) / (2 * zn);
  const double ez2 = (zb - za) / zn - 1;
  (void)p0;

  const std::vector<Case> cases = {
      {"dirichlet", dirichlet(alpha), cat_mean, cat_var},
      {"beta", beta(2, 6), 0.25, 0.25 * 0.75},
      {"normal", normal(3, 0.5, 6, 5), 3, 0.5 + 5.0 / 5.0},
      {"shifted_exp", {ShiftedExpParams{theta, a, b}, {}, {}}, theta + lomax_mean, lomax_var},
      {"poisson", {PoissonParams{7.5}, {}, {}}, 7.5, 7.5},
      {"cauchy", {CauchyParams{mu, g}, {1.0, 60.0, false}, {}}, mu + g * ez, g * g * (ez2 - ez * ez)},
      {"uniform", {UniformParams{-1, 3}, {}, {}}, 1, 16.0 / 12.0},
      {"uniform_discrete", {UniformDiscreteParams{2, 12}, {}, {}}, 7, (121.0 - 1) / 12.0},
  };
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto xs = values_of(c.spec, n, seed++);
    const auto s = oracle::sample_stats(xs);
    EXPECT_TRUE(oracle::within_se(s.mean, c.mean, s.se_mean)) << c.name << " mean " << s.mean << " vs " << c.mean;
    EXPECT_TRUE(oracle::within_se(s.variance, c.variance, s.se_variance))
        << c.name << " variance " << s.variance << " vs " << c.variance;
  }
}

TEST(SamplingProperty, TruncatedCauchyHasHeavierTailThanNormal) {
  const int n = 100000;
  const double mu = 0, g = 1;
  const auto cauchy = values_of({CauchyParams{mu, g}, {-1000.0, 1000.0, false}, {}}, n, 31);
  RngStream rng(32);
  int c_tail = 0, n_tail = 0;
  for (int i = 0; i < n; ++i) {
    c_tail += cauchy[i] > mu + 3 * g;
    n_tail += dist::normal(rng, mu, g) > mu + 3 * g;
  }
  EXPECT_GT(c_tail, n_tail);
  EXPECT_NEAR(c_tail / double(n), (std::atan(1000.0) - std::atan(3.0)) / (2 * std::atan(1000.0)), 0.005);
}

// --- conjugate updates --------------------------------------------------------

TEST(PosteriorDirichlet, ClosedFormExamples) {
  EXPECT_EQ(posterior_update_dirichlet(std::vector<double>{1, 1, 1}, std::vector<std::int64_t>{0, 0, 0}),
            (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(posterior_update_dirichlet(std::vector<double>{2, 3}, std::vector<std::int64_t>{5, 7}),
            (std::vector<double>{7, 10}));
  EXPECT_EQ(posterior_update_dirichlet(std::vector<double>{0.5, 0.5, 0.5}, std::vector<std::int64_t>{10, 0, 2}),
            (std::vector<double>{10.5, 0.5, 2.5}));
}

TEST(PosteriorDirichlet, Errors) {
  EXPECT_EQ(code_of([] { posterior_update_dirichlet(std::vector<double>{1, 1}, std::vector<std::int64_t>{1}); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { posterior_update_dirichlet(std::vector<double>{1, 1}, std::vector<std::int64_t>{1, -1}); }),
            ErrorCode::NegativeCount);
}

TEST(PosteriorBeta, ClosedFormExamples) {
  EXPECT_EQ(posterior_update_beta(1, 1, 0, 0), (BetaParams{1, 1}));
  EXPECT_EQ(posterior_update_beta(2, 2, 3, 1), (BetaParams{5, 3}));
  const auto p = posterior_update_beta(1, 1, 1000, 0);
  EXPECT_NEAR(p.a / (p.a + p.b), 1001.0 / 1002.0, 1e-15);
  EXPECT_EQ(code_of([] { posterior_update_beta(1, 1, -1, 0); }), ErrorCode::NegativeCount);
}

TEST(PosteriorBeta, MatchesGridIntegrationOfBayesRule) {
  RngStream gen(40);
  for (int c = 0; c < 20; ++c) {
    const double a0 = dist::uniform(gen, 0.5, 5), b0 = dist::uniform(gen, 0.5, 5);
    const auto s = dist::uniform_int(gen, 0, 40), f = dist::uniform_int(gen, 0, 40);
    const auto post = posterior_update_beta(a0, b0, s, f);
    auto log_post = [&](double p) {
      return (a0 - 1) * std::log(p) + (b0 - 1) * std::log1p(-p) + s * std::log(p) + f * std::log1p(-p);
    };
    const auto m = oracle::grid_moments(log_post, 1e-9, 1 - 1e-9, 400000);
    const double A = post.a, B = post.b;
    EXPECT_LT(oracle::relative_error(A / (A + B), m.mean), 0.01);
    EXPECT_LT(oracle::relative_error(A * B / ((A + B) * (A + B) * (A + B + 1)), m.variance), 0.01);
  }
}

TEST(PosteriorGammaExponential, ClosedFormExample) {
  const ShiftedExpParams prior{2.0, 1.0, 1.0};
  EXPECT_EQ(posterior_update_gamma_exponential(prior, {}), prior);
  const std::vector<double> obs = {3.0, 5.0};  // excesses 1 and 3
  const auto post = posterior_update_gamma_exponential(prior, obs);
  EXPECT_EQ(post.shape, 3.0);
  EXPECT_EQ(post.scale, 5.0);  // rate of the Gamma over the exponential rate: scale 1/5
  EXPECT_EQ(post.theta, 2.0);
  const std::vector<double> below = {1.0};
  EXPECT_EQ(code_of([&] { posterior_update_gamma_exponential(prior, below); }),
            ErrorCode::ObservationBelowLocation);
}

TEST(PosteriorGammaExponential, MatchesGridIntegrationOfBayesRule) {
  RngStream gen(41);
  for (int c = 0; c < 20; ++c) {
    const ShiftedExpParams prior{dist::uniform(gen, 0, 10), dist::uniform(gen, 0.5, 6), dist::uniform(gen, 0.2, 8)};
    const int n = static_cast<int>(dist::uniform_int(gen, 1, 30));
    std::vector<double> obs(n);
    double excess = 0;
    for (auto& x : obs) {
      x = prior.theta + dist::exponential(gen, dist::uniform(gen, 0.3, 4));
      excess += x - prior.theta;
    }
    const auto post = posterior_update_gamma_exponential(prior, obs);
    // Posterior over the exponential rate r: Gamma(shape, rate=scale) prior times r^n exp(-r * excess).
    auto log_post = [&](double r) {
      return (prior.shape - 1) * std::log(r) - prior.scale * r + n * std::log(r) - r * excess;
    };
    const double guess = post.shape / post.scale;
    const auto m = oracle::log_grid_moments(log_post, guess * 1e-4, guess * 50);
    EXPECT_LT(oracle::relative_error(post.shape / post.scale, m.mean), 0.01);
    EXPECT_LT(oracle::relative_error(post.shape / (post.scale * post.scale), m.variance), 0.01);
  }
}

TEST(PosteriorGammaExponential, PredictiveMeanConvergesToSampleMeanExcess) {
  RngStream gen(42);
  const ShiftedExpParams prior{5.0, 2.0, 1.0};
  std::vector<double> obs(10000);
  double excess = 0;
  for (auto& x : obs) {
    x = 5.0 + dist::exponential(gen, 2.5);
    excess += x - 5.0;
  }
  const auto post = posterior_update_gamma_exponential(prior, obs);
  const double predictive_mean_excess = post.scale / (post.shape - 1.0);
  EXPECT_LT(oracle::relative_error(predictive_mean_excess, excess / obs.size()), 0.002);
}

TEST(PosteriorNormal, NoObservationsLeavesPriorUnchanged) {
  const NormalParams prior{0.1, 0.02, 3, 0.5};
  EXPECT_EQ(posterior_update_normal(prior, {}), prior);
}

TEST(PosteriorNormal, FlatPriorRecoversSampleMean) {
  RngStream gen(43);
  std::vector<double> obs(100);
  double sum = 0;
  for (auto& x : obs) sum += (x = dist::normal(gen, 3.0, 2.0));
  const auto post = posterior_update_normal({0, 1e12, 3, 8}, obs);
  EXPECT_LE(std::fabs(post.mu0 - sum / 100), 3 * 2.0 / 10.0);
}

TEST(PosteriorNormal, DegenerateDataCollapsesVariance) {
  std::vector<double> obs(100000, 4.25);
  const auto post = posterior_update_normal({0, 10, 2, 1}, obs);
  EXPECT_NEAR(post.mu0, 4.25, 1e-4);
  const double variance_mean = post.b0 / (post.a0 - 1);
  EXPECT_GT(variance_mean, 0.0);
  EXPECT_LT(variance_mean, 1e-4);
}

TEST(PosteriorNormal, EachConditionalMatchesGridIntegration) {
  RngStream gen(44);
  for (int c = 0; c < 20; ++c) {
    const NormalParams prior{dist::uniform(gen, -5, 5), dist::uniform(gen, 0.2, 10), dist::uniform(gen, 1.5, 6),
                             dist::uniform(gen, 0.5, 10)};
    const int n = static_cast<int>(dist::uniform_int(gen, 2, 40));
    std::vector<double> obs(n);
    const double true_mu = dist::uniform(gen, -5, 5), true_sd = dist::uniform(gen, 0.3, 3);
    for (auto& x : obs) x = dist::normal(gen, true_mu, true_sd);
    const auto post = posterior_update_normal(prior, obs);

    // Mean given variance fixed at its prior expectation.
    const double v = prior.b0 / (prior.a0 - 1);
    auto log_mu = [&](double m) {
      double l = -0.5 * (m - prior.mu0) * (m - prior.mu0) / prior.var0;
      for (double x : obs) l -= 0.5 * (x - m) * (x - m) / v;
      return l;
    };
    const double sd = std::sqrt(post.var0);
    const auto mm = oracle::grid_moments(log_mu, post.mu0 - 12 * sd, post.mu0 + 12 * sd);
    EXPECT_LT(std::fabs(post.mu0 - mm.mean), 0.01 * std::max(std::fabs(mm.mean), sd));
    EXPECT_LT(oracle::relative_error(post.var0, mm.variance), 0.01);

    // Variance given the updated mean.
    auto log_var = [&](double s2) {
      double l = -(prior.a0 + 1) * std::log(s2) - prior.b0 / s2;
      for (double x : obs) l += -0.5 * std::log(s2) - 0.5 * (x - post.mu0) * (x - post.mu0) / s2;
      return l;
    };
    const double vmean = post.b0 / (post.a0 - 1);
    const auto mv = oracle::log_grid_moments(log_var, vmean * 1e-3, vmean * 200);
    EXPECT_LT(oracle::relative_error(vmean, mv.mean), 0.01);
    EXPECT_LT(oracle::relative_error(post.b0 * post.b0 / ((post.a0 - 1) * (post.a0 - 1) * (post.a0 - 2)), mv.variance),
              0.01);
  }
}

// --- inference over a registry ---------------------------------------------------

class InferTest : public ::testing::Test {
 protected:
  void SetUp() override {
    registry = Registry::build({{"template", {}, dirichlet({1, 1})},
                                {"columns", {"template"}, dirichlet({1, 1, 1})},
                                {"margin", {"template"}, normal(0.1, 0.01, 3, 0.002)},
                                {"elements.count", {"template"}, {PoissonParams{8}, {1.0, 40.0, true}, {}}}});
    for (const auto& n : registry.nodes()) params[n.id] = n.spec;
  }
  Registry registry;
  ParamTable params;
};

TEST_F(InferTest, EmptyDatasetLeavesParamsUnchanged) {
  EXPECT_EQ(posterior_infer({}, registry, params), params);
}

TEST_F(InferTest, OnlyObservedNodeChanges) {
  const std::vector<ObservationSet> data = {{"columns", {0, 2, 2}}};
  const auto out = posterior_infer(data, registry, params);
  EXPECT_EQ(std::get<DirichletParams>(out.at("columns").params).alpha, (std::vector<double>{2, 1, 3}));
  EXPECT_EQ(out.at("margin"), params.at("margin"));
  EXPECT_EQ(out.at("template"), params.at("template"));
  EXPECT_EQ(out.at("elements.count"), params.at("elements.count"));
}

TEST_F(InferTest, RecoversKnownMultinomial) {
  const std::vector<double> truth = {0.2, 0.5, 0.3};
  RngStream gen(45);
  ObservationSet obs{"columns", {}};
  for (int i = 0; i < 1000; ++i) obs.values.push_back(static_cast<double>(dist::categorical(gen, truth)));
  const auto out = posterior_infer(std::vector{obs}, registry, params);
  const auto& alpha = std::get<DirichletParams>(out.at("columns").params).alpha;
  const double total = alpha[0] + alpha[1] + alpha[2];
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(alpha[k] / total, truth[k], 0.03);
}

TEST_F(InferTest, Errors) {
  EXPECT_EQ(code_of([&] { posterior_infer(std::vector<ObservationSet>{{"nope", {1}}}, registry, params); }),
            ErrorCode::UnknownNode);
  EXPECT_EQ(code_of([&] { posterior_infer(std::vector<ObservationSet>{{"elements.count", {3}}}, registry, params); }),
            ErrorCode::UnsupportedFamily);
  EXPECT_EQ(code_of([&] { posterior_infer(std::vector<ObservationSet>{{"columns", {3}}}, registry, params); }),
            ErrorCode::DimensionMismatch);
}

TEST(Observations, ParsesLineDelimitedRecords) {
  std::istringstream in(
      "{\"node_id\": \"columns\", \"category_index\": 1}\n"
      "\n# comment\n"
      "{\"node_id\": \"margin\", \"value\": 0.08}\n"
      "{\"node_id\": \"columns\", \"category_index\": 2}\n");
  const auto sets = parse_observations(in, "mem");
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].node_id, "columns");
  EXPECT_EQ(sets[0].values, (std::vector<double>{1, 2}));
  EXPECT_EQ(sets[1].values, (std::vector<double>{0.08}));

  std::istringstream bad("{\"node_id\": \"columns\"}\n");
  EXPECT_EQ(code_of([&] { parse_observations(bad, "mem"); }), ErrorCode::ParseError);
}
