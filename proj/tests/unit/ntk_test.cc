#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nagntk/data.h"
#include "nagntk/errors.h"
#include "nagntk/network.h"
#include "nagntk/ntk.h"
#include "support/oracles.h"

namespace nagntk {
namespace {

TEST(EmpiricalGram, SingleInstanceIsActiveFraction) {
  const NetworkState s = NetworkState::init(1000, 3, 4);
  const Dataset ds(Matrix{{0.0, 0.6, 0.8}}, {1.0});
  const SymMatrix h = empirical_gram(s, ds.features());
  const PatternMatrix p = activation_patterns(s, ds.features());
  EXPECT_DOUBLE_EQ(h(0, 0), static_cast<double>(p.active_count(0)) / 1000.0);
  EXPECT_GE(h(0, 0), 0.0);
  EXPECT_LE(h(0, 0), 1.0);
}

TEST(EmpiricalGram, OrthogonalInputsGiveZero) {
  const NetworkState s = NetworkState::init(200, 2, 1);
  const Matrix x{{1.0, 0.0}, {0.0, 1.0}};
  EXPECT_EQ(empirical_gram(s, x)(0, 1), 0.0);
}

TEST(EmpiricalGram, InactiveInstanceHasZeroRow) {
  // Both neurons point away from x_0.
  const NetworkState s(Matrix{{-1.0, 0.0}, {-0.8, -0.6}}, {1.0, -1.0});
  const Matrix x{{1.0, 0.0}, {0.6, -0.8}};
  const SymMatrix h = empirical_gram(s, x);
  EXPECT_EQ(h(0, 0), 0.0);
  EXPECT_EQ(h(0, 1), 0.0);
}

TEST(EmpiricalGram, MatchesDefinition) {
  const NetworkState s = NetworkState::init(300, 5, 6);
  const Dataset ds = synthetic(12, 5, 2);
  const SymMatrix h = empirical_gram(s, ds.features());
  const Matrix w = s.weights();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.n(); ++j) {
      std::size_t both = 0;
      for (std::size_t r = 0; r < 300; ++r) {
        both += (dot(w.row(r), ds.features().row(i)) >= 0 &&
                 dot(w.row(r), ds.features().row(j)) >= 0);
      }
      EXPECT_NEAR(h(i, j), ds.inner_products()(i, j) * both / 300.0, 1e-15);
    }
  }
}

TEST(AnalyticNtk, DiagonalIsExactlyOneHalf) {
  const SymMatrix h = analytic_ntk(synthetic(40, 6, 3));
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(h(i, i), 0.5);
}

TEST(AnalyticNtk, ClosedFormEntries) {
  const double c = std::cos(std::numbers::pi / 3.0);  // 0.5 up to rounding
  const Matrix x{{1.0, 0.0}, {0.0, 1.0}, {c, std::sin(std::numbers::pi / 3.0)}};
  const SymMatrix h = analytic_ntk(x);
  EXPECT_EQ(h(0, 1), 0.0);
  EXPECT_NEAR(h(0, 2), 1.0 / 6.0, 1e-12);
}

TEST(AnalyticNtk, MatchesOracleAndRejectsNonUnitRows) {
  const Dataset ds = synthetic(25, 4, 8);
  const SymMatrix h = analytic_ntk(ds);
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = 0; j < ds.n(); ++j) {
      // On the diagonal <x, x> = 1 only up to rounding, where arccos is steep.
      if (i == j) EXPECT_EQ(h(i, i), 0.5);
      else EXPECT_NEAR(h(i, j), oracle::ntk_entry(ds.inner_products()(i, j)), 1e-15);
    }
  EXPECT_THROW(analytic_ntk(Matrix{{1.0, 1.0}}), NormalizationError);
}

TEST(AnalyticNtk, EmpiricalGramConcentratesOnIt) {
  const Dataset ds = synthetic(10, 5, 1);
  const SymMatrix hbar = analytic_ntk(ds);
  const double small = fro_norm(empirical_gram(NetworkState::init(1 << 10, 5, 0), ds.features())
                                    .matrix() - hbar.matrix());
  const double large = fro_norm(empirical_gram(NetworkState::init(1 << 16, 5, 0), ds.features())
                                    .matrix() - hbar.matrix());
  EXPECT_LT(large, small);
  EXPECT_LT(large, 0.05);
}

TEST(SpectrumSummary, Examples) {
  const SpectrumSummary id = spectrum_summary(SymMatrix(Matrix::identity(4)));
  EXPECT_DOUBLE_EQ(id.lambda_min, 1.0);
  EXPECT_DOUBLE_EQ(id.lambda_max, 1.0);
  EXPECT_DOUBLE_EQ(id.kappa, 1.0);
  const SpectrumSummary d = spectrum_summary(SymMatrix(Matrix::diagonal(Vector{0.1, 0.9})));
  EXPECT_DOUBLE_EQ(d.lambda_min, 0.1);
  EXPECT_DOUBLE_EQ(d.lambda_max, 0.9);
  EXPECT_NEAR(d.kappa, 9.0, 1e-14);
}

TEST(SpectrumSummary, NtkOfValidDatasetsIsPositiveDefinite) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Dataset ds = synthetic(30 + 5 * seed, 3 + seed, seed);
    EXPECT_GT(spectrum_summary(analytic_ntk(ds)).lambda_min, 0.0) << "seed " << seed;
  }
}

TEST(SpectrumSummary, RejectsSingularUnlessAllowed) {
  const SymMatrix singular(Matrix::diagonal(Vector{0.0, 1.0}));
  EXPECT_THROW(spectrum_summary(singular), PositivityError);
  EXPECT_TRUE(std::isinf(spectrum_summary(singular, true).kappa));
  EXPECT_THROW(spectrum_summary(SymMatrix(Matrix::diagonal(Vector{-1.0, 1.0})), true),
               PositivityError);
}

SpectrumSummary toy_spectrum() {
  return spectrum_summary(SymMatrix(Matrix::diagonal(Vector{0.1, 0.5, 0.9})));
}

TEST(DeriveHyperparams, NagFromTableFormulas) {
  const HyperParams hp = derive_hyperparams(toy_spectrum(), Method::kNAG);
  EXPECT_DOUBLE_EQ(hp.lambda, 0.1);
  EXPECT_NEAR(hp.lambda_max, 0.925, 1e-15);
  EXPECT_NEAR(hp.kappa_bar, 12.0 + 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(hp.eta, 1.0 / 1.85, 1e-14);
  EXPECT_NEAR(hp.eta, 0.54054, 1e-5);
  const double sk = std::sqrt(37.0 / 3.0);
  EXPECT_NEAR(hp.beta, (3 * sk - 2) / (3 * sk + 2), 1e-14);
  EXPECT_NEAR(hp.beta, 0.680910, 1e-6);
}

TEST(DeriveHyperparams, HeavyBallFromTableFormulas) {
  const HyperParams hp = derive_hyperparams(toy_spectrum(), Method::kHB);
  EXPECT_NEAR(hp.eta, 1.0 / 0.925, 1e-14);
  EXPECT_NEAR(hp.eta, 1.08108, 1e-5);
  const double b = 1.0 - 1.0 / (2.0 * std::sqrt(37.0 / 3.0));
  EXPECT_NEAR(hp.beta, b * b, 1e-14);
  EXPECT_NEAR(hp.beta, 0.735523, 1e-6);
}

TEST(DeriveHyperparams, GradientDescentHasNoMomentum) {
  const HyperParams hp = derive_hyperparams(toy_spectrum(), Method::kGD);
  EXPECT_EQ(hp.beta, 0.0);
  EXPECT_NEAR(hp.eta, 1.0 / 0.925, 1e-14);
}

TEST(DeriveHyperparams, WellConditionedKernel) {
  const SpectrumSummary ss = spectrum_summary(SymMatrix(0.5 * Matrix::identity(3)));
  const HyperParams hp = derive_hyperparams(ss, Method::kNAG);
  EXPECT_NEAR(hp.kappa_bar, 5.0 / 3.0, 1e-15);
  const double sk = std::sqrt(5.0 / 3.0);
  EXPECT_NEAR(hp.beta, (3 * sk - 2) / (3 * sk + 2), 1e-15);
}

TEST(DeriveHyperparams, TheoremConventionShrinksLambda) {
  const HyperParams hp =
      derive_hyperparams(toy_spectrum(), Method::kNAG, LambdaConvention::kTheorem1);
  EXPECT_NEAR(hp.lambda, 0.075, 1e-16);
  EXPECT_NEAR(hp.lambda_max, 0.9 + 0.075 / 4, 1e-15);
  // kappa_bar depends on kappa(Hbar) only.
  EXPECT_NEAR(hp.kappa_bar, 12.0 + 1.0 / 3.0, 1e-13);
}

TEST(DeriveHyperparams, TableValuesAreAdmissible) {
  for (double kappa : {1.0, 2.0, 10.0, 100.0, 1e4}) {
    const SpectrumSummary ss =
        spectrum_summary(SymMatrix(Matrix::diagonal(Vector{1.0 / kappa, 1.0})));
    for (Method m : {Method::kNAG, Method::kHB}) {
      const HyperParams hp = derive_hyperparams(ss, m);
      EXPECT_TRUE(is_admissible(hp.eta, hp.beta, hp.lambda, hp.lambda_max))
          << to_string(m) << " kappa " << kappa;
    }
  }
}

TEST(Parsing, MethodsAndConventions) {
  EXPECT_EQ(parse_method("nag"), Method::kNAG);
  EXPECT_EQ(parse_method("Hb"), Method::kHB);
  EXPECT_EQ(parse_method("GD"), Method::kGD);
  EXPECT_THROW(parse_method("adam"), Error);
  EXPECT_EQ(parse_convention("theorem1"), LambdaConvention::kTheorem1);
  EXPECT_THROW(parse_convention("other"), Error);
  EXPECT_EQ(to_string(Method::kHB), "HB");
}

TEST(Lemma4Check, IdenticalMatricesPass) {
  const SymMatrix hbar = analytic_ntk(synthetic(12, 4, 0));
  const Lemma4Report r = lemma4_check(hbar, hbar);
  EXPECT_EQ(r.fro_gap, 0.0);
  EXPECT_TRUE(r.all_ok());
}

TEST(Lemma4Check, ShiftBeyondQuarterLambdaFailsTheUpperEdge) {
  const SymMatrix hbar = analytic_ntk(synthetic(12, 4, 0));
  const double lambda = spectrum_summary(hbar).lambda_min;
  const SymMatrix h0(hbar.matrix() + (lambda / 2.0) * Matrix::identity(12));
  const Lemma4Report r = lemma4_check(h0, hbar);
  EXPECT_FALSE(r.lmax_ok);
  EXPECT_FALSE(r.fro_ok);
  EXPECT_TRUE(r.lmin_ok);
}

TEST(Lemma4Check, WideNetworkPasses) {
  const Dataset ds = synthetic(32, 32, 0);
  const SymMatrix hbar = analytic_ntk(ds);
  const SymMatrix h0 = empirical_gram(NetworkState::init(1 << 15, 32, 0), ds.features());
  EXPECT_TRUE(lemma4_check(h0, hbar).all_ok());
}

TEST(WidthRequirement, PositiveAndOrdered) {
  const HyperParams hp = derive_hyperparams(toy_spectrum(), Method::kNAG);
  const WidthRequirement w = width_requirement(hp, 50);
  EXPECT_GT(w.lambda_pow2, 0.0);
  EXPECT_GT(w.lambda_pow4, w.lambda_pow2);
}

}  // namespace
}  // namespace nagntk
