#ifndef NAGNTK_NTK_H_
#define NAGNTK_NTK_H_

#include <string>
#include <string_view>

#include "nagntk/data.h"
#include "nagntk/linalg.h"
#include "nagntk/network.h"
#include "nagntk/patterns.h"

namespace nagntk {

// H(i, j) = <x_i, x_j> * #{r : both active} / m at the state's current W.
SymMatrix empirical_gram(const NetworkState& s, const Matrix& x);
// Same, from precomputed activation patterns and feature inner products.
SymMatrix empirical_gram(const PatternMatrix& patterns, const Matrix& inner);

// Hbar(i, j) = u (pi - arccos u) / (2 pi), u = <x_i, x_j> clamped to [-1, 1].
SymMatrix analytic_ntk(const Dataset& ds);
// Throws NormalizationError if a row of x is not unit norm.
SymMatrix analytic_ntk(const Matrix& x);

inline constexpr double kPositivityTolerance = 1e-10;

struct SpectrumSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  Spectrum full_spectrum;
};

// Throws PositivityError when lambda_min <= 0 (or below -1e-10 when
// allow_semidefinite is set, in which case kappa is +inf for lambda_min <= 0).
SpectrumSummary spectrum_summary(const SymMatrix& a,
                                 bool allow_semidefinite = false);

enum class Method { kGD, kHB, kNAG };
std::string_view to_string(Method m);
// Accepts GD/HB/NAG in any case; throws Error otherwise.
Method parse_method(std::string_view s);

// table1: lambda = lambda_min(Hbar); theorem1: lambda = 3 lambda_min(Hbar) / 4.
// In both, lambda_max = lambda_max(Hbar) + lambda / 4 and
// kappa_bar = 4 kappa(Hbar) / 3 + 1 / 3.
enum class LambdaConvention { kTable1, kTheorem1 };
std::string_view to_string(LambdaConvention c);
LambdaConvention parse_convention(std::string_view s);

struct HyperParams {
  Method method = Method::kGD;
  double eta = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double lambda_max = 0.0;
  double kappa_bar = 1.0;
  LambdaConvention convention = LambdaConvention::kTable1;
};

// NAG: eta = 1/(2 lambda_max), beta = (3 sqrt(kb) - 2)/(3 sqrt(kb) + 2).
// HB:  eta = 1/lambda_max,     beta = (1 - 1/(2 sqrt(kb)))^2.
// GD:  eta = 1/lambda_max,     beta = 0.
HyperParams derive_hyperparams(
    const SpectrumSummary& hbar, Method method,
    LambdaConvention convention = LambdaConvention::kTable1);

// Explicit hyperparameters, no spectrum attached. Used by tests and by
// manual overrides; lambda, lambda_max, kappa_bar are left at defaults.
HyperParams manual_hyperparams(Method method, double eta, double beta);

// beta >= (1 - sqrt(eta lmin)) / (1 + sqrt(eta lmin)) and eta <= 1/lmax,
// for eta lmin in [0, 1].
bool is_admissible(double eta, double beta, double lambda_min,
                   double lambda_max);

struct Lemma4Report {
  double lambda = 0.0;  // lambda_min(Hbar)
  double fro_gap = 0.0;
  double fro_limit = 0.0;  // lambda / 4
  double h0_lambda_min = 0.0;
  double lmin_limit = 0.0;  // 3 lambda / 4
  double h0_lambda_max = 0.0;
  double lmax_limit = 0.0;  // lambda_max(Hbar) + lambda / 4
  double h0_kappa = 0.0;
  double kappa_limit = 0.0;  // 4 kappa(Hbar) / 3 + 1 / 3
  bool fro_ok = false;
  bool lmin_ok = false;
  bool lmax_ok = false;
  bool kappa_ok = false;

  bool all_ok() const { return fro_ok && lmin_ok && lmax_ok && kappa_ok; }
};

// Report only; never throws on a failed inequality.
Lemma4Report lemma4_check(const SymMatrix& h0, const SymMatrix& hbar);

// Width requirements with the asymptotic constant set to 1:
// lambda^-2 n^4 kappa^2 log^3(n/delta) and the lambda^-4 form.
struct WidthRequirement {
  double lambda_pow2 = 0.0;
  double lambda_pow4 = 0.0;
};
WidthRequirement width_requirement(const HyperParams& hp, std::size_t n,
                                   double delta = 0.1);

}  // namespace nagntk

#endif  // NAGNTK_NTK_H_
