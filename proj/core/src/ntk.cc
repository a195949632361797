#include "nagntk/ntk.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nagntk/errors.h"

namespace nagntk {

SymMatrix empirical_gram(const PatternMatrix& patterns, const Matrix& inner) {
  const std::size_t n = patterns.instances();
  if (inner.rows() != n || inner.cols() != n) {
    throw DimensionError("empirical_gram: inner-product matrix must be n x n");
  }
  const double inv_m = 1.0 / static_cast<double>(patterns.neurons());
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = inner(i, j) *
                       static_cast<double>(patterns.joint_count(i, j)) * inv_m;
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return SymMatrix(std::move(h));
}

SymMatrix empirical_gram(const NetworkState& s, const Matrix& x) {
  if (x.cols() != s.input_dim()) {
    throw DimensionError("empirical_gram: feature dimension mismatch");
  }
  const PatternMatrix p = activation_patterns(s, x);
  return empirical_gram(p, matmul(x, x.transpose()));
}

namespace {

double ntk_entry(double u) {
  u = std::clamp(u, -1.0, 1.0);
  return u * (std::numbers::pi - std::acos(u)) / (2.0 * std::numbers::pi);
}

SymMatrix ntk_from_inner(const Matrix& inner) {
  const std::size_t n = inner.rows();
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = i == j ? 0.5 : ntk_entry(inner(i, j));
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return SymMatrix(std::move(h));
}

}  // namespace

SymMatrix analytic_ntk(const Dataset& ds) {
  return ntk_from_inner(ds.inner_products());
}

SymMatrix analytic_ntk(const Matrix& x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double nrm = norm2(x.row(i));
    if (std::abs(nrm - 1.0) > kUnitNormTolerance) {
      throw NormalizationError("analytic_ntk: row " + std::to_string(i) +
                                   " is not unit norm",
                               i);
    }
  }
  return ntk_from_inner(matmul(x, x.transpose()));
}

SpectrumSummary spectrum_summary(const SymMatrix& a, bool allow_semidefinite) {
  SpectrumSummary ss;
  ss.full_spectrum = eig_sym(a);
  ss.lambda_min = ss.full_spectrum.min();
  ss.lambda_max = ss.full_spectrum.max();
  const bool positive = ss.lambda_min > 0.0;
  if (!positive && (!allow_semidefinite || ss.lambda_min < -kPositivityTolerance)) {
    throw PositivityError("matrix is not positive definite: lambda_min = " +
                          std::to_string(ss.lambda_min));
  }
  ss.kappa = positive ? ss.lambda_max / ss.lambda_min
                      : std::numeric_limits<double>::infinity();
  return ss;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kGD: return "GD";
    case Method::kHB: return "HB";
    case Method::kNAG: return "NAG";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Method parse_method(std::string_view s) {
  const std::string u = upper(s);
  if (u == "GD") return Method::kGD;
  if (u == "HB") return Method::kHB;
  if (u == "NAG") return Method::kNAG;
  throw Error("unknown method '" + std::string(s) + "' (expected GD, HB or NAG)");
}

std::string_view to_string(LambdaConvention c) {
  return c == LambdaConvention::kTable1 ? "table1" : "theorem1";
}

LambdaConvention parse_convention(std::string_view s) {
  const std::string u = upper(s);
  if (u == "TABLE1") return LambdaConvention::kTable1;
  if (u == "THEOREM1") return LambdaConvention::kTheorem1;
  throw Error("unknown lambda convention '" + std::string(s) +
              "' (expected table1 or theorem1)");
}

HyperParams derive_hyperparams(const SpectrumSummary& hbar, Method method,
                               LambdaConvention convention) {
  if (!(hbar.lambda_min > 0.0)) {
    throw PositivityError("derive_hyperparams needs a positive definite Hbar");
  }
  HyperParams hp;
  hp.method = method;
  hp.convention = convention;
  hp.lambda = convention == LambdaConvention::kTable1 ? hbar.lambda_min
                                                      : 0.75 * hbar.lambda_min;
  hp.lambda_max = hbar.lambda_max + hp.lambda / 4.0;
  hp.kappa_bar = 4.0 * hbar.kappa / 3.0 + 1.0 / 3.0;
  if (hp.kappa_bar < 1.0) throw Error("derive_hyperparams: kappa_bar < 1");
  const double sk = std::sqrt(hp.kappa_bar);
  switch (method) {
    case Method::kNAG:
      hp.eta = 1.0 / (2.0 * hp.lambda_max);
      hp.beta = (3.0 * sk - 2.0) / (3.0 * sk + 2.0);
      break;
    case Method::kHB: {
      hp.eta = 1.0 / hp.lambda_max;
      const double b = 1.0 - 1.0 / (2.0 * sk);
      hp.beta = b * b;
      break;
    }
    case Method::kGD:
      hp.eta = 1.0 / hp.lambda_max;
      hp.beta = 0.0;
      break;
  }
  return hp;
}

HyperParams manual_hyperparams(Method method, double eta, double beta) {
  HyperParams hp;
  hp.method = method;
  hp.eta = eta;
  hp.beta = beta;
  return hp;
}

bool is_admissible(double eta, double beta, double lambda_min,
                   double lambda_max) {
  const double y = eta * lambda_min;
  if (!(y >= 0.0 && y <= 1.0) || beta >= 1.0) return false;
  if (eta * lambda_max > 1.0) return false;
  const double r = std::sqrt(y);
  return beta >= (1.0 - r) / (1.0 + r);
}

Lemma4Report lemma4_check(const SymMatrix& h0, const SymMatrix& hbar) {
  if (h0.dim() != hbar.dim()) throw DimensionError("lemma4_check: dimension mismatch");
  const SpectrumSummary sb = spectrum_summary(hbar);
  const SpectrumSummary s0 = spectrum_summary(h0, true);
  Lemma4Report r;
  r.lambda = sb.lambda_min;
  r.fro_gap = fro_norm(h0.matrix() - hbar.matrix());
  r.fro_limit = r.lambda / 4.0;
  r.h0_lambda_min = s0.lambda_min;
  r.lmin_limit = 0.75 * r.lambda;
  r.h0_lambda_max = s0.lambda_max;
  r.lmax_limit = sb.lambda_max + r.lambda / 4.0;
  r.h0_kappa = s0.kappa;
  r.kappa_limit = 4.0 * sb.kappa / 3.0 + 1.0 / 3.0;
  r.fro_ok = r.fro_gap <= r.fro_limit;
  r.lmin_ok = r.h0_lambda_min >= r.lmin_limit;
  r.lmax_ok = r.h0_lambda_max <= r.lmax_limit;
  r.kappa_ok = r.h0_kappa <= r.kappa_limit;
  return r;
}

WidthRequirement width_requirement(const HyperParams& hp, std::size_t n,
                                   double delta) {
  const double nn = static_cast<double>(n);
  const double l = std::log(nn / delta);
  const double common = std::pow(nn, 4) * hp.kappa_bar * hp.kappa_bar * l * l * l;
  return {common / (hp.lambda * hp.lambda), common / std::pow(hp.lambda, 4)};
}

}  // namespace nagntk
