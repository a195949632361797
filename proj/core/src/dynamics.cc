#include "nagntk/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nagntk/errors.h"

namespace nagntk {

CompanionMatrix build_companion(const SymMatrix& h0, Method method, double eta,
                                double beta) {
  if (method == Method::kGD) {
    throw UnsupportedMethodError("GD has no companion form");
  }
  const std::size_t n = h0.dim();
  CompanionMatrix cm;
  cm.method = method;
  cm.eta = eta;
  cm.beta = beta;
  cm.source_h = h0;
  cm.top_left = Matrix(n, n);
  cm.top_right = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      const double eh = eta * h0(i, j);
      if (method == Method::kNAG) {
        cm.top_left(i, j) = (1.0 + beta) * (id - eh);
        cm.top_right(i, j) = beta * (-id + eh);
      } else {
        cm.top_left(i, j) = (1.0 + beta) * id - eh;
        cm.top_right(i, j) = -beta * id;
      }
    }
  }
  return cm;
}

CompanionMatrix build_companion(const SymMatrix& h0, const HyperParams& hp) {
  return build_companion(h0, hp.method, hp.eta, hp.beta);
}

Matrix CompanionMatrix::dense() const {
  const std::size_t k = n();
  Matrix m(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      m(i, j) = top_left(i, j);
      m(i, k + j) = top_right(i, j);
    }
    m(k + i, i) = 1.0;
  }
  return m;
}

Vector CompanionMatrix::apply(std::span<const double> z) const {
  const std::size_t k = n();
  if (z.size() != 2 * k) throw DimensionError("CompanionMatrix::apply: expected length 2n");
  const auto top = z.first(k);
  const auto bottom = z.subspan(k, k);
  Vector out(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = dot(top_left.row(i), top) + dot(top_right.row(i), bottom);
    out[k + i] = top[i];
  }
  return out;
}

std::vector<BlockRoots> block_spectrum(const CompanionMatrix& cm) {
  const Spectrum sp = eig_sym(cm.source_h);
  std::vector<BlockRoots> out;
  out.reserve(sp.dim());
  for (double lam : sp.eigenvalues) {
    double tr = 0.0;
    double det = 0.0;
    if (cm.method == Method::kNAG) {
      const double s = 1.0 - cm.eta * lam;
      tr = (1.0 + cm.beta) * s;
      det = cm.beta * s;
    } else {
      tr = 1.0 + cm.beta - cm.eta * lam;
      det = cm.beta;
    }
    BlockRoots b;
    b.lambda = lam;
    const auto [z1, z2] = eig_general_2x2(Matrix{{tr, -det}, {1.0, 0.0}});
    b.z1 = z1;
    b.z2 = z2;
    b.delta = tr * tr - 4.0 * det;
    b.magnitude = b.delta <= 0.0 ? std::sqrt(std::max(det, 0.0))
                                 : std::max(std::abs(z1), std::abs(z2));
    out.push_back(b);
  }
  return out;
}

double lemma2_g(double x, double y) {
  const double a = (1.0 + x) * (1.0 - y);
  return 4.0 * x * (1.0 - y) - a * a;
}

Lemma2Constant lemma2_constant(double lambda_min, double lambda_max, double eta,
                               double beta) {
  if (!(eta > 0.0) || !is_admissible(eta, beta, lambda_min, lambda_max)) {
    throw AdmissibilityError("lemma2_constant: (eta, beta) not admissible");
  }
  const double gmin = std::min(lemma2_g(beta, eta * lambda_min),
                               lemma2_g(beta, eta * lambda_max));
  if (!(gmin > 0.0)) {
    throw AdmissibilityError("lemma2_constant: g <= 0 at a spectrum endpoint");
  }
  const double s = 1.0 - eta * lambda_min;
  return {(2.0 * beta * s + 2.0) / std::sqrt(gmin), std::sqrt(beta * s)};
}

Lemma2Constant lemma2_constant(const SymMatrix& h, double eta, double beta) {
  const Spectrum sp = eig_sym(h);
  return lemma2_constant(sp.min(), sp.max(), eta, beta);
}

EnvelopeParams lemma3_bounds(double kappa_bar) {
  if (!(kappa_bar >= 1.0)) throw Error("lemma3_bounds: kappa_bar must be >= 1");
  const double sk = std::sqrt(kappa_bar);
  EnvelopeParams ep;
  ep.kappa_bar = kappa_bar;
  ep.gamma = 12.0 * sk;
  ep.rho = 1.0 - 1.0 / (2.0 * sk);
  ep.alpha = 1.0 - 2.0 / (3.0 * sk);
  ep.c_bound = 12.0 * sk;
  ep.rate_bound = ep.alpha;
  ep.beta = (3.0 * sk - 2.0) / (3.0 * sk + 2.0);
  return ep;
}

namespace {

Vector drift_times(const SymMatrix& h, const SymMatrix& h0,
                   std::span<const double> xi) {
  const std::size_t n = h.dim();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += (h(i, j) - h0(i, j)) * xi[j];
    out[i] = acc;
  }
  return out;
}

}  // namespace

Decomposition decompose_step(std::span<const double> z_next,
                             std::span<const double> z_curr,
                             const CompanionMatrix& cm, const SymMatrix& h_t,
                             const SymMatrix& h_tm1, const SymMatrix& h0,
                             std::span<const double> xi_t,
                             std::span<const double> xi_tm1) {
  const std::size_t n = cm.n();
  if (z_next.size() != 2 * n || z_curr.size() != 2 * n || xi_t.size() != n ||
      xi_tm1.size() != n || h_t.dim() != n || h_tm1.dim() != n || h0.dim() != n) {
    throw DimensionError("decompose_step: inconsistent shapes");
  }
  Decomposition dec;
  const Vector mz = cm.apply(z_curr);
  dec.mu.resize(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) dec.mu[i] = z_next[i] - mz[i];
  for (std::size_t i = n; i < 2 * n; ++i)
    dec.bottom_max = std::max(dec.bottom_max, std::abs(dec.mu[i]));
  if (dec.bottom_max > kBottomHalfTolerance) {
    throw InconsistencyError("bottom half of mu is " + std::to_string(dec.bottom_max) +
                             "; z_next is not a shift of z_curr");
  }

  const Vector dt = drift_times(h_t, h0, xi_t);
  dec.psi.resize(n);
  if (cm.method == Method::kNAG) {
    const Vector dtm1 = drift_times(h_tm1, h0, xi_tm1);
    for (std::size_t i = 0; i < n; ++i)
      dec.psi[i] = cm.beta * cm.eta * dtm1[i] - (1.0 + cm.beta) * cm.eta * dt[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) dec.psi[i] = -cm.eta * dt[i];
  }
  dec.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) dec.phi[i] = dec.mu[i] - dec.psi[i];
  return dec;
}

double phi_bound_value(const PhiBoundContext& ctx) {
  if (ctx.xi_norms.size() <= ctx.t) {
    throw DimensionError("phi bound needs ||xi_s|| for s = 0..t");
  }
  const double b = ctx.beta;
  const std::size_t t = ctx.t;
  const double now = ctx.xi_norms[t];
  const double prev = ctx.xi_norms[t == 0 ? 0 : t - 1];
  double tail = 0.0;
  for (std::size_t s = 0; s < t; ++s)
    tail += std::pow(b, static_cast<double>(t + 1 - s)) * ctx.xi_norms[s];
  const double scale = static_cast<double>(ctx.sup_flips) *
                       std::sqrt(static_cast<double>(ctx.n)) * ctx.eta /
                       static_cast<double>(ctx.m);
  return scale * ((2.0 + 4.0 * b) * now + 3.0 * b * prev + 2.0 * tail);
}

PhiBoundResult check_phi_bound(Decomposition& dec, const PhiBoundContext& ctx) {
  PhiBoundResult r;
  r.bound = phi_bound_value(ctx);
  const std::size_t n = dec.phi.size();
  dec.phi_bound.assign(n, r.bound);
  r.pass.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(dec.phi[i]);
    r.pass[i] = a <= r.bound;
    if (r.pass[i]) ++r.pass_count;
    const double ratio = r.bound > 0.0 ? a / r.bound
                         : (a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.worst_ratio = std::max(r.worst_ratio, ratio);
  }
  return r;
}

std::vector<EnvelopeRow> theorem1_envelope(const ResidualTrace& trace,
                                           const EnvelopeParams& ep) {
  std::vector<EnvelopeRow> rows;
  if (trace.residuals.empty()) return rows;
  const double z0 = trace.z_norm(0);
  const std::size_t len = trace.residuals.size();
  rows.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    EnvelopeRow r;
    r.t = t;
    r.bound = std::pow(ep.rho, static_cast<double>(t)) * 2.0 * ep.gamma * z0;
    r.value = trace.z_norm(t);
    r.ok = r.value <= r.bound;
    rows.push_back(r);
  }
  return rows;
}

WeightDistanceReport weight_distance_envelope(double max_measured,
                                              const EnvelopeParams& ep,
                                              double lambda, std::size_t n,
                                              std::size_t m, double xi0_norm) {
  WeightDistanceReport r;
  r.bound = 48.0 * std::sqrt(2.0 * static_cast<double>(n) * ep.kappa_bar) /
            (lambda * std::sqrt(static_cast<double>(m))) * xi0_norm;
  r.max_measured = max_measured;
  r.ok = max_measured <= r.bound;
  return r;
}

WeightDistanceReport weight_distance_envelope(const ResidualTrace& trace,
                                              const EnvelopeParams& ep,
                                              double lambda) {
  const double measured =
      trace.max_dist.empty()
          ? 0.0
          : *std::max_element(trace.max_dist.begin(), trace.max_dist.end());
  const double xi0 = trace.residuals.empty() ? 0.0 : norm2(trace.residuals.front());
  const std::size_t n = trace.residuals.empty() ? 0 : trace.residuals.front().size();
  return weight_distance_envelope(measured, ep, lambda, n, trace.width, xi0);
}

Vector linear_predictor(std::span<const double> z0, const CompanionMatrix& cm,
                        std::size_t iterations) {
  Vector z(z0.begin(), z0.end());
  Vector norms;
  norms.reserve(iterations + 1);
  norms.push_back(norm2(z));
  for (std::size_t t = 0; t < iterations; ++t) {
    z = cm.apply(z);
    norms.push_back(norm2(z));
  }
  return norms;
}

Vector linearized_first_state(const CompanionMatrix& cm,
                              std::span<const double> xi0) {
  const std::size_t n = cm.n();
  if (xi0.size() != n) throw DimensionError("linearized_first_state: length mismatch");
  const double c = cm.method == Method::kNAG ? cm.eta * (1.0 + cm.beta) : cm.eta;
  const Vector hx = matvec(cm.source_h.matrix(), xi0);
  Vector z(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = xi0[i] - c * hx[i];
    z[n + i] = xi0[i];
  }
  return z;
}

Vector linearized_trajectory(const CompanionMatrix& cm,
                             std::span<const double> xi0,
                             std::size_t iterations) {
  const double n0 = norm2(xi0);
  Vector out{std::sqrt(2.0) * n0};
  if (iterations == 0) return out;
  const Vector tail =
      linear_predictor(linearized_first_state(cm, xi0), cm, iterations - 1);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

double relative_deviation(std::span<const double> predicted,
                          std::span<const double> actual, std::size_t horizon) {
  const std::size_t len = std::min({predicted.size(), actual.size(), horizon + 1});
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    const double d = predicted[t] - actual[t];
    num += d * d;
    den += actual[t] * actual[t];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace nagntk
