#ifndef NAGNTK_DYNAMICS_H_
#define NAGNTK_DYNAMICS_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nagntk/linalg.h"
#include "nagntk/metrics.h"
#include "nagntk/ntk.h"

namespace nagntk {

// 2n x 2n coefficient matrix of the augmented residual z_t = [xi_t; xi_{t-1}],
// stored as its two nontrivial blocks (bottom row is [I, 0]).
//   NAG: [[(1+b)(I - eta H0), b(-I + eta H0)], [I, 0]]
//   HB:  [[(1+b)I - eta H0,   -b I          ], [I, 0]]
struct CompanionMatrix {
  Method method = Method::kNAG;
  double eta = 0.0;
  double beta = 0.0;
  SymMatrix source_h;
  Matrix top_left;
  Matrix top_right;

  std::size_t n() const { return top_left.rows(); }
  Matrix dense() const;
  Vector apply(std::span<const double> z) const;
};

// Throws UnsupportedMethodError for GD.
CompanionMatrix build_companion(const SymMatrix& h0, const HyperParams& hp);
CompanionMatrix build_companion(const SymMatrix& h0, Method method, double eta,
                                double beta);

struct BlockRoots {
  double lambda = 0.0;  // eigenvalue of H0 for this block
  std::complex<double> z1;
  std::complex<double> z2;
  double delta = 0.0;      // discriminant of the block polynomial
  double magnitude = 0.0;  // sqrt(beta(1 - eta lambda)) when delta <= 0
};

// One 2x2 block per eigenvalue of H0, in ascending eigenvalue order.
std::vector<BlockRoots> block_spectrum(const CompanionMatrix& cm);

// g(x, y) = 4x(1 - y) - ((1 + x)(1 - y))^2.
double lemma2_g(double x, double y);

struct Lemma2Constant {
  double c = 0.0;
  double rate = 0.0;  // sqrt(beta (1 - eta lambda_min))
};

// Throws AdmissibilityError when the admissibility conditions fail or
// min{g(beta, eta lmin), g(beta, eta lmax)} <= 0 (C is unbounded there).
Lemma2Constant lemma2_constant(const SymMatrix& h, double eta, double beta);
Lemma2Constant lemma2_constant(double lambda_min, double lambda_max, double eta,
                               double beta);

struct EnvelopeParams {
  double kappa_bar = 1.0;
  double gamma = 12.0;       // 12 sqrt(kb)
  double rho = 0.5;          // 1 - 1/(2 sqrt(kb))
  double alpha = 1.0 / 3.0;  // 1 - 2/(3 sqrt(kb))
  double c_bound = 12.0;     // 12 sqrt(kb)
  double rate_bound = 1.0 / 3.0;
  double beta = 0.2;         // (3 sqrt(kb) - 2)/(3 sqrt(kb) + 2)
};

EnvelopeParams lemma3_bounds(double kappa_bar);

inline constexpr double kBottomHalfTolerance = 1e-9;

struct Decomposition {
  Vector psi;        // Gram-drift part
  Vector phi;        // activation-flip part
  Vector mu;         // z_{t+1} - M z_t
  Vector phi_bound;  // filled by check_phi_bound
  double bottom_max = 0.0;  // max |mu[n..2n)|
};

// mu := z_next - M z_curr; psi per the Gram-drift formula (NAG:
// beta eta (H_{t-1} - H0) xi_{t-1} - (1+beta) eta (H_t - H0) xi_t;
// HB: -eta (H_t - H0) xi_t); phi := mu_top - psi. Throws InconsistencyError
// if the bottom half of mu exceeds kBottomHalfTolerance.
Decomposition decompose_step(std::span<const double> z_next,
                             std::span<const double> z_curr,
                             const CompanionMatrix& cm, const SymMatrix& h_t,
                             const SymMatrix& h_tm1, const SymMatrix& h0,
                             std::span<const double> xi_t,
                             std::span<const double> xi_tm1);

struct PhiBoundContext {
  std::size_t t = 0;
  std::span<const double> xi_norms;  // ||xi_s|| for s = 0..t (at least)
  std::size_t sup_flips = 0;         // sup_j |S_j^perp|
  std::size_t m = 0;
  std::size_t n = 0;
  double eta = 0.0;
  double beta = 0.0;
};

struct PhiBoundResult {
  double bound = 0.0;
  std::vector<bool> pass;
  std::size_t pass_count = 0;
  double worst_ratio = 0.0;  // max_i |phi_i| / bound (inf if bound = 0 < |phi_i|)
  bool all_pass() const { return pass_count == pass.size(); }
};

// |phi_t[i]| <= (sup_j |S_j^perp| sqrt(n) eta / m) *
//   [(2 + 4 beta)||xi_t|| + 3 beta ||xi_{t-1}|| + 2 sum_{s<t} beta^{t+1-s} ||xi_s||].
// Fills dec.phi_bound. Never throws on a violation.
double phi_bound_value(const PhiBoundContext& ctx);
PhiBoundResult check_phi_bound(Decomposition& dec, const PhiBoundContext& ctx);

struct EnvelopeRow {
  std::size_t t = 0;
  double bound = 0.0;  // rho^t 2 gamma ||z_0||
  double value = 0.0;  // ||z_t||
  bool ok = false;
};

std::vector<EnvelopeRow> theorem1_envelope(const ResidualTrace& trace,
                                           const EnvelopeParams& ep);

struct WeightDistanceReport {
  double bound = 0.0;  // 48 sqrt(2 n kb) / (lambda sqrt(m)) ||xi_0||
  double max_measured = 0.0;
  bool ok = false;
};

WeightDistanceReport weight_distance_envelope(double max_measured,
                                              const EnvelopeParams& ep,
                                              double lambda, std::size_t n,
                                              std::size_t m, double xi0_norm);
WeightDistanceReport weight_distance_envelope(const ResidualTrace& trace,
                                              const EnvelopeParams& ep,
                                              double lambda);

// ||z_t|| for z_{t+1} = M z_t, t = 0..T.
Vector linear_predictor(std::span<const double> z0, const CompanionMatrix& cm,
                        std::size_t iterations);

// First augmented state of the linearized dynamics from v_0 = w_0:
// NAG [(I - eta(1+beta) H0) xi_0; xi_0], HB [(I - eta H0) xi_0; xi_0].
Vector linearized_first_state(const CompanionMatrix& cm,
                              std::span<const double> xi0);

// Predicted ||z_t||, t = 0..T: ||[xi_0; xi_0]|| at t = 0, then the linear
// system started from linearized_first_state.
Vector linearized_trajectory(const CompanionMatrix& cm,
                             std::span<const double> xi0,
                             std::size_t iterations);

// ||pred - actual|| / ||actual|| over the common prefix of at most `horizon`
// + 1 entries.
double relative_deviation(std::span<const double> predicted,
                          std::span<const double> actual,
                          std::size_t horizon);

}  // namespace nagntk

#endif  // NAGNTK_DYNAMICS_H_
