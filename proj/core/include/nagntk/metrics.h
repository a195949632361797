#ifndef NAGNTK_METRICS_H_
#define NAGNTK_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nagntk/data.h"
#include "nagntk/linalg.h"
#include "nagntk/network.h"
#include "nagntk/ntk.h"
#include "nagntk/patterns.h"

namespace nagntk {

struct MetricSample {
  std::size_t t = 0;
  double max_dist = 0.0;
  double pattern_ratio = 0.0;       // instantaneous flips vs time 0
  std::size_t sup_flip_count = 0;   // cumulative sup_i |S_i^perp|
  double residual_norm = 0.0;
  double loss = 0.0;
};

// max_r ||w^r - w_0^r||.
double max_distance(const NetworkState& s);

// Fraction of the m*n indicators that differ between `now` and `initial`.
double pattern_ratio(const PatternMatrix& now, const PatternMatrix& initial);
double pattern_ratio(const NetworkState& s, const Dataset& ds);

// Cumulative flip sets S_i^perp(t) = {r : some s <= t had a pattern on x_i
// different from time 0}.
class FlipTracker {
 public:
  FlipTracker() = default;
  explicit FlipTracker(PatternMatrix initial);

  void update(const PatternMatrix& current);

  const PatternMatrix& initial() const { return initial_; }
  std::size_t count(std::size_t i) const { return ever_.active_count(i); }
  std::vector<std::size_t> counts() const;
  std::size_t sup() const;

 private:
  PatternMatrix initial_;
  PatternMatrix ever_;
};

struct FlipReport {
  std::vector<std::size_t> counts;
  std::size_t sup = 0;
  double bound = 0.0;  // 4 m R
  std::vector<bool> pass;
  bool all_pass() const;
};

// `history` holds pattern snapshots; the first one is time 0.
FlipReport flip_counts(std::span<const PatternMatrix> history, double radius);
FlipReport flip_counts(const FlipTracker& tracker, double radius);

struct GramDrift {
  double measured = 0.0;
  double bound = 0.0;  // 2 n R
  bool ok = false;
};
GramDrift gram_drift(const SymMatrix& ht, const SymMatrix& h0, double radius,
                     std::size_t n);

struct InitResidualReport {
  double norm_sq = 0.0;
  double reference = 0.0;  // n log(m/delta) log^2(n/delta)
  double ratio = 0.0;
};
InitResidualReport init_residual_check(std::span<const double> xi0,
                                       std::size_t n, std::size_t m,
                                       double delta = 0.1);

// Everything train() records. Per-iteration vectors have T + 1 entries
// (t = 0..T); samples are taken at the observer stride and at T.
struct ResidualTrace {
  HyperParams hp;
  std::size_t width = 0;
  std::vector<Vector> residuals;        // xi_t
  Vector losses;
  Vector max_dist;                      // max_r ||w_t^r - w_0^r||
  std::vector<std::size_t> sup_flips;   // cumulative sup_i |S_i^perp(t)|
  std::vector<MetricSample> samples;
  // Empirical Gram snapshots, keyed by gram_steps, when requested.
  std::vector<std::size_t> gram_steps;
  std::vector<SymMatrix> grams;

  std::size_t iterations() const { return losses.empty() ? 0 : losses.size() - 1; }
  // xi_{-1} = xi_0.
  const Vector& xi(std::ptrdiff_t t) const {
    return residuals[static_cast<std::size_t>(t < 0 ? 0 : t)];
  }
  // z_t = [xi_t; xi_{t-1}].
  Vector z(std::size_t t) const;
  double z_norm(std::size_t t) const;
  // Gram snapshot at step t, or nullptr when it was not recorded.
  const SymMatrix* gram_at(std::size_t t) const;
};

// First t with loss_t <= frac * loss_0, or nullopt.
std::optional<std::size_t> iters_to_threshold(std::span<const double> losses,
                                              double frac);
std::optional<std::size_t> iters_to_threshold(const ResidualTrace& trace,
                                              double frac);

}  // namespace nagntk

#endif  // NAGNTK_METRICS_H_
