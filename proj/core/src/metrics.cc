#include "nagntk/metrics.h"

#include <algorithm>
#include <cmath>

#include "nagntk/errors.h"

namespace nagntk {

double max_distance(const NetworkState& s) {
  const Matrix& d = s.displacement();
  double best = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) best = std::max(best, norm2(d.row(r)));
  return best;
}

double pattern_ratio(const PatternMatrix& now, const PatternMatrix& initial) {
  std::size_t flips = 0;
  for (std::size_t i = 0; i < now.instances(); ++i) flips += now.flip_count(initial, i);
  const double total =
      static_cast<double>(now.instances()) * static_cast<double>(now.neurons());
  return total > 0.0 ? static_cast<double>(flips) / total : 0.0;
}

double pattern_ratio(const NetworkState& s, const Dataset& ds) {
  return pattern_ratio(activation_patterns(s, ds.features()),
                       activation_patterns(s.initial_weights(), ds.features()));
}

FlipTracker::FlipTracker(PatternMatrix initial)
    : initial_(std::move(initial)),
      ever_(initial_.instances(), initial_.neurons()) {}

void FlipTracker::update(const PatternMatrix& current) {
  if (current.instances() != initial_.instances() ||
      current.neurons() != initial_.neurons()) {
    throw DimensionError("FlipTracker: pattern shape mismatch");
  }
  for (std::size_t i = 0; i < current.instances(); ++i) {
    auto e = ever_.row(i);
    const auto c = current.row(i);
    const auto z = initial_.row(i);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] |= c[k] ^ z[k];
  }
}

std::vector<std::size_t> FlipTracker::counts() const {
  std::vector<std::size_t> out(initial_.instances());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = count(i);
  return out;
}

std::size_t FlipTracker::sup() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < initial_.instances(); ++i) best = std::max(best, count(i));
  return best;
}

bool FlipReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

FlipReport flip_counts(const FlipTracker& tracker, double radius) {
  FlipReport rep;
  rep.counts = tracker.counts();
  rep.sup = tracker.sup();
  rep.bound = 4.0 * static_cast<double>(tracker.initial().neurons()) * radius;
  rep.pass.resize(rep.counts.size());
  for (std::size_t i = 0; i < rep.counts.size(); ++i)
    rep.pass[i] = static_cast<double>(rep.counts[i]) <= rep.bound;
  return rep;
}

FlipReport flip_counts(std::span<const PatternMatrix> history, double radius) {
  if (history.empty()) return {};
  FlipTracker tracker(history.front());
  for (const PatternMatrix& p : history.subspan(1)) tracker.update(p);
  return flip_counts(tracker, radius);
}

GramDrift gram_drift(const SymMatrix& ht, const SymMatrix& h0, double radius,
                     std::size_t n) {
  if (ht.dim() != h0.dim()) throw DimensionError("gram_drift: dimension mismatch");
  GramDrift g;
  g.measured = fro_norm(ht.matrix() - h0.matrix());
  g.bound = 2.0 * static_cast<double>(n) * radius;
  g.ok = g.measured <= g.bound;
  return g;
}

InitResidualReport init_residual_check(std::span<const double> xi0,
                                       std::size_t n, std::size_t m,
                                       double delta) {
  InitResidualReport r;
  const double nrm = norm2(xi0);
  r.norm_sq = nrm * nrm;
  const double ln = std::log(static_cast<double>(n) / delta);
  r.reference = static_cast<double>(n) *
                std::log(static_cast<double>(m) / delta) * ln * ln;
  r.ratio = r.reference > 0.0 ? r.norm_sq / r.reference : 0.0;
  return r;
}

Vector ResidualTrace::z(std::size_t t) const {
  const Vector& a = xi(static_cast<std::ptrdiff_t>(t));
  const Vector& b = xi(static_cast<std::ptrdiff_t>(t) - 1);
  Vector out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double ResidualTrace::z_norm(std::size_t t) const {
  const double a = norm2(xi(static_cast<std::ptrdiff_t>(t)));
  const double b = norm2(xi(static_cast<std::ptrdiff_t>(t) - 1));
  return std::hypot(a, b);
}

const SymMatrix* ResidualTrace::gram_at(std::size_t t) const {
  const auto it = std::lower_bound(gram_steps.begin(), gram_steps.end(), t);
  if (it == gram_steps.end() || *it != t) return nullptr;
  return &grams[static_cast<std::size_t>(it - gram_steps.begin())];
}

std::optional<std::size_t> iters_to_threshold(std::span<const double> losses,
                                              double frac) {
  if (!(frac > 0.0 && frac < 1.0)) throw Error("iters_to_threshold: frac must lie in (0, 1)");
  if (losses.empty()) return std::nullopt;
  const double target = frac * losses.front();
  for (std::size_t t = 0; t < losses.size(); ++t)
    if (losses[t] <= target) return t;
  return std::nullopt;
}

std::optional<std::size_t> iters_to_threshold(const ResidualTrace& trace,
                                              double frac) {
  return iters_to_threshold(trace.losses, frac);
}

}  // namespace nagntk
