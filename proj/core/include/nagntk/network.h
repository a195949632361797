#ifndef NAGNTK_NETWORK_H_
#define NAGNTK_NETWORK_H_

#include <cstdint>
#include <filesystem>

#include "nagntk/data.h"
#include "nagntk/matrix.h"
#include "nagntk/patterns.h"

namespace nagntk {

// Two-layer ReLU network f(x) = m^{-1/2} sum_r a^r relu(<w^r, x>) with the
// output signs a frozen after initialization.
//
// Weight matrices are stored one row per hidden neuron (m x d), i.e. the
// transpose of the d x m column convention W = (w^1, ..., w^m).
//
// Iterates are held as displacements from the frozen W0 (D = W - W0 and
// D_v = V - W0). Training moves weights by O(1/sqrt(m)), so the displacement
// carries far more significant bits than W itself; updating W directly
// injects rounding noise of order ulp(|w|) every step, which sets a residual
// floor near 1e-14 relative.
class NetworkState {
 public:
  // w^r ~ N(0, I_d), a^r ~ Rademacher(1/2); W0 = V = W. Hidden weights and
  // signs come from separate streams, so for a fixed seed the first m
  // neurons of a wider network match the width-m network.
  static NetworkState init(std::size_t width, std::size_t input_dim,
                           std::uint64_t seed);

  NetworkState(Matrix weights, Vector signs);

  std::size_t width() const { return w0_.rows(); }
  std::size_t input_dim() const { return w0_.cols(); }

  // W = W0 + D and V = W0 + D_v, materialized.
  Matrix weights() const { return w0_ + d_; }
  Matrix aux() const { return w0_ + dv_; }
  const Matrix& initial_weights() const { return w0_; }
  const Vector& signs() const { return a_; }

  const Matrix& displacement() const { return d_; }
  const Matrix& aux_displacement() const { return dv_; }
  Matrix& mutable_displacement() { return d_; }
  Matrix& mutable_aux_displacement() { return dv_; }

  // <w^r, x> evaluated as <w0^r, x> + <d^r, x>.
  double preactivation(std::size_t r, std::span<const double> x) const;

  void set_weights(const Matrix& w);
  void set_aux(const Matrix& v);

  friend bool operator==(const NetworkState&, const NetworkState&) = default;

 private:
  friend NetworkState load_state(const std::filesystem::path&);
  NetworkState() = default;

  Matrix w0_;
  Matrix d_;
  Matrix dv_;
  Vector a_;
};

// Everything one forward pass over the training set yields.
struct Evaluation {
  Vector outputs;
  Vector residual;  // xi_i = f(x_i) - y_i
  double loss = 0.0;
  PatternMatrix patterns;
};

Evaluation evaluate(const NetworkState& s, const Dataset& ds);

Vector forward(const NetworkState& s, const Matrix& x);
PatternMatrix activation_patterns(const Matrix& weights, const Matrix& x);
PatternMatrix activation_patterns(const NetworkState& s, const Matrix& x);

// (1/2) sum_i (y_i - f(x_i))^2, no 1/n factor.
double loss(const NetworkState& s, const Dataset& ds);
Vector residual(const NetworkState& s, const Dataset& ds);

// dL/dw^r = m^{-1/2} sum_i xi_i a^r x_i I{<w^r, x_i> >= 0}; row r of the
// result is the gradient for neuron r.
Matrix gradient(const NetworkState& s, const Dataset& ds);
Matrix gradient(const NetworkState& s, const Dataset& ds, const Evaluation& ev);

// m^{-1/2} a^r relu(<w^r, x>).
double neuron_contribution(const NetworkState& s, std::size_t r,
                           std::span<const double> x);

// Binary checkpoint: magic "NAGNTK02", u64 width, u64 input_dim, then
// native-endian doubles a[m], W0[m*d], D[m*d], D_v[m*d] (row per neuron).
void save_state(const NetworkState& s, const std::filesystem::path& path);
NetworkState load_state(const std::filesystem::path& path);

}  // namespace nagntk

#endif  // NAGNTK_NETWORK_H_
