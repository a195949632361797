#ifndef NAGNTK_OPTIMIZERS_H_
#define NAGNTK_OPTIMIZERS_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "nagntk/data.h"
#include "nagntk/metrics.h"
#include "nagntk/network.h"
#include "nagntk/ntk.h"

namespace nagntk {

inline constexpr double kDivergenceLoss = 1e12;

enum class NagForm {
  kTwoStep,  // v_{t+1} = w_t - eta g_t; w_{t+1} = v_{t+1} + beta (v_{t+1} - v_t)
  kOneLine,  // gradient-correction form without v
};

// Updates are carried in velocity form: u_{t+1} = beta u_t - eta g_t (plus
// the gradient-correction term for the one-line NAG form) is added to the
// iterate with Kahan compensation. This is algebraically the textbook update
// but keeps late, tiny steps from being rounded away against the O(1/sqrt(m))
// displacement, which otherwise stalls the residual near 1e-15 relative.
//
//   GD, HB, NAG one-line: u_t = W_t - W_{t-1}, the iterate is W.
//   NAG two-step:          u_t = v_t - v_{t-1}, the iterate is v and
//                          W = v + beta u.
struct OptimizerState {
  OptimizerState(const HyperParams& hp, const NetworkState& s,
                 NagForm form = NagForm::kTwoStep);

  HyperParams hp;
  NagForm form;
  Matrix velocity;      // zero at t = 0, i.e. W_{-1} = W_0 and v_0 = w_0
  Matrix grad_prev;     // grad L(W_{t-1}); zero at t = 0, see step_nag_oneline
  Matrix compensation;  // Kahan carry of the iterate
  std::size_t t = 0;
};

// Each step evaluates the gradient at the current W. The `grad` overloads
// take a precomputed gradient instead.
void step_gd(NetworkState& s, OptimizerState& os, const Dataset& ds);
void step_hb(NetworkState& s, OptimizerState& os, const Dataset& ds);
void step_nag(NetworkState& s, OptimizerState& os, const Dataset& ds);
// W_{t+1} = W_t + beta (W_t - W_{t-1}) - eta g_t - beta eta (g_t - g_{t-1}).
// Bootstrapped with W_{-1} = W_0 and g_{-1} = 0, which makes the first
// iterate W_0 - eta (1 + beta) g_0, the same as the two-step form from v_0 = w_0.
void step_nag_oneline(NetworkState& s, OptimizerState& os, const Dataset& ds);

// Dispatches on os.hp.method (and os.form for NAG).
void step(NetworkState& s, OptimizerState& os, const Dataset& ds);
void step(NetworkState& s, OptimizerState& os, const Matrix& grad);

// What an observer sees at iteration t, before the update to t + 1.
struct IterateView {
  std::size_t t;
  const NetworkState& state;
  const Evaluation& eval;
  const FlipTracker& flips;
  const Dataset& data;
};

struct Observer {
  std::size_t stride = 10;
  std::function<void(const IterateView&)> fn;
};

struct TrainHooks {
  // MetricSample stride; the final iteration is always sampled.
  std::size_t sample_stride = 10;
  // Empirical Gram snapshots (0 = never). The final iteration is included.
  std::size_t gram_stride = 0;
  std::vector<Observer> observers;
};

// Runs T steps from the current state. Throws DivergenceError when the loss
// exceeds kDivergenceLoss or anything becomes non-finite.
ResidualTrace train(NetworkState& s, OptimizerState& os, const Dataset& ds,
                    std::size_t iterations, const TrainHooks& hooks = {});

}  // namespace nagntk

#endif  // NAGNTK_OPTIMIZERS_H_
