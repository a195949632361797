#include "nagntk/optimizers.h"

#include <cmath>
#include <string>

#include "nagntk/errors.h"

namespace nagntk {

OptimizerState::OptimizerState(const HyperParams& hp_in, const NetworkState& s,
                               NagForm form_in)
    : hp(hp_in),
      form(form_in),
      velocity(s.width(), s.input_dim()),
      grad_prev(s.width(), s.input_dim()),
      compensation(s.width(), s.input_dim()) {}

namespace {

void expect_method(const OptimizerState& os, Method m, const char* who) {
  if (os.hp.method != m) {
    throw UnsupportedMethodError(std::string(who) + " called with method " +
                                 std::string(to_string(os.hp.method)));
  }
}

void expect_shape(const NetworkState& s, const Matrix& g) {
  if (g.rows() != s.width() || g.cols() != s.input_dim()) {
    throw DimensionError("gradient shape does not match the network");
  }
}

void kahan_add(double& sum, double& carry, double inc) {
  const double y = inc - carry;
  const double t = sum + y;
  carry = (t - sum) - y;
  sum = t;
}

void check_state(const NetworkState& s, const OptimizerState& os) {
  if (os.velocity.rows() != s.width() || os.velocity.cols() != s.input_dim()) {
    throw DimensionError("optimizer state does not match the network");
  }
}

// GD is the heavy-ball recursion with beta = 0; sharing the code path keeps
// the beta = 0 trajectories bitwise identical.
void hb_update(NetworkState& s, OptimizerState& os, const Matrix& g) {
  const double eta = os.hp.eta;
  const double beta = os.hp.method == Method::kGD ? 0.0 : os.hp.beta;
  auto w = s.mutable_displacement().data();
  auto u = os.velocity.data();
  auto c = os.compensation.data();
  const auto gr = g.data();
  for (std::size_t k = 0; k < w.size(); ++k) {
    u[k] = beta * u[k] - eta * gr[k];
    kahan_add(w[k], c[k], u[k]);
  }
}

void nag_two_step_update(NetworkState& s, OptimizerState& os, const Matrix& g) {
  const double eta = os.hp.eta;
  const double beta = os.hp.beta;
  auto w = s.mutable_displacement().data();
  auto v = s.mutable_aux_displacement().data();
  auto u = os.velocity.data();
  auto c = os.compensation.data();
  const auto gr = g.data();
  for (std::size_t k = 0; k < w.size(); ++k) {
    // v_{t+1} - v_t = (w_t - v_t) - eta g_t = beta u_t - eta g_t.
    u[k] = beta * u[k] - eta * gr[k];
    kahan_add(v[k], c[k], u[k]);
    w[k] = v[k] + beta * u[k];
  }
}

void nag_one_line_update(NetworkState& s, OptimizerState& os, const Matrix& g) {
  const double eta = os.hp.eta;
  const double beta = os.hp.beta;
  auto w = s.mutable_displacement().data();
  auto u = os.velocity.data();
  auto c = os.compensation.data();
  auto gp = os.grad_prev.data();
  const auto gr = g.data();
  for (std::size_t k = 0; k < w.size(); ++k) {
    u[k] = beta * u[k] - eta * gr[k] - beta * eta * (gr[k] - gp[k]);
    kahan_add(w[k], c[k], u[k]);
    gp[k] = gr[k];
  }
}

}  // namespace

void step(NetworkState& s, OptimizerState& os, const Matrix& g) {
  expect_shape(s, g);
  check_state(s, os);
  switch (os.hp.method) {
    case Method::kGD:
    case Method::kHB: hb_update(s, os, g); break;
    case Method::kNAG:
      if (os.form == NagForm::kTwoStep) {
        nag_two_step_update(s, os, g);
      } else {
        nag_one_line_update(s, os, g);
      }
      break;
  }
  ++os.t;
}

void step(NetworkState& s, OptimizerState& os, const Dataset& ds) {
  step(s, os, gradient(s, ds));
}

void step_gd(NetworkState& s, OptimizerState& os, const Dataset& ds) {
  expect_method(os, Method::kGD, "step_gd");
  check_state(s, os);
  hb_update(s, os, gradient(s, ds));
  ++os.t;
}

void step_hb(NetworkState& s, OptimizerState& os, const Dataset& ds) {
  expect_method(os, Method::kHB, "step_hb");
  check_state(s, os);
  hb_update(s, os, gradient(s, ds));
  ++os.t;
}

void step_nag(NetworkState& s, OptimizerState& os, const Dataset& ds) {
  expect_method(os, Method::kNAG, "step_nag");
  check_state(s, os);
  nag_two_step_update(s, os, gradient(s, ds));
  ++os.t;
}

void step_nag_oneline(NetworkState& s, OptimizerState& os, const Dataset& ds) {
  expect_method(os, Method::kNAG, "step_nag_oneline");
  check_state(s, os);
  nag_one_line_update(s, os, gradient(s, ds));
  ++os.t;
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

ResidualTrace train(NetworkState& s, OptimizerState& os, const Dataset& ds,
                    std::size_t iterations, const TrainHooks& hooks) {
  if (ds.d() != s.input_dim()) throw DimensionError("train: dataset dimension mismatch");
  const std::size_t stride = hooks.sample_stride == 0 ? 1 : hooks.sample_stride;

  ResidualTrace trace;
  trace.hp = os.hp;
  trace.width = s.width();
  trace.residuals.reserve(iterations + 1);
  trace.losses.reserve(iterations + 1);

  FlipTracker flips;
  for (std::size_t k = 0; k <= iterations; ++k) {
    const std::size_t t = os.t;
    Evaluation ev = evaluate(s, ds);
    if (!std::isfinite(ev.loss) || ev.loss > kDivergenceLoss ||
        !all_finite(s.displacement().data())) {
      throw DivergenceError("training diverged (loss " + std::to_string(ev.loss) + ")", t);
    }
    if (k == 0) {
      flips = FlipTracker(activation_patterns(s.initial_weights(), ds.features()));
    }
    flips.update(ev.patterns);

    const double dist = max_distance(s);
    trace.residuals.push_back(ev.residual);
    trace.losses.push_back(ev.loss);
    trace.max_dist.push_back(dist);
    trace.sup_flips.push_back(flips.sup());

    const bool last = k == iterations;
    if (k % stride == 0 || last) {
      MetricSample ms;
      ms.t = t;
      ms.max_dist = dist;
      ms.pattern_ratio = pattern_ratio(ev.patterns, flips.initial());
      ms.sup_flip_count = trace.sup_flips.back();
      ms.residual_norm = norm2(ev.residual);
      ms.loss = ev.loss;
      trace.samples.push_back(ms);
    }
    if (hooks.gram_stride > 0 && (k % hooks.gram_stride == 0 || last)) {
      trace.gram_steps.push_back(k);
      trace.grams.push_back(empirical_gram(ev.patterns, ds.inner_products()));
    }
    if (!hooks.observers.empty()) {
      const IterateView view{t, s, ev, flips, ds};
      for (const Observer& o : hooks.observers) {
        const std::size_t os_stride = o.stride == 0 ? 1 : o.stride;
        if (o.fn && (k % os_stride == 0 || last)) o.fn(view);
      }
    }
    if (last) break;
    step(s, os, gradient(s, ds, ev));
  }
  return trace;
}

}  // namespace nagntk
