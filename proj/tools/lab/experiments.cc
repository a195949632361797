#include "lab/experiments.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <string>

#include "lab/pool.h"
#include "nagntk/csv.h"
#include "nagntk/dynamics.h"
#include "nagntk/errors.h"
#include "json.hpp"

namespace nagntk::lab {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{
      "t", "loss", "residual_norm", "max_dist", "pattern_ratio", "sup_flip_count"};
  return cols;
}

const std::vector<std::string>& decomposition_columns() {
  static const std::vector<std::string> cols{
      "t",           "psi_norm",       "phi_norm",       "mu_norm",
      "phi_bound_pass_count", "envelope_bound", "envelope_value", "envelope_ok"};
  return cols;
}

namespace {

std::string fmt(double v) { return csv::format(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

json hyperparams_json(const HyperParams& hp) {
  return json{{"method", std::string(to_string(hp.method))},
              {"eta", hp.eta},
              {"beta", hp.beta},
              {"lambda", hp.lambda},
              {"lambda_max", hp.lambda_max},
              {"kappa_bar", hp.kappa_bar},
              {"lambda_convention", std::string(to_string(hp.convention))}};
}

json optional_json(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

void write_json(const fs::path& path, const json& j) {
  csv::write_text_atomic(path, j.dump(2) + "\n");
}

std::string method_tag(Method m) { return std::string(to_string(m)); }

struct Prepared {
  Dataset ds;
  SymMatrix hbar;
  SpectrumSummary hbar_ss;
};

Prepared prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  Dataset ds = load_dataset(cfg.data);
  SymMatrix hbar = analytic_ntk(ds);
  SpectrumSummary ss = spectrum_summary(hbar);
  return {std::move(ds), std::move(hbar), std::move(ss)};
}

}  // namespace

void write_trace_csv(const fs::path& path, const ResidualTrace& trace) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(trace.samples.size());
  for (const MetricSample& s : trace.samples) {
    rows.push_back({fmt(s.t), fmt(s.loss), fmt(s.residual_norm), fmt(s.max_dist),
                    fmt(s.pattern_ratio), fmt(s.sup_flip_count)});
  }
  csv::write_atomic(path, trace_columns(), rows);
}

RunOutcome train_run(const Dataset& ds, const SpectrumSummary& hbar,
                     const RunKey& key, const ExperimentConfig& cfg,
                     TrainHooks hooks) {
  RunOutcome out;
  out.key = key;
  out.hp = derive_hyperparams(hbar, key.method, cfg.convention);
  hooks.sample_stride = cfg.stride;
  NetworkState s = NetworkState::init(key.width, ds.d(), key.seed);
  OptimizerState os(out.hp, s);
  try {
    out.trace = train(s, os, ds, cfg.iterations, hooks);
  } catch (const DivergenceError& e) {
    out.diverged_at = e.iteration();
    out.error = e.what();
  }
  return out;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  const Prepared p = prepare(cfg);
  const std::size_t width = cfg.widths.front();
  std::vector<RunKey> keys;
  for (Method m : cfg.methods)
    for (std::uint64_t seed : cfg.seeds) keys.push_back({m, width, seed});

  ConvergenceResult res;
  res.runs.resize(keys.size());
  fs::create_directories(cfg.output_dir);
  parallel_for(keys.size(), worker_count(cfg.workers), [&](std::size_t i) {
    res.runs[i] = train_run(p.ds, p.hbar_ss, keys[i], cfg);
    if (res.runs[i].ok()) {
      write_trace_csv(cfg.output_dir / ("trace_" + method_tag(keys[i].method) + "_seed" +
                                        std::to_string(keys[i].seed) + ".csv"),
                      *res.runs[i].trace);
    }
  });

  json summary;
  summary["dataset"] = {{"name", p.ds.name()}, {"n", p.ds.n()}, {"d", p.ds.d()}};
  summary["hbar"] = {{"lambda_min", p.hbar_ss.lambda_min},
                     {"lambda_max", p.hbar_ss.lambda_max},
                     {"kappa", p.hbar_ss.kappa}};
  summary["width"] = width;
  summary["iterations"] = cfg.iterations;
  summary["stride"] = cfg.stride;
  summary["threshold"] = cfg.threshold;
  json methods = json::object();
  std::vector<std::vector<std::string>> band_rows;
  for (Method m : cfg.methods) {
    json jm;
    std::vector<const RunOutcome*> ok;
    json seeds = json::array();
    for (const RunOutcome& r : res.runs) {
      if (r.key.method != m) continue;
      jm["hyperparams"] = hyperparams_json(r.hp);
      json js{{"seed", r.key.seed}};
      if (r.ok()) {
        ok.push_back(&r);
        js["iters_to_threshold"] = optional_json(iters_to_threshold(*r.trace, cfg.threshold));
        js["initial_loss"] = r.trace->losses.front();
        js["final_loss"] = r.trace->losses.back();
      } else {
        res.any_diverged = true;
        js["diverged_at"] = optional_json(r.diverged_at);
        js["error"] = r.error;
      }
      seeds.push_back(js);
    }
    jm["runs"] = seeds;
    // Loss bands over the successful seeds at the sampled iterations.
    json bands = json::array();
    if (!ok.empty()) {
      const auto& samples = ok.front()->trace->samples;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        for (const RunOutcome* r : ok) {
          const double v = r->trace->samples[k].loss;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          sum += v;
        }
        const double mean = sum / static_cast<double>(ok.size());
        bands.push_back({{"t", samples[k].t}, {"mean", mean}, {"min", lo}, {"max", hi}});
        band_rows.push_back({method_tag(m), fmt(samples[k].t), fmt(mean), fmt(lo), fmt(hi)});
      }
    }
    jm["loss_bands"] = bands;
    methods[method_tag(m)] = jm;
  }
  summary["methods"] = methods;
  write_json(cfg.output_dir / "summary.json", summary);
  csv::write_atomic(cfg.output_dir / "bands.csv", {"method", "t", "mean", "min", "max"},
                    band_rows);
  return res;
}

SweepResult run_width_sweep(const ExperimentConfig& cfg) {
  const Prepared p = prepare(cfg);
  if (cfg.widths.size() < 2) {
    std::cerr << "warning: single width, no trend to report\n";
  }
  std::vector<RunKey> keys;
  for (std::size_t w : cfg.widths)
    for (Method m : cfg.methods)
      for (std::uint64_t seed : cfg.seeds) keys.push_back({m, w, seed});

  std::vector<RunOutcome> runs(keys.size());
  fs::create_directories(cfg.output_dir);
  parallel_for(keys.size(), worker_count(cfg.workers), [&](std::size_t i) {
    runs[i] = train_run(p.ds, p.hbar_ss, keys[i], cfg);
    if (runs[i].ok()) {
      write_trace_csv(cfg.output_dir / ("trace_" + method_tag(keys[i].method) + "_m" +
                                        std::to_string(keys[i].width) + "_seed" +
                                        std::to_string(keys[i].seed) + ".csv"),
                      *runs[i].trace);
    }
  });

  SweepResult res;
  std::vector<std::vector<std::string>> sweep_rows;
  std::vector<std::vector<std::string>> traj_rows;
  for (std::size_t w : cfg.widths) {
    for (Method m : cfg.methods) {
      std::vector<const ResidualTrace*> ok;
      for (const RunOutcome& r : runs) {
        if (r.key.width != w || r.key.method != m) continue;
        if (r.ok()) {
          ok.push_back(&*r.trace);
        } else {
          res.any_diverged = true;
        }
      }
      SweepRow row;
      row.width = w;
      row.method = m;
      row.runs = ok.size();
      std::vector<double> md, pr, sf, fl;
      for (const ResidualTrace* t : ok) {
        const MetricSample& last = t->samples.back();
        md.push_back(last.max_dist);
        pr.push_back(last.pattern_ratio);
        sf.push_back(static_cast<double>(last.sup_flip_count));
        fl.push_back(last.loss);
      }
      row.median_max_dist = median(md);
      row.median_pattern_ratio = median(pr);
      row.median_sup_flip_count = median(sf);
      row.median_final_loss = median(fl);
      res.rows.push_back(row);
      sweep_rows.push_back({fmt(w), method_tag(m), fmt(row.runs), fmt(row.median_max_dist),
                            fmt(row.median_pattern_ratio), fmt(row.median_sup_flip_count),
                            fmt(row.median_final_loss)});
      if (!ok.empty()) {
        for (std::size_t k = 0; k < ok.front()->samples.size(); ++k) {
          std::vector<double> a, b;
          for (const ResidualTrace* t : ok) {
            a.push_back(t->samples[k].max_dist);
            b.push_back(t->samples[k].pattern_ratio);
          }
          traj_rows.push_back({fmt(w), method_tag(m), fmt(ok.front()->samples[k].t),
                               fmt(median(a)), fmt(median(b))});
        }
      }
    }
  }
  csv::write_atomic(cfg.output_dir / "sweep.csv",
                    {"width", "method", "runs", "median_max_dist", "median_pattern_ratio",
                     "median_sup_flip_count", "median_final_loss"},
                    sweep_rows);
  csv::write_atomic(cfg.output_dir / "trajectories.csv",
                    {"width", "method", "t", "median_max_dist", "median_pattern_ratio"},
                    traj_rows);
  return res;
}

AuditResult run_dynamics_audit(const ExperimentConfig& cfg) {
  const Prepared p = prepare(cfg);
  const std::size_t width = cfg.widths.front();
  const std::uint64_t seed = cfg.seeds.front();
  const std::size_t n = p.ds.n();
  AuditResult res;

  TrainHooks hooks;
  hooks.gram_stride = cfg.audit_stride;
  RunOutcome run = train_run(p.ds, p.hbar_ss, {Method::kNAG, width, seed}, cfg, hooks);
  fs::create_directories(cfg.output_dir);
  json report;
  report["dataset"] = {{"name", p.ds.name()}, {"n", n}, {"d", p.ds.d()}};
  report["width"] = width;
  report["seed"] = seed;
  report["iterations"] = cfg.iterations;
  report["hyperparams"] = hyperparams_json(run.hp);
  if (!run.ok()) {
    res.diverged = true;
    res.error = run.error;
    report["error"] = run.error;
    write_json(cfg.output_dir / "audit_report.json", report);
    return res;
  }
  const ResidualTrace& tr = *run.trace;
  write_trace_csv(cfg.output_dir / ("trace_NAG_m" + std::to_string(width) + "_seed" +
                                    std::to_string(seed) + ".csv"),
                  tr);
  const HyperParams& hp = run.hp;
  const SymMatrix& h0 = *tr.gram_at(0);
  const CompanionMatrix cm = build_companion(h0, hp);

  // Concentration of H_0 around the analytic kernel at initialization.
  const Lemma4Report l4 = lemma4_check(h0, p.hbar);
  res.lemma4_ok = l4.all_ok();
  report["lemma4"] = {{"lambda", l4.lambda},
                      {"fro_gap", l4.fro_gap},
                      {"fro_limit", l4.fro_limit},
                      {"fro_ok", l4.fro_ok},
                      {"h0_lambda_min", l4.h0_lambda_min},
                      {"lmin_limit", l4.lmin_limit},
                      {"lmin_ok", l4.lmin_ok},
                      {"h0_lambda_max", l4.h0_lambda_max},
                      {"lmax_limit", l4.lmax_limit},
                      {"lmax_ok", l4.lmax_ok},
                      {"h0_kappa", l4.h0_kappa},
                      {"kappa_limit", l4.kappa_limit},
                      {"kappa_ok", l4.kappa_ok}};

  const EnvelopeParams ep = lemma3_bounds(hp.kappa_bar);
  const std::vector<EnvelopeRow> env = theorem1_envelope(tr, ep);
  std::size_t env_ok = 0;
  for (const EnvelopeRow& r : env) env_ok += r.ok ? 1 : 0;
  res.envelope_pass_rate = static_cast<double>(env_ok) / static_cast<double>(env.size());

  Vector xi_norms;
  for (const Vector& xi : tr.residuals) xi_norms.push_back(norm2(xi));

  std::vector<std::vector<std::string>> rows;
  std::size_t phi_pass = 0;
  std::size_t phi_total = 0;
  std::size_t logged = 0;
  double worst_phi = 0.0;
  try {
    for (std::size_t t = 0; t + 1 < tr.residuals.size(); ++t) {
      const SymMatrix* ht = tr.gram_at(t);
      const SymMatrix* htm1 = t == 0 ? ht : tr.gram_at(t - 1);
      if (ht == nullptr || htm1 == nullptr) continue;
      ++logged;
      const Vector zn = tr.z(t + 1);
      const Vector zc = tr.z(t);
      Decomposition dec = decompose_step(zn, zc, cm, *ht, *htm1, h0, tr.xi(t),
                                         tr.xi(static_cast<std::ptrdiff_t>(t) - 1));
      res.max_bottom_half = std::max(res.max_bottom_half, dec.bottom_max);
      // Re-assemble z_{t+1} from M z_t + [psi + phi; 0].
      const Vector mz = cm.apply(zc);
      double num = 0.0;
      for (std::size_t i = 0; i < 2 * n; ++i) {
        const double rebuilt = mz[i] + (i < n ? dec.psi[i] + dec.phi[i] : 0.0);
        num += (zn[i] - rebuilt) * (zn[i] - rebuilt);
      }
      const double scale = std::max(norm2(zn), norm2(mz));
      const double rel = scale > 0.0 ? std::sqrt(num) / scale : std::sqrt(num);
      res.max_identity_residual = std::max(res.max_identity_residual, rel);

      PhiBoundContext ctx{t, xi_norms, tr.sup_flips[t + 1], width, n, hp.eta, hp.beta};
      const PhiBoundResult pb = check_phi_bound(dec, ctx);
      if (t >= 1) {
        phi_pass += pb.pass_count;
        phi_total += pb.pass.size();
        worst_phi = std::max(worst_phi, pb.worst_ratio);
      }
      rows.push_back({fmt(t), fmt(norm2(dec.psi)), fmt(norm2(dec.phi)), fmt(norm2(dec.mu)),
                      fmt(pb.pass_count), fmt(env[t].bound), fmt(env[t].value),
                      env[t].ok ? "1" : "0"});
    }
  } catch (const InconsistencyError& e) {
    res.identities_ok = false;
    res.error = e.what();
    report["error"] = e.what();
  }
  if (res.max_identity_residual > 1e-9 || res.max_bottom_half > kBottomHalfTolerance) {
    res.identities_ok = false;
  }
  res.phi_pass_rate =
      phi_total > 0 ? static_cast<double>(phi_pass) / static_cast<double>(phi_total) : 1.0;
  csv::write_atomic(cfg.output_dir / "decomposition.csv", decomposition_columns(), rows);

  report["decomposition"] = {{"logged_steps", logged},
                             {"max_identity_residual", res.max_identity_residual},
                             {"max_bottom_half", res.max_bottom_half},
                             {"identities_ok", res.identities_ok},
                             {"phi_bound_pass_rate", res.phi_pass_rate},
                             {"phi_bound_checked_from", 1},
                             {"phi_bound_worst_ratio", worst_phi}};
  report["theorem1_envelope"] = {{"gamma", ep.gamma},
                                 {"rho", ep.rho},
                                 {"pass_rate", res.envelope_pass_rate},
                                 {"max_value_over_bound", [&] {
                                    double w = 0.0;
                                    for (const EnvelopeRow& r : env) w = std::max(w, r.value / r.bound);
                                    return w;
                                  }()}};

  const WeightDistanceReport wd = weight_distance_envelope(tr, ep, hp.lambda);
  res.weight_distance_ok = wd.ok;
  report["weight_distance"] = {{"bound", wd.bound},
                               {"max_measured", wd.max_measured},
                               {"ok", wd.ok}};

  // Supporting lemmas along the trajectory.
  std::size_t flip_ok = 0;
  double radius = 0.0;
  for (std::size_t t = 0; t < tr.sup_flips.size(); ++t) {
    radius = std::max(radius, tr.max_dist[t]);
    if (static_cast<double>(tr.sup_flips[t]) <= 4.0 * static_cast<double>(width) * radius) {
      ++flip_ok;
    }
  }
  report["flip_bound"] = {{"sup_flip_count_final", tr.sup_flips.back()},
                          {"bound_final", 4.0 * static_cast<double>(width) * radius},
                          {"pass_rate", static_cast<double>(flip_ok) /
                                            static_cast<double>(tr.sup_flips.size())}};
  std::size_t drift_ok = 0;
  double drift_worst = 0.0;
  for (std::size_t k = 0; k < tr.gram_steps.size(); ++k) {
    const GramDrift g = gram_drift(tr.grams[k], h0, tr.max_dist[tr.gram_steps[k]], n);
    drift_ok += g.ok ? 1 : 0;
    if (g.bound > 0.0) drift_worst = std::max(drift_worst, g.measured / g.bound);
  }
  report["gram_drift"] = {{"snapshots", tr.gram_steps.size()},
                          {"pass_rate", static_cast<double>(drift_ok) /
                                            static_cast<double>(tr.gram_steps.size())},
                          {"worst_ratio", drift_worst}};
  const InitResidualReport ir = init_residual_check(tr.xi(0), n, width);
  report["init_residual"] = {{"norm_sq", ir.norm_sq},
                             {"reference", ir.reference},
                             {"ratio", ir.ratio},
                             {"delta", 0.1}};
  const WidthRequirement wr = width_requirement(hp, n);
  report["width_requirement"] = {{"lambda_pow2_form", wr.lambda_pow2},
                                 {"lambda_pow4_form", wr.lambda_pow4},
                                 {"width", width}};

  // Linear predictor seeded with the linearized first iterate.
  const Vector pred = linearized_trajectory(cm, tr.xi(0), tr.iterations());
  Vector actual;
  std::vector<std::vector<std::string>> prow;
  for (std::size_t t = 0; t <= tr.iterations(); ++t) {
    actual.push_back(tr.z_norm(t));
    prow.push_back({fmt(t), fmt(pred[t]), fmt(actual[t])});
  }
  csv::write_atomic(cfg.output_dir / "predictor.csv", {"t", "predicted_norm", "actual_norm"},
                    prow);
  res.predictor_deviation = relative_deviation(pred, actual, cfg.predictor_horizon);
  report["linear_predictor"] = {{"horizon", cfg.predictor_horizon},
                                {"relative_deviation", res.predictor_deviation}};
  write_json(cfg.output_dir / "audit_report.json", report);
  return res;
}

}  // namespace nagntk::lab
