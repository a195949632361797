// Acceptance suite: one PASS/FAIL line per numbered criterion.
//
//   nagntk_acceptance            run every criterion
//   nagntk_acceptance 4 7 11     run a subset
//
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lab/config.h"
#include "lab/experiments.h"
#include "nagntk/data.h"
#include "nagntk/dynamics.h"
#include "nagntk/errors.h"
#include "nagntk/linalg.h"
#include "nagntk/metrics.h"
#include "nagntk/network.h"
#include "nagntk/ntk.h"
#include "nagntk/optimizers.h"
#include "support/fd.h"
#include "support/oracles.h"

#ifndef NAGNTK_SAMPLE_CSV
#error "NAGNTK_SAMPLE_CSV must point at data/clusters.csv"
#endif

namespace nagntk::acceptance {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// printf into a std::string.
template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

fs::path scratch(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "nagntk_acceptance" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

HyperParams table1(const Dataset& ds, Method m) {
  return derive_hyperparams(spectrum_summary(analytic_ntk(ds)), m);
}

Dataset sample_csv() {
  CsvOptions opts;
  opts.label_column = -1;
  opts.mode = LabelMode::kClassification;
  opts.positive_class = 0.0;
  return load_csv(NAGNTK_SAMPLE_CSV, opts);
}

// 1. beta = 0 momentum runs are bitwise GD; the two NAG forms agree.
Outcome optimizer_identities() {
  bool bitwise = true;
  {
    const Dataset ds = synthetic(30, 8, 11);
    const HyperParams gd = table1(ds, Method::kGD);
    NetworkState a = NetworkState::init(256, 8, 5), b = a, c = a, e = a;
    OptimizerState oa(gd, a);
    OptimizerState ob(manual_hyperparams(Method::kHB, gd.eta, 0.0), b);
    OptimizerState oc(manual_hyperparams(Method::kNAG, gd.eta, 0.0), c);
    OptimizerState oe(manual_hyperparams(Method::kNAG, gd.eta, 0.0), e, NagForm::kOneLine);
    for (int k = 0; k < 100 && bitwise; ++k) {
      step_gd(a, oa, ds);
      step_hb(b, ob, ds);
      step_nag(c, oc, ds);
      step_nag_oneline(e, oe, ds);
      bitwise = a.weights() == b.weights() && a.weights() == c.weights() &&
                a.weights() == e.weights();
    }
  }
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const Dataset ds = synthetic(20 + 5 * k, 4 + k, 100 + k);
    const HyperParams hp = table1(ds, Method::kNAG);
    NetworkState a = NetworkState::init(256, ds.d(), 7 * k + 1), b = a;
    OptimizerState two(hp, a), one(hp, b, NagForm::kOneLine);
    for (int t = 0; t < 200; ++t) {
      step_nag(a, two, ds);
      step_nag_oneline(b, one, ds);
    }
    const Matrix wa = a.weights(), wb = b.weights();
    double diff = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < wa.size(); ++j) {
      diff = std::max(diff, std::fabs(wa.data()[j] - wb.data()[j]));
      scale = std::max(scale, std::fabs(wa.data()[j]));
    }
    worst = std::max(worst, diff / scale);
  }
  return {bitwise && worst <= 1e-9,
          fmt("beta=0 HB/NAG bitwise GD over 100 steps: %s; two-step vs one-line worst "
              "relative max-entry deviation %.2e over 10 pairs (limit 1e-9)",
              bitwise ? "yes" : "NO", worst)};
}

// 2. Analytic gradient against central finite differences.
Outcome gradient_correctness() {
  Rng rng(2024);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const Dataset ds = synthetic(8 + p % 5, 3 + p % 4, 500 + p);
    NetworkState s = NetworkState::init(32 + 8 * p, ds.d(), p);
    // Move away from initialization so the point is generic.
    OptimizerState os(manual_hyperparams(Method::kGD, 0.05, 0.0), s);
    for (int k = 0; k < 3; ++k) step_gd(s, os, ds);
    const auto r = oracle::finite_difference_check(s, ds, 10, rng);
    worst = std::max(worst, r.max_rel_error);
    checked += r.checked;
  }
  return {worst <= 1e-5 && checked == 200,
          fmt("worst relative error %.2e over %zu kink-safe coordinates at 20 points "
              "(limit 1e-5)", worst, checked)};
}

// 3. NTK closed form and positivity.
Outcome analytic_ntk_values() {
  bool diag = true;
  double lmin_worst = std::numeric_limits<double>::infinity();
  std::size_t datasets = 0;
  auto check = [&](const Dataset& ds) {
    const SymMatrix h = analytic_ntk(ds);
    for (std::size_t i = 0; i < ds.n(); ++i) diag = diag && h(i, i) == 0.5;
    lmin_worst = std::min(lmin_worst, spectrum_summary(h, true).lambda_min);
    ++datasets;
  };
  for (std::uint64_t s = 0; s < 6; ++s) check(synthetic(20 + 30 * s, 2 + 3 * s, s));
  check(synthetic(100, 10, 0));
  check(sample_csv());
  const double a = std::numbers::pi / 3.0;
  const SymMatrix h = analytic_ntk(Matrix{{1.0, 0.0}, {std::cos(a), std::sin(a)}});
  const double err = std::fabs(h(0, 1) - 1.0 / 6.0);
  return {diag && err <= 1e-12 && lmin_worst > 0.0,
          fmt("diagonal exactly 0.5: %s; |H(u=0.5) - 1/6| = %.1e; min lambda_min over %zu "
              "datasets %.3e", diag ? "yes" : "NO", err, datasets, lmin_worst)};
}

// 4. Concentration of the initial Gram matrix.
Outcome ntk_concentration() {
  const Dataset ds = synthetic(32, 32, 0);
  const SymMatrix hbar = analytic_ntk(ds);
  std::vector<double> medians;
  std::size_t all_four = 0;
  for (int p = 10; p <= 15; ++p) {
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SymMatrix h0 =
          empirical_gram(NetworkState::init(std::size_t{1} << p, ds.d(), seed), ds.features());
      const Lemma4Report rep = lemma4_check(h0, hbar);
      gaps.push_back(rep.fro_gap);
      if (p == 15 && rep.all_ok()) ++all_four;
    }
    medians.push_back(median(gaps));
  }
  bool decreasing = true, ratios_ok = true;
  std::ostringstream rs;
  for (std::size_t k = 1; k < medians.size(); ++k) {
    const double r = medians[k] / medians[k - 1];
    decreasing = decreasing && medians[k] < medians[k - 1];
    ratios_ok = ratios_ok && r >= 0.6 && r <= 0.85;
    rs << (k > 1 ? " " : "") << fmt("%.3f", r);
  }
  return {decreasing && ratios_ok && all_four >= 4,
          fmt("median gaps %.4f -> %.4f, strictly decreasing: %s; ratios [%s] in "
              "[0.6, 0.85]: %s; all four inequalities at 2^15 on %zu/5 seeds",
              medians.front(), medians.back(), decreasing ? "yes" : "NO", rs.str().c_str(),
              ratios_ok ? "yes" : "NO", all_four)};
}

// 5. Spectrum of the companion matrix and the power bound on M^k.
Outcome spectral_structure() {
  Rng rng(77);
  double eig_err = 0.0, mag_err = 0.0;
  std::size_t violations = 0, complex_blocks = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 19;
    const double lmin = 0.01 + 0.3 * rng.uniform();
    const double lmax = lmin * (1.0 + 50.0 * rng.uniform());
    Vector lam(n);
    lam[0] = lmin;
    lam[n - 1] = lmax;
    for (std::size_t i = 1; i + 1 < n; ++i) lam[i] = lmin + (lmax - lmin) * rng.uniform();
    const SymMatrix h(oracle::random_psd(lam, rng));
    const double eta = (0.1 + 0.9 * rng.uniform()) / lmax;
    const double r = std::sqrt(eta * lmin);
    const double floor = (1 - r) / (1 + r);
    const double beta = floor + (1 - floor) * 0.99 * rng.uniform();
    const CompanionMatrix cm = build_companion(h, Method::kNAG, eta, beta);

    // Match every dense eigenvalue to a distinct block root.
    std::vector<std::complex<double>> roots;
    for (const BlockRoots& b : block_spectrum(cm)) {
      roots.push_back(b.z1);
      roots.push_back(b.z2);
      if (b.delta <= 0.0) {
        ++complex_blocks;
        mag_err = std::max(mag_err, std::fabs(std::abs(b.z1) - std::sqrt(beta * (1 - eta * b.lambda))));
        mag_err = std::max(mag_err, std::fabs(std::abs(b.z2) - std::sqrt(beta * (1 - eta * b.lambda))));
      }
    }
    std::vector<bool> used(roots.size(), false);
    for (const auto& ev : oracle::general_eigenvalues(cm.dense())) {
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < roots.size(); ++k) {
        if (!used[k] && std::abs(roots[k] - ev) < dist) {
          dist = std::abs(roots[k] - ev);
          best = k;
        }
      }
      used[best] = true;
      eig_err = std::max(eig_err, dist);
    }

    const Lemma2Constant c = lemma2_constant(h, eta, beta);
    Vector v(2 * n);
    for (double& x : v) x = rng.normal();
    const double v0 = norm2(v);
    for (int k = 1; k <= 200; ++k) {
      v = cm.apply(v);
      if (norm2(v) > c.c * std::pow(c.rate, k) * v0) ++violations;
    }
  }
  return {eig_err <= 1e-8 && mag_err <= 1e-10 && violations == 0,
          fmt("dense vs block roots max error %.2e (limit 1e-8); |z| vs sqrt(beta(1-eta "
              "lambda)) max error %.2e over %zu blocks (limit 1e-10); power-bound violations "
              "%zu over 50 trials x 200 powers", eig_err, mag_err, complex_blocks, violations)};
}

// 6. Closed-form rate and constant for the NAG schedule on random spectra.
Outcome lemma3_closed_forms() {
  Rng rng(31);
  std::size_t violations = 0, trials = 0;
  double worst_rate = 0.0, worst_c = 0.0;
  for (double kb : {1.0, 2.0, 4.0, 10.0, 100.0}) {
    const EnvelopeParams ep = lemma3_bounds(kb);
    for (int k = 0; k < 20; ++k) {
      const std::size_t n = 2 + rng.next_u64() % 15;
      const double lambda = 0.05 + rng.uniform();
      const double lmax = kb * lambda;
      Vector l(n);
      l[0] = lambda;
      l[n - 1] = lmax;
      for (std::size_t i = 1; i + 1 < n; ++i) l[i] = lambda + (lmax - lambda) * rng.uniform();
      const SymMatrix h(oracle::random_psd(l, rng));
      const Lemma2Constant c = lemma2_constant(h, 1.0 / (2.0 * lmax), ep.beta);
      worst_rate = std::max(worst_rate, c.rate / ep.rate_bound);
      worst_c = std::max(worst_c, c.c / ep.c_bound);
      if (c.rate > ep.rate_bound * (1 + 1e-12) || c.c > ep.c_bound * (1 + 1e-12)) ++violations;
      ++trials;
    }
  }
  return {violations == 0,
          fmt("%zu violations over %zu spectra; worst rate/bound %.4f, worst C/bound %.4f",
              violations, trials, worst_rate, worst_c)};
}

// 7 and 8 share five audited NAG runs at n = 50, d = 10, m = 8192, T = 500.
std::vector<lab::AuditResult>& audits() {
  static std::vector<lab::AuditResult> runs = [] {
    std::vector<lab::AuditResult> out;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      lab::ExperimentConfig cfg;
      cfg.methods = {Method::kNAG};
      cfg.widths = {8192};
      cfg.seeds = {seed};
      cfg.iterations = 500;
      cfg.output_dir = scratch("audit_seed" + std::to_string(seed));
      out.push_back(lab::run_dynamics_audit(cfg));
    }
    return out;
  }();
  return runs;
}

Outcome lemma1_decomposition() {
  const lab::AuditResult& a = audits().front();
  std::ostringstream others;
  for (std::size_t s = 1; s < audits().size(); ++s) {
    others << (s > 1 ? " " : "") << fmt("%.4f", audits()[s].phi_pass_rate);
  }
  const bool pass = !a.diverged && a.max_identity_residual <= 1e-9 &&
                    a.max_bottom_half <= 1e-9 && a.phi_pass_rate == 1.0;
  return {pass, fmt("seed 0: identity residual %.1e, bottom half %.1e (limits 1e-9), "
                    "phi-bound pass rate %.4f over t >= 1; seeds 1-4 pass rates [%s]",
                    a.max_identity_residual, a.max_bottom_half, a.phi_pass_rate,
                    others.str().c_str())};
}

Outcome theorem1_envelopes() {
  std::size_t ok = 0;
  std::ostringstream rs;
  for (std::size_t s = 0; s < audits().size(); ++s) {
    const lab::AuditResult& a = audits()[s];
    const bool both = !a.diverged && a.envelope_pass_rate == 1.0 && a.weight_distance_ok;
    ok += both;
    rs << (s ? " " : "") << fmt("%.3f/%s", a.envelope_pass_rate, a.weight_distance_ok ? "ok" : "x");
  }
  return {ok >= 4, fmt("envelope pass rate / weight distance per seed [%s]; both hold on "
                       "%zu/5 seeds (need 4)", rs.str().c_str(), ok)};
}

// 9. Iterations to 1e-3 of the initial loss.
Outcome acceleration_ordering() {
  struct Case {
    std::string name;
    Dataset ds;
  };
  std::vector<Case> cases;
  cases.push_back({"synthetic(100,10)", synthetic(100, 10, 0)});
  cases.push_back({"clusters.csv", sample_csv()});
  const std::size_t width = 2048, horizon = 1000;
  bool pass = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    const SpectrumSummary ss = spectrum_summary(analytic_ntk(c.ds));
    detail << (detail.tellp() > 0 ? "; " : "") << c.name << " kappa " << fmt("%.1f", ss.kappa)
           << " GD/HB/NAG iters";
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::optional<std::size_t> it[3];
      const Method ms[3] = {Method::kGD, Method::kHB, Method::kNAG};
      for (int k = 0; k < 3; ++k) {
        NetworkState s = NetworkState::init(width, c.ds.d(), seed);
        OptimizerState os(derive_hyperparams(ss, ms[k]), s);
        TrainHooks hooks;
        hooks.sample_stride = horizon;
        try {
          it[k] = iters_to_threshold(train(s, os, c.ds, horizon, hooks), 1e-3);
        } catch (const DivergenceError&) {
          it[k] = std::nullopt;
        }
      }
      auto show = [](const std::optional<std::size_t>& v) {
        return v ? std::to_string(*v) : std::string(">T");
      };
      const bool nag_lt_gd = it[2] && (!it[0] || *it[2] < *it[0]);
      const bool nag_vs_hb = it[2] && it[1] && *it[2] <= 2 * *it[1];
      pass = pass && nag_lt_gd && nag_vs_hb;
      detail << " " << show(it[0]) << "/" << show(it[1]) << "/" << show(it[2]);
    }
  }
  return {pass, detail.str() + fmt(" (m = %zu, T = %zu; need NAG < GD and NAG <= 2 HB per seed)",
                                   width, horizon)};
}

// 10. Width trends of distance and activation-pattern change.
Outcome width_trends() {
  lab::ExperimentConfig cfg;
  cfg.widths = {256, 1024, 4096, 16384};
  cfg.seeds = {0, 1, 2};
  cfg.iterations = 500;
  cfg.output_dir = scratch("sweep");
  const lab::SweepResult res = lab::run_width_sweep(cfg);
  auto row = [&](std::size_t w, Method m) -> const lab::SweepRow& {
    for (const auto& r : res.rows)
      if (r.width == w && r.method == m) return r;
    throw std::logic_error("missing sweep row");
  };
  bool pass = !res.any_diverged;
  std::ostringstream detail;
  for (Method m : cfg.methods) {
    int dist_viol = 0, ratio_viol = 0;
    for (std::size_t k = 1; k < cfg.widths.size(); ++k) {
      const auto& a = row(cfg.widths[k - 1], m);
      const auto& b = row(cfg.widths[k], m);
      dist_viol += b.median_max_dist > a.median_max_dist;
      ratio_viol += b.median_pattern_ratio > a.median_pattern_ratio;
    }
    pass = pass && dist_viol <= 1 && ratio_viol <= 1;
    detail << to_string(m) << " increases dist/ratio " << dist_viol << "/" << ratio_viol << "; ";
  }
  const auto& gd = row(16384, Method::kGD);
  const auto& hb = row(16384, Method::kHB);
  const auto& nag = row(16384, Method::kNAG);
  const bool exceeds = nag.median_max_dist > gd.median_max_dist &&
                       nag.median_pattern_ratio > gd.median_pattern_ratio;
  const bool near_hb = nag.median_max_dist <= 2 * hb.median_max_dist &&
                       nag.median_pattern_ratio <= 2 * hb.median_pattern_ratio;
  pass = pass && exceeds && near_hb;
  detail << fmt("m=16384 max_dist GD/HB/NAG %.4f/%.4f/%.4f, pattern_ratio %.5f/%.5f/%.5f",
                gd.median_max_dist, hb.median_max_dist, nag.median_max_dist,
                gd.median_pattern_ratio, hb.median_pattern_ratio, nag.median_pattern_ratio);
  return {pass, detail.str()};
}

// 11. Linear predictor improves with width.
Outcome linear_predictor_fidelity() {
  const Dataset ds = synthetic(50, 10, 0);
  const HyperParams hp = table1(ds, Method::kNAG);
  auto deviation = [&](std::size_t m, std::uint64_t seed) {
    NetworkState s = NetworkState::init(m, ds.d(), seed);
    const SymMatrix h0 = empirical_gram(s, ds.features());
    OptimizerState os(hp, s);
    TrainHooks hooks;
    hooks.sample_stride = 100;
    const ResidualTrace tr = train(s, os, ds, 100, hooks);
    const Vector pred = linearized_trajectory(build_companion(h0, hp), tr.xi(0), 100);
    Vector act;
    for (std::size_t t = 0; t <= 100; ++t) act.push_back(tr.z_norm(t));
    return relative_deviation(pred, act, 100);
  };
  bool pass = true;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double small = deviation(1024, seed), large = deviation(16384, seed);
    pass = pass && large < small;
    detail << (seed ? "; " : "") << fmt("seed %llu %.4f -> %.4f",
                                        static_cast<unsigned long long>(seed), small, large);
  }
  return {pass, "relative deviation m=1024 -> m=16384: " + detail.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nagntk::acceptance

int main(int argc, char** argv) {
  using namespace nagntk::acceptance;
  const std::vector<Criterion> all{
      {1, "optimizer identities", optimizer_identities},
      {2, "gradient correctness", gradient_correctness},
      {3, "analytic NTK values", analytic_ntk_values},
      {4, "NTK concentration", ntk_concentration},
      {5, "spectral structure", spectral_structure},
      {6, "NAG rate closed forms", lemma3_closed_forms},
      {7, "residual decomposition", lemma1_decomposition},
      {8, "convergence envelopes", theorem1_envelopes},
      {9, "acceleration ordering", acceleration_ordering},
      {10, "width trends", width_trends},
      {11, "linear predictor fidelity", linear_predictor_fidelity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d  %-26s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed;
}
