// nagntk: convergence, width-sweep and dynamics-audit experiments for
// momentum methods on wide two-layer ReLU networks.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lab/config.h"
#include "lab/experiments.h"
#include "lab/plots.h"
#include "nagntk/errors.h"
#include "nagntk/ntk.h"

namespace {

namespace fs = std::filesystem;
using nagntk::lab::ExperimentConfig;

enum ExitCode { kOk = 0, kConfig = 1, kDiverged = 2, kAuditFailed = 3 };

// Strings collected by CLI11 before they are checked and copied into the config.
struct RawOptions {
  std::vector<std::string> methods{"GD", "HB", "NAG"};
  std::string convention = "table1";
  std::string label_mode = "classification";
  std::string csv;
};

void add_common(CLI::App* cmd, ExperimentConfig& cfg, RawOptions& raw) {
  cmd->add_option("--csv", raw.csv, "Dataset CSV (default: synthetic)");
  cmd->add_option("--label-column", cfg.data.label_column,
                  "Label column index, -1 for the last")
      ->capture_default_str();
  cmd->add_option("--label-mode", raw.label_mode, "classification, regression or raw")
      ->capture_default_str();
  cmd->add_option("--positive-class", cfg.data.positive_class,
                  "Label value mapped to +1 in classification mode")
      ->capture_default_str();
  cmd->add_option("-n,--samples", cfg.data.n, "Synthetic sample count")->capture_default_str();
  cmd->add_option("-d,--dim", cfg.data.d, "Synthetic input dimension")->capture_default_str();
  cmd->add_option("--data-seed", cfg.data.seed, "Synthetic dataset seed")->capture_default_str();
  cmd->add_option("--methods", raw.methods, "Subset of GD HB NAG")->capture_default_str();
  cmd->add_option("--seeds", cfg.seeds, "Initialization seeds")->capture_default_str();
  cmd->add_option("-T,--iterations", cfg.iterations, "Iterations per run")
      ->capture_default_str();
  cmd->add_option("--stride", cfg.stride, "Metric sampling stride")->capture_default_str();
  cmd->add_option("--lambda-convention", raw.convention, "table1 or theorem1")
      ->capture_default_str();
  cmd->add_option("--threshold", cfg.threshold,
                  "Report iterations until loss <= threshold * initial loss")
      ->capture_default_str();
  cmd->add_option("-o,--output", cfg.output_dir, "Output directory")->capture_default_str();
  cmd->add_option("-j,--workers", cfg.workers,
                  "Concurrent runs (0: NAGNTK_WORKERS or hardware threads)")
      ->capture_default_str();
}

void finalize(ExperimentConfig& cfg, const RawOptions& raw) {
  try {
    cfg.methods.clear();
    for (const std::string& m : raw.methods) cfg.methods.push_back(nagntk::parse_method(m));
    cfg.convention = nagntk::parse_convention(raw.convention);
  } catch (const nagntk::Error& e) {
    throw nagntk::lab::ConfigError(e.what());
  }
  cfg.data.label_mode = nagntk::lab::parse_label_mode(raw.label_mode);
  if (!raw.csv.empty()) cfg.data.csv = raw.csv;
  cfg.validate();
}

int converge(const ExperimentConfig& cfg) {
  const auto res = nagntk::lab::run_convergence(cfg);
  std::printf("%-4s %6s %14s %14s %10s\n", "run", "seed", "initial_loss", "final_loss",
              "iters");
  for (const auto& r : res.runs) {
    const std::string method(nagntk::to_string(r.key.method));
    if (!r.ok()) {
      std::printf("%-4s %6llu  diverged: %s\n", method.c_str(),
                  static_cast<unsigned long long>(r.key.seed), r.error.c_str());
      continue;
    }
    const auto hit = nagntk::iters_to_threshold(*r.trace, cfg.threshold);
    std::printf("%-4s %6llu %14.6e %14.6e %10s\n", method.c_str(),
                static_cast<unsigned long long>(r.key.seed), r.trace->losses.front(),
                r.trace->losses.back(), hit ? std::to_string(*hit).c_str() : "-");
  }
  std::printf("wrote %s\n", (cfg.output_dir / "summary.json").string().c_str());
  return res.any_diverged ? kDiverged : kOk;
}

int sweep(const ExperimentConfig& cfg) {
  const auto res = nagntk::lab::run_width_sweep(cfg);
  std::printf("%8s %-4s %5s %14s %14s %10s %14s\n", "width", "run", "ok", "max_dist",
              "pattern_ratio", "sup_flips", "final_loss");
  for (const auto& r : res.rows) {
    std::printf("%8zu %-4s %5zu %14.6e %14.6f %10.1f %14.6e\n", r.width,
                std::string(nagntk::to_string(r.method)).c_str(), r.runs, r.median_max_dist,
                r.median_pattern_ratio, r.median_sup_flip_count, r.median_final_loss);
  }
  std::printf("wrote %s\n", (cfg.output_dir / "sweep.csv").string().c_str());
  return res.any_diverged ? kDiverged : kOk;
}

int audit(const ExperimentConfig& cfg) {
  bool has_nag = false;
  for (auto m : cfg.methods) has_nag = has_nag || m == nagntk::Method::kNAG;
  if (!has_nag) throw nagntk::lab::ConfigError("audit needs NAG in the method set");
  const auto res = nagntk::lab::run_dynamics_audit(cfg);
  if (res.diverged) {
    std::fprintf(stderr, "audit run diverged: %s\n", res.error.c_str());
    return kDiverged;
  }
  std::printf("identities           %s (max relative residual %.3e, bottom half %.3e)\n",
              res.identities_ok ? "ok" : "VIOLATED", res.max_identity_residual,
              res.max_bottom_half);
  std::printf("phi bound pass rate  %.4f\n", res.phi_pass_rate);
  std::printf("envelope pass rate   %.4f\n", res.envelope_pass_rate);
  std::printf("weight distance      %s\n", res.weight_distance_ok ? "ok" : "exceeded");
  std::printf("H0 spectrum check    %s\n", res.lemma4_ok ? "ok" : "failed");
  std::printf("predictor deviation  %.4f (first %zu iterations)\n", res.predictor_deviation,
              cfg.predictor_horizon);
  std::printf("wrote %s\n", (cfg.output_dir / "audit_report.json").string().c_str());
  if (!res.identities_ok) {
    if (!res.error.empty()) std::fprintf(stderr, "%s\n", res.error.c_str());
    return kAuditFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum methods on wide two-layer ReLU networks"};
  app.set_config("--config", "", "INI file; [converge], [sweep], [audit] sections");
  app.require_subcommand(1);

  ExperimentConfig converge_cfg;
  converge_cfg.widths = {4096};
  RawOptions converge_raw;
  auto* c = app.add_subcommand("converge", "Compare GD, HB and NAG loss curves across seeds");
  add_common(c, converge_cfg, converge_raw);
  c->add_option("-m,--width", converge_cfg.widths, "Hidden width")->capture_default_str();

  ExperimentConfig sweep_cfg;
  RawOptions sweep_raw;
  auto* s = app.add_subcommand("sweep", "Distance and activation-pattern metrics across widths");
  add_common(s, sweep_cfg, sweep_raw);
  s->add_option("--widths", sweep_cfg.widths, "Hidden widths")->capture_default_str();

  ExperimentConfig audit_cfg;
  audit_cfg.widths = {8192};
  audit_cfg.methods = {nagntk::Method::kNAG};
  RawOptions audit_raw;
  audit_raw.methods = {"NAG"};
  auto* a = app.add_subcommand("audit", "Log one NAG run and check the residual dynamics");
  add_common(a, audit_cfg, audit_raw);
  a->add_option("-m,--width", audit_cfg.widths, "Hidden width")->capture_default_str();
  a->add_option("--audit-stride", audit_cfg.audit_stride, "Gram snapshot stride")
      ->capture_default_str();
  a->add_option("--horizon", audit_cfg.predictor_horizon,
                "Linear predictor comparison horizon")
      ->capture_default_str();

  std::vector<fs::path> plot_inputs;
  fs::path plot_out = "plots";
  auto* p = app.add_subcommand("plot", "Render SVG figures from experiment CSVs");
  p->add_option("inputs", plot_inputs, "CSV files or directories");
  p->add_option("-o,--output", plot_out, "Image directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*c) {
      finalize(converge_cfg, converge_raw);
      return converge(converge_cfg);
    }
    if (*s) {
      finalize(sweep_cfg, sweep_raw);
      return sweep(sweep_cfg);
    }
    if (*a) {
      finalize(audit_cfg, audit_raw);
      return audit(audit_cfg);
    }
    if (*p) {
      const auto images = nagntk::lab::emit_plots(plot_inputs, plot_out);
      if (images.empty()) {
        std::fprintf(stderr, "warning: no plottable CSV inputs, nothing written\n");
      }
      for (const auto& img : images) std::printf("wrote %s\n", img.string().c_str());
      return kOk;
    }
  } catch (const nagntk::lab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const nagntk::lab::PlotError& e) {
    std::fprintf(stderr, "plot error: %s\n", e.what());
    return kConfig;
  } catch (const nagntk::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kOk;
}
