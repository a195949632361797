#ifndef NAGNTK_LAB_EXPERIMENTS_H_
#define NAGNTK_LAB_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lab/config.h"
#include "nagntk/metrics.h"
#include "nagntk/ntk.h"
#include "nagntk/optimizers.h"

namespace nagntk::lab {

// Column order of every trace_*.csv.
const std::vector<std::string>& trace_columns();
// Column order of decomposition.csv.
const std::vector<std::string>& decomposition_columns();

void write_trace_csv(const std::filesystem::path& path, const ResidualTrace& trace);

struct RunKey {
  Method method = Method::kNAG;
  std::size_t width = 0;
  std::uint64_t seed = 0;
};

struct RunOutcome {
  RunKey key;
  HyperParams hp;
  std::optional<ResidualTrace> trace;  // empty when the run failed
  std::optional<std::size_t> diverged_at;
  std::string error;

  bool ok() const { return trace.has_value(); }
};

// One training run from NetworkState::init(width, d, seed) with hyperparameters
// derived from the kernel spectrum. Divergence is captured in the outcome, not thrown.
RunOutcome train_run(const Dataset& ds, const SpectrumSummary& hbar,
                     const RunKey& key, const ExperimentConfig& cfg,
                     TrainHooks hooks = {});

struct ConvergenceResult {
  std::vector<RunOutcome> runs;
  bool any_diverged = false;
};

// For each (method, seed) at width cfg.widths.front(): trace_<METHOD>_seed<s>.csv,
// then summary.json (hyperparameters, iterations to threshold, final losses,
// mean/min/max loss bands) and bands.csv.
ConvergenceResult run_convergence(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t width = 0;
  Method method = Method::kNAG;
  std::size_t runs = 0;  // successful seeds
  double median_max_dist = 0.0;
  double median_pattern_ratio = 0.0;
  double median_sup_flip_count = 0.0;
  double median_final_loss = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool any_diverged = false;
};

// Every (width, method, seed): trace_<METHOD>_m<w>_seed<s>.csv, then
// sweep.csv (final medians per width and method) and trajectories.csv
// (per-t medians over seeds).
SweepResult run_width_sweep(const ExperimentConfig& cfg);

struct AuditResult {
  // Definitional identities (exit code 3 when violated).
  bool identities_ok = true;
  double max_identity_residual = 0.0;  // relative, z_{t+1} vs M z_t + mu_t
  double max_bottom_half = 0.0;
  // Probabilistic bounds (reported).
  double phi_pass_rate = 0.0;   // over t >= 1
  double envelope_pass_rate = 0.0;
  bool weight_distance_ok = false;
  bool lemma4_ok = false;
  double predictor_deviation = 0.0;
  bool diverged = false;
  std::string error;
};

// One fully logged NAG run at (cfg.widths.front(), cfg.seeds.front()):
// decomposition.csv, predictor.csv, trace csv and audit_report.json.
AuditResult run_dynamics_audit(const ExperimentConfig& cfg);

}  // namespace nagntk::lab

#endif  // NAGNTK_LAB_EXPERIMENTS_H_
