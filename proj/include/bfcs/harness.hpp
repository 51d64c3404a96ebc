#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bfcs/model.hpp"
#include "bfcs/solvers.hpp"

namespace bfcs {

struct AlgorithmSpec {
  std::string id;
  SolverVariant variant = SolverVariant::Biht;
  BarrierKind barrier = BarrierKind::OneSidedL2;
  // NaN means the paper default step size (1 for l1, 1/M for l2).
  double tau = std::numeric_limits<double>::quiet_NaN();
  int max_iters = 300;
  double rel_change_tol = 1e-6;
  bool nonneg = false;
  // Relative tolerance for the TV-ball projections inside the solver.
  double projection_tol = 1e-6;
  // One run per grid point; BIHT uses the single point +inf.
  std::vector<double> epsilon_grid = {
      std::numeric_limits<double>::infinity()};
};

struct ExperimentConfig {
  GroupSignalSpec signal;  // per-trial seeds override signal.seed
  int measurements = 0;
  double noise_variance = 0.0;
  int sparsity = 1;
  int trials = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;
  std::vector<AlgorithmSpec> algorithms;
};

// The experiment configuration used throughout the evaluation: 400x100
// image, 10 groups of 9 at +/-10 then unit-normalized, 200 Gaussian
// measurements, noise variance 0.01, default step sizes, all six variants.
ExperimentConfig paper_defaults();

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

struct TrialResult {
  int trial = 0;
  std::string algorithm;
  double epsilon = 0.0;
  double tau = 0.0;
  int sparsity = 0;
  std::uint64_t seed = 0;  // trial seed; replays the trial in isolation
  bool ok = false;
  double snr_db = 0.0;
  double sign_consistency_error = 0.0;
  double support_f1 = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;  // kept out of results.csv so reruns are byte-equal
};

struct ExperimentOutcome {
  std::vector<TrialResult> rows;
  int failures = 0;
};

// Runs every (trial, algorithm, grid point) combination and writes
// results.csv, timings.csv, summary.csv, config.echo.json, and
// images/*.pgm(.meta) under out_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir);

struct AlgorithmSummary {
  std::string algorithm;
  double best_epsilon = 0.0;
  double mean_snr_db = 0.0;
  double std_snr_db = 0.0;
  double mean_sign_consistency_error = 0.0;
  double mean_support_f1 = 0.0;
  int completed = 0;
  int total = 0;
};

// Per algorithm: the grid point with the highest mean SNR over completed
// trials (ties toward smaller epsilon) and the statistics at that point.
std::vector<AlgorithmSummary> summarize(const std::vector<TrialResult>& rows);

std::vector<TrialResult> load_results_csv(const std::filesystem::path& path);

// Re-runs one recorded row from its trial seed alone.
TrialResult replay_row(const ExperimentConfig& config, const TrialResult& row);

extern const char* const kResultsHeader;
void write_results_csv(const std::filesystem::path& path,
                       const std::vector<TrialResult>& rows);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<AlgorithmSummary>& summaries);

}  // namespace bfcs
