#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsma/types.hpp"

namespace rsma {

enum class ExperimentKind {
  kConvergenceTrace,
  kSweepAntennas,
  kSweepUsers,
  kSweepKappa,
  kSdmaCompare,
};

enum class VariantChoice { kFull, kLowDim, kAuto, kBoth };

std::string kind_name(ExperimentKind kind);
std::string variant_choice_name(VariantChoice v);

/// Flat key-value configuration, list values comma-separated. Recognized
/// keys: experiment, K, Nt, snr_db, kappa, num_realizations, base_seed,
/// variant, eps_outer, eps_inner.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSweepAntennas;
  std::vector<int> users_list;
  std::vector<int> antennas_list;
  std::vector<double> snr_db_list;
  std::vector<double> kappa_list{0.0};
  int num_realizations = 100;
  std::uint64_t base_seed = 1;
  VariantChoice variant = VariantChoice::kAuto;
  double eps_outer = 1e-3;
  double eps_inner = 1e-3;

  void validate() const;  // throws std::invalid_argument
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Per-realization seeds: base_seed xor a splitmix hash of the coordinate
/// tuple and the realization index.
std::uint64_t derive_seed(std::uint64_t base_seed, int users, int antennas,
                          double snr_db, double kappa, int variant_id,
                          int realization);

struct ResultRow {
  int users = 0;
  int antennas = 0;
  double snr_db = 0.0;
  double kappa = 0.0;
  std::string variant;
  double mmf_nats_mean = 0.0;
  double mmf_bits_mean = 0.0;
  double secs_mean = 0.0;
  double outer_iters_mean = 0.0;
  double inner_iters_mean = 0.0;
  int n_realizations = 0;
};

struct PairedRow {
  int users = 0;
  int antennas = 0;
  double snr_db = 0.0;
  double kappa = 0.0;
  std::string variant_a, variant_b;
  double mmf_a = 0.0, mmf_b = 0.0;
  double rel_diff = 0.0;  // |a - b| / a
  double secs_a = 0.0, secs_b = 0.0;
};

struct RunRecord {
  int users = 0;
  int antennas = 0;
  double snr_db = 0.0;
  double kappa = 0.0;
  std::string variant;
  int realization = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
};

struct ExperimentResults {
  std::vector<ResultRow> rows;
  std::vector<PairedRow> paired;
  std::vector<RunRecord> runs;
  int divergences = 0;
};

/// Runs the configured experiment grid; jobs > 1 parallelizes realizations
/// within each coordinate tuple. Aggregation order is fixed by realization
/// index, so non-timing output is deterministic.
ExperimentResults run_experiment(const ExperimentConfig& cfg, int jobs = 1,
                                 const std::string& trace_dir = "");

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
void write_paired_csv(const std::vector<PairedRow>& rows, const std::string& path);
void write_manifest(const ExperimentConfig& cfg, const ExperimentResults& results,
                    const std::string& path);

}  // namespace rsma
