#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srblab/entropy.hpp"
#include "srblab/experiment/config.hpp"
#include "srblab/nondegeneracy.hpp"
#include "srblab/tail.hpp"

namespace srblab::experiment {

// The tower named by the induce section: the analytic doubling tower when
// induce.exact is set, a first-return map to [delta_left, delta_right] when
// Delta is given, otherwise none.
std::optional<InducedMarkovMap> build_tower(const MapSystem& map, const ExperimentConfig& config);

EntropyConfig entropy_config(const ExperimentConfig& config);

// Each runner writes its files into config.output_dir.

// entropy.csv: one row per estimator plus header comments for kac mass,
// spread mass and the pairwise discrepancies.
EntropyReport run_entropy(const ExperimentConfig& config);

// tower.csv: cells and deficit pieces, with Delta and the verified constants
// in the header. Throws ConfigError when no tower is configured.
struct InduceResult {
  InducedMarkovMap tower;
  VerificationReport report;
};
InduceResult run_induce(const ExperimentConfig& config);

// density.csv (one-step mu_f), plus tower_density.csv and spread.csv when a
// tower is configured, and density.svg.
struct DensityResult {
  GridDensity mu_f;
  DensityBounds mu_f_bounds;
  std::optional<GridDensity> mu_F;
  std::optional<DensityBounds> mu_F_bounds;
  std::optional<GridDensity> spread;
};
DensityResult run_density(const ExperimentConfig& config);

struct FitOutcome {
  std::optional<TailFit> fit;
  std::string error;
};

// tail.csv, tail_fit.csv and tail.svg. With tail.profile_file set, the
// profile (columns n, fraction) is read from that file instead of sampled.
struct TailResult {
  TailProfile profile;
  FitOutcome polynomial;
  FitOutcome stretched;
  std::optional<TailModel> preferred;  // smaller residual
};
TailResult run_tail(const ExperimentConfig& config);
TailProfile read_tail_profile(const std::filesystem::path& path);

struct SweepRow {
  double parameter = 0.0;
  std::string status;  // ok, partial (some estimators not applicable), error
  EntropyReport report;
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double K = std::numeric_limits<double>::quiet_NaN();
  // Distances to the previous row; 0 on the first row, NaN if either side
  // is missing.
  double density_l1_prev = 0.0;  // tower densities mu_F
  double mu_l1_prev = 0.0;       // one-step ambient densities mu_f
  double tau_l1_prev = 0.0;      // return times
  std::string note;              // why a partial row is partial
  std::string error;             // set only when status is error
  std::optional<InducedMarkovMap> tower;
};

struct SweepTable {
  std::string parameter;
  std::vector<SweepRow> rows;
};

// Rows run in the worker pool; sweep.csv and sweep.svg are written after all
// rows finish.
SweepTable run_sweep(const ExperimentConfig& config);

// probe.csv: worst witness per condition.
NondegeneracyReport run_probe(const ExperimentConfig& config);

}  // namespace srblab::experiment
