#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srblab/grid.hpp"
#include "srblab/induced_map.hpp"
#include "srblab/ulam.hpp"
#include "srblab/verification.hpp"

namespace srblab {

struct Integral {
  double value = 0.0;
  double bound = 0.0;  // deficit / truncation error bar
};

// int_Delta log|DF| dmu_F over the cells; deficit mass is excluded and
// bounded by mu_F(def) C (tau_max + 1 + r / (1 - r)), C = log sup J_f.
Integral entropy_induced(const VerifiedTower& F, const GridDensity& mu_F);

// h_induced / mass. Throws ArgumentError for mass <= 0.
double entropy_abramov(double h_induced, double mass);

struct PesinIntegral {
  double value = 0.0;
  double clip = 0.0;  // |contribution| dropped within the near-critical floor
};

// int log|det Df| dmu_f on the ambient grid of mu_f, with geometric
// refinement towards the critical set.
PesinIntegral entropy_pesin(const MapSystem& map, const GridDensity& mu_f);

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t orbits = 0;
  std::size_t iters = 0;
  std::size_t resampled = 0;
};

// Mean over Lebesgue-random seeds of the sum of positive finite-n exponents.
// Orbits hitting the near-critical floor are redrawn up to retry_budget
// times in total.
MonteCarlo entropy_lyapunov(const MapSystem& map, std::size_t sample_size, std::size_t n, std::uint64_t seed,
                            std::size_t retry_budget = 64);

// -(1/n) log m(P_n(x)) along the F-orbit of x. The cylinder is composed from
// the cell inverses; once it is tiny only its center and log-length are
// tracked. Throws CensoringError when the orbit enters the deficit.
double entropy_smb(const InducedMarkovMap& F, double x, std::size_t n);

// Median of entropy_smb over `seeds` Lebesgue-random starting points (points
// whose orbit is censored are redrawn).
MonteCarlo entropy_smb_median(const InducedMarkovMap& F, std::size_t n, std::size_t seeds, std::uint64_t seed);

struct QuotientCheck {
  double lambda_F = 0.0;
  double lambda_F_se = 0.0;
  double tau_bar = 0.0;
  double quotient = 0.0;
  double lambda_f = 0.0;
  double lambda_f_se = 0.0;
};

// lambda_F from F-orbit Birkhoff averages of log|DF|, tau_bar from the Kac
// integral, lambda_f from orbits of the base map.
QuotientCheck lyapunov_quotient_check(const MapSystem& map, const VerifiedTower& F, const GridDensity& mu_F,
                                      std::size_t sample_size, std::size_t n, std::uint64_t seed);

struct TransferCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double bound = 0.0;  // combined deficit and grid truncation bound
  bool pass() const noexcept { return gap <= bound + 1e-12; }
};

// lhs = int log J_F dmu_F, rhs = int log J_f dmu*_f (un-normalized spread).
TransferCheck jacobian_transfer_check(const VerifiedTower& F, const GridDensity& mu_F, const GridDensity& spread);

struct MajorantSample {
  double log_jacobian_F = 0.0;
  std::size_t tau = 1;
};

struct MajorantCheck {
  double C = 0.0;
  double worst_ratio = 0.0;
  bool pass = false;
};

MajorantCheck majorant_from_samples(double C, std::span<const MajorantSample> samples);
// C = log sup J_f over an ambient grid and all cell-sample orbit points.
MajorantCheck majorant_check(const VerifiedTower& F);

// log sup |det Df| over a regular grid of the domain.
double log_sup_jacobian(const MapSystem& map);

struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double std_error = 0.0;
  double truncation_bound = 0.0;
  std::string error;
  std::size_t n_orbits = 0;
  std::size_t n_iters = 0;
  std::size_t bins = 0;
  std::size_t tau_cap = 0;

  bool ok() const noexcept { return error.empty(); }
};

struct EntropyConfig {
  std::size_t bins = 4096;          // mu_F grid over Delta
  std::size_t ambient_bins = 4096;  // mu_f and spread grids
  std::size_t plane_bins = 64;      // per axis, two-dimensional maps
  SolveMode mode = SolveMode::power;
  double tol = 1e-12;
  std::size_t max_iters = 100000;
  std::size_t sample_size = 64;
  std::size_t n_iters = 100000;
  std::size_t smb_n = 1000;
  std::size_t smb_seeds = 32;
  std::size_t retry_budget = 64;
  std::uint64_t seed = 1;
};

struct Discrepancy {
  std::string a, b;
  double value = 0.0;
};

struct EntropyReport {
  Estimate lyapunov;
  Estimate pesin;
  Estimate induced;
  Estimate abramov;
  Estimate smb;       // F-level
  Estimate smb_base;  // smb / tau_bar
  double kac = std::numeric_limits<double>::quiet_NaN();
  double kac_censored = 0.0;
  double spread_mass = std::numeric_limits<double>::quiet_NaN();
  double pesin_clip = 0.0;
  std::vector<double> exponents;  // one orbit, ascending
  std::vector<Discrepancy> discrepancies;
  // Intermediate products, kept for emission and sweep diagnostics.
  std::optional<GridDensity> mu_f;
  std::optional<GridDensity> mu_F;
  std::optional<GridDensity> spread;
  std::optional<VerificationReport> verification;

  // (method, estimate) rows in a fixed order.
  std::vector<std::pair<std::string, const Estimate*>> rows() const;
};

// Runs every estimator that applies. Per-estimator failures land in the
// Estimate's error field. Without a tower only lyapunov and pesin are filled.
EntropyReport entropy_report(const MapSystem& map, const std::optional<InducedMarkovMap>& F,
                             const EntropyConfig& config);

}  // namespace srblab
