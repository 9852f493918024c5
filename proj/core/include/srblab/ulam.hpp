#pragma once

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "srblab/grid.hpp"
#include "srblab/induced_map.hpp"

namespace srblab {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Discretized transfer step: P(i, j) = m(bin_i cap F^-1 bin_j) / m(bin_i).
struct UlamMatrix {
  Grid grid;
  SparseRows P;
  SparseRows PT;                    // transpose, for row-parallel p' = P^T p
  std::vector<double> row_deficit;  // 1 - row sum
  std::vector<bool> flagged;        // rows entirely inside the deficit
  std::size_t tau_cap = 0;

  double row_sum(std::size_t i) const;
};

// Analytic assembly from the cells' composed branch inverses.
UlamMatrix ulam_matrix(const InducedMarkovMap& F, std::size_t bins);

// One-step matrix of a one-dimensional map on its whole domain, from the
// branch inverses.
UlamMatrix ulam_matrix(const MapSystem& map, std::size_t bins);

// One-step matrix of a two-dimensional map on an nx x ny grid, from a
// stratified per-bin sample of per_axis^2 points.
UlamMatrix ulam_matrix(const MapSystem& map, std::size_t nx, std::size_t ny, std::size_t per_axis = 16);

enum class SolveMode { power, cesaro };

// Fixed density of p -> P^T p started from Lebesgue. Mass leaking into the
// deficit is renormalized each step and its cumulative size is recorded in
// GridDensity::deficit. Throws ConvergenceError after max_iters.
GridDensity stationary_density(const UlamMatrix& U, SolveMode mode = SolveMode::power, double tol = 1e-12,
                               std::size_t max_iters = 100000);

struct DensityBounds {
  double lower = 0.0;
  std::size_t lower_bin = 0;
  double upper = 0.0;
  std::size_t upper_bin = 0;
  // max over fine bins / max over pairwise-merged bins. Bounded densities stay
  // near 1; a 1/sqrt singularity at the edge gives about sqrt(2).
  double refinement_growth = 1.0;
  std::optional<double> a_priori_C0;
  double a_priori_lower = 0.0;
  bool within_a_priori = true;
  bool pass = false;
};

// Two-sided bound witnesses over non-flagged bins. pass iff the minimum is
// positive, the maximum finite, refinement_growth <= 1.1 and, when a C0 is
// supplied, 1 / (C0 m^2) <= value <= C0 with m the grid's total volume
// (C0^-1 itself is only a lower bound when m <= 1).
DensityBounds density_bounds_check(const GridDensity& rho, std::optional<double> C0 = std::nullopt);

}  // namespace srblab
