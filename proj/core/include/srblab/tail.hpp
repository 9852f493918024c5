#pragma once

#include <cstdint>
#include <vector>

#include "srblab/map_system.hpp"

namespace srblab {

struct TailParams {
  double lambda = 0.5;
  double delta = 0.1;
  double eps = 0.05;
  std::size_t n_max = 200;
  std::size_t sample_size = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TailRow {
  std::size_t n = 0;
  double frac_expansion = 0.0;
  double frac_recurrence = 0.0;
  double frac_union = 0.0;
};

// Fractions of Lebesgue-random points with E(x) > n, R(x) > n, and either.
// Censored points (including orbits that hit the near-critical floor) count
// as tail members for every n <= n_max.
struct TailProfile {
  TailParams params;
  std::vector<TailRow> rows;  // n = 1..n_max
  std::size_t censored = 0;   // points with E or R censored
};

TailProfile tail_profile(const MapSystem& map, const TailParams& params);

enum class TailModel { polynomial, stretched_exponential };

struct TailFit {
  TailModel model = TailModel::polynomial;
  double C = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // RMS of the log-fraction residuals
  std::size_t points = 0;
};

// Least squares of log f_n against log C - gamma g(n), g = log n or sqrt n,
// over the strictly positive fractions. Needs at least five of them.
TailFit fit_tail_decay(const std::vector<std::size_t>& n, const std::vector<double>& fraction, TailModel model);
TailFit fit_tail_decay(const TailProfile& profile, TailModel model);

}  // namespace srblab
