#include "srblab/spread.hpp"

#include <cmath>

#include "srblab/parallel.hpp"

namespace srblab {

namespace {

constexpr std::size_t kStrata = 16;

void deposit(const Grid& grid, Interval image, double mass, std::vector<double>& acc) {
  if (!(image.hi > image.lo)) {
    acc[grid.x_index(image.lo)] += mass;
    return;
  }
  const double density = mass / image.length();
  const std::size_t a = grid.x_index(image.lo);
  const std::size_t b = grid.x_index(image.hi);
  if (a == b) {
    acc[a] += mass;
    return;
  }
  for (std::size_t i = a; i <= b; ++i) acc[i] += density * overlap_length(image, grid.x_bin(i));
}

// Carries one support piece with the given itinerary for `steps` pushes
// (j = 0..steps-1) and deposits its mu_F mass at every step.
void carry(const InducedMarkovMap& F, const GridDensity& mu_F, const Interval& support,
           std::span<const std::uint32_t> itinerary, std::size_t steps, const Grid& ambient,
           std::vector<double>& acc) {
  const Grid& g = mu_F.grid;
  const std::size_t first = g.x_index(support.lo);
  const std::size_t last = g.x_index(support.hi);
  for (std::size_t i = first; i <= last && i < g.nx; ++i) {
    const Interval bin = g.x_bin(i);
    const Interval piece{std::max(bin.lo, support.lo), std::min(bin.hi, support.hi)};
    if (!(piece.hi > piece.lo) || mu_F.values[i] == 0.0) continue;
    const double frac = piece.length() / bin.length();
    const auto strata = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(frac * kStrata)));
    for (std::size_t s = 0; s < strata; ++s) {
      const double lo = piece.lo + piece.length() * static_cast<double>(s) / static_cast<double>(strata);
      const double hi = s + 1 == strata ? piece.hi
                                        : piece.lo + piece.length() * static_cast<double>(s + 1) / static_cast<double>(strata);
      const double mass = mu_F.values[i] * (hi - lo);
      double a = lo, b = hi;
      for (std::size_t j = 0; j < steps; ++j) {
        deposit(ambient, Interval::spanning(a, b), mass, acc);
        if (j + 1 < steps) {
          a = F.base().branch_value(itinerary[j], a);
          b = F.base().branch_value(itinerary[j], b);
        }
      }
    }
  }
}

}  // namespace

GridDensity spread_measure(const InducedMarkovMap& F, const GridDensity& mu_F, std::size_t ambient_bins,
                           std::size_t j_cap) {
  if (j_cap < F.tau_max()) throw ArgumentError("spread_measure needs j_cap >= tau_max");
  if (ambient_bins < 1) throw ArgumentError("spread_measure needs ambient bins");
  if (mu_F.grid.dimension != 1) throw ArgumentError("mu_F must be one-dimensional");
  const Grid ambient = Grid::line(F.base().domain().span, ambient_bins);
  const std::size_t nc = F.cells().size();
  const std::size_t pieces = nc + F.deficit().size();

  // One accumulator per piece, reduced in piece order.
  const auto parts = parallel::map_indices<std::vector<double>>(
      pieces,
      [&](std::size_t k) {
        std::vector<double> acc(ambient.size(), 0.0);
        if (k < nc) {
          const TowerCell& c = F.cells()[k];
          carry(F, mu_F, c.support, c.itinerary, c.tau, ambient, acc);
        } else {
          const DeficitPiece& d = F.deficit()[k - nc];
          carry(F, mu_F, d.support, d.itinerary, F.tau_max() + 1, ambient, acc);
        }
        return acc;
      },
      1);

  std::vector<double> total(ambient.size(), 0.0);
  for (const auto& acc : parts)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += acc[i];
  for (double& v : total) v /= ambient.bin_volume();

  GridDensity out(ambient, std::move(total), Provenance::spread);
  out.tau_cap = F.tau_max();
  out.truncation_bound = deficit_error_bar(F, deficit_measure(F, mu_F));
  return out;
}

Normalized normalize(const GridDensity& mu) {
  const double mass = mu.mass();
  if (!(mass > 0.0)) throw ArgumentError("cannot normalize a measure with zero mass");
  GridDensity out = mu;
  for (double& v : out.values) v /= mass;
  out.provenance = Provenance::normalized;
  out.truncation_bound = mu.truncation_bound / mass;
  return {std::move(out), mass};
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (!(a.grid == b.grid)) throw ArgumentError("l1_distance needs identical grids");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s.value() * a.grid.bin_volume();
}

}  // namespace srblab
