#pragma once

#include "srblab/grid.hpp"
#include "srblab/induced_map.hpp"

namespace srblab {

// Un-normalized invariant measure sum_{j=0}^{j_cap} f^j_*(mu_F | {tau > j})
// on an ambient grid over the map's domain. Each (mu_F bin cap cell) piece is
// split into up to 16 stratified sub-intervals; every sub-interval is carried
// along the cell itinerary and its mass spread uniformly over the image
// interval. Deficit mass is carried tau_max + 1 steps (the censoring value),
// so the total mass equals kac_mass(F, mu_F).
GridDensity spread_measure(const InducedMarkovMap& F, const GridDensity& mu_F, std::size_t ambient_bins,
                           std::size_t j_cap);

struct Normalized {
  GridDensity density;
  double mass = 0.0;
};

Normalized normalize(const GridDensity& mu);

double l1_distance(const GridDensity& a, const GridDensity& b);

}  // namespace srblab
