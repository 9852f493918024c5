#pragma once

#include <cstdint>
#include <span>

#include "srblab/map_system.hpp"

namespace srblab {

struct ProbeWitness {
  Point x;
  Point y;  // pair partner for (c2)/(c3); equals x for (c1)
  double ratio = 0.0;
};

// Worst observed violation ratio for each condition; <= 1 means the sample
// is consistent with the constants (B, beta).
//   c1: B dist(x,C)^beta / ||Df(x)||
//   c2: |log||Df(x)^-1|| - log||Df(y)^-1|||  dist(x,C)^beta / (B dist(x,y))
//   c3: the same with log|det Df|
// An empty critical set makes (c1) vacuous (ratio 0) and caps dist(x,C) at 1.
struct NondegeneracyReport {
  ProbeWitness c1;
  ProbeWitness c2;
  ProbeWitness c3;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // points on the critical set

  bool pass() const noexcept { return c1.ratio <= 1.0 && c2.ratio <= 1.0 && c3.ratio <= 1.0; }
};

// Pair partners are drawn at distance below min(dist(x,C)/2, 0.01) from a
// stream keyed by (seed, sample index).
NondegeneracyReport nondegeneracy_probe(const MapSystem& map, const NondegeneracyParams& params,
                                        std::span<const Point> sample, std::uint64_t seed = 0);

}  // namespace srblab
