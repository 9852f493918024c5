#include "srblab/nondegeneracy.hpp"

#include <vector>

#include "srblab/parallel.hpp"

namespace srblab {

namespace {

struct Local {
  ProbeWitness c1, c2, c3;
  bool skipped = false;
};

double log_inverse_norm(const MapSystem& map, const Point& p) { return std::log(map.inverse_norm(p)); }

double log_det(const MapSystem& map, const Point& p) { return std::log(std::abs(map.jacobian_det(p))); }

// A partner point inside the domain at distance < radius from x.
Point partner(const MapSystem& map, const Point& x, double radius, Rng& rng) {
  const Domain& dom = map.domain();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double r = radius * (0.05 + 0.9 * rng.uniform());
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Point y = x;
    if (dom.dimension() == 2 && rng.uniform() < 0.5) {
      y.y += sign * r;
    } else {
      y.x += sign * r;
      if (dom.kind != DomainKind::interval) y.x = reduce_unit(y.x);
    }
    if (dom.contains(y)) return y;
  }
  return x;
}

void keep_worst(ProbeWitness& best, const ProbeWitness& candidate) {
  if (candidate.ratio > best.ratio) best = candidate;
}

}  // namespace

NondegeneracyReport nondegeneracy_probe(const MapSystem& map, const NondegeneracyParams& params,
                                        std::span<const Point> sample, std::uint64_t seed) {
  params.validate();
  if (sample.empty()) throw ArgumentError("non-degeneracy probe needs a nonempty sample");
  const Rng root(seed, 0x6e6f6e64);
  const bool critical = map.has_critical_set();

  auto locals = parallel::map_indices<Local>(sample.size(), [&](std::size_t i) {
    Local out;
    const Point x = sample[i];
    const double raw = map.critical_distance(x);
    if (raw <= 0.0) {
      out.skipped = true;
      return out;
    }
    const double dist = std::min(raw, 1.0);
    const double scale = std::pow(dist, params.beta);

    if (critical) out.c1 = {x, x, params.B * scale / map.derivative_norm(x)};

    Rng rng = root.split(i);
    const double radius = std::min(0.5 * raw, 0.01);
    const Point y = partner(map, x, radius, rng);
    const double sep = map.distance(x, y);
    if (sep > 0.0 && map.critical_distance(y) > 0.0) {
      const double bound = params.B * sep / scale;
      const double g2 = std::abs(log_inverse_norm(map, x) - log_inverse_norm(map, y));
      const double g3 = std::abs(log_det(map, x) - log_det(map, y));
      out.c2 = {x, y, g2 / bound};
      out.c3 = {x, y, g3 / bound};
    }
    return out;
  });

  NondegeneracyReport report;
  report.samples = sample.size();
  for (const auto& l : locals) {
    if (l.skipped) {
      ++report.skipped;
      continue;
    }
    keep_worst(report.c1, l.c1);
    keep_worst(report.c2, l.c2);
    keep_worst(report.c3, l.c3);
  }
  return report;
}

}  // namespace srblab
