#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "srblab/map_system.hpp"

namespace srblab {

// Walks an orbit of a map. After every step a perturbation of relative size
// 2^-40 (of the domain width) is added. Without it, maps that shift binary
// digits (doubling, d = 16 bases, slope-2 tents) collapse onto 0 within ~53
// steps in binary64. The perturbation stream is keyed by the seed, so walks
// are reproducible.
class OrbitWalker {
 public:
  OrbitWalker(const MapSystem& map, Point start, std::uint64_t seed);
  // Seed derived from the bits of the starting point.
  OrbitWalker(const MapSystem& map, Point start);

  const Point& point() const noexcept { return point_; }
  const Point& step();

 private:
  const MapSystem* map_;
  Point point_;
  Rng rng_;
};

inline constexpr double kDitherScale = 0x1.0p-40;

// Applies the perturbation to an image point of f (or of an induced map on
// the interval `span`).
Point dither(const Domain& domain, Point p, Rng& rng) noexcept;
double dither_in(const Interval& span, bool periodic, double x, Rng& rng) noexcept;

std::uint64_t point_seed(const Point& p) noexcept;

// (1/n) sum_{j<n} phi(f^j x). A NearCriticalError raised by phi is rethrown
// with the iterate index.
double birkhoff_average(const MapSystem& map, Point x, const std::function<double(const Point&)>& phi,
                        std::size_t n);

// Finite-n Lyapunov exponents in ascending order: log|f'| averages in
// dimension one, QR-reorthogonalized products in dimension two.
std::vector<double> lyapunov_exponents(const MapSystem& map, Point x, std::size_t n);
std::vector<double> lyapunov_exponents(const MapSystem& map, Point x, std::size_t n, std::uint64_t seed);

// Smallest N <= n_max such that the running average over the first n steps
// of log||Df^-1|| stays <= -lambda/2 for every n in [N, n_max]; nullopt
// (censored) if there is none.
std::optional<std::size_t> expansion_time(const MapSystem& map, Point x, double lambda, std::size_t n_max);

// Same shape with summands -log dist_delta(f^j x, C) and budget 2 eps.
std::optional<std::size_t> recurrence_time(const MapSystem& map, Point x, double delta, double eps,
                                           std::size_t n_max);

struct OrbitTimes {
  std::optional<std::size_t> expansion;
  std::optional<std::size_t> recurrence;
};

// Both times from a single orbit walk.
OrbitTimes orbit_times(const MapSystem& map, Point x, double lambda, double delta, double eps,
                       std::size_t n_max, std::uint64_t seed);

}  // namespace srblab
