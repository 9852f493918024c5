#include "srblab/orbit.hpp"

#include <bit>
#include <cmath>

namespace srblab {

namespace {

double log_inverse_norm(const MapSystem& map, const Point& p, std::size_t j) {
  const double dist = map.critical_distance(p);
  if (dist < kNearCriticalFloor) throw NearCriticalError(dist, j);
  return std::log(map.inverse_norm(p));
}

// Tracks the last n in [1, n_max] at which the running average exceeds the
// budget.
class RunningCriterion {
 public:
  explicit RunningCriterion(double budget) : budget_(budget) {}

  void push(double term) {
    sum_ += term;
    ++n_;
    if (sum_ > budget_ * static_cast<double>(n_)) last_fail_ = n_;
  }

  std::optional<std::size_t> time() const {
    if (last_fail_ == n_ && n_ > 0) return std::nullopt;
    return last_fail_ + 1;
  }

 private:
  double budget_;
  double sum_ = 0.0;
  std::size_t n_ = 0;
  std::size_t last_fail_ = 0;
};

}  // namespace

std::uint64_t point_seed(const Point& p) noexcept {
  return splitmix64(std::bit_cast<std::uint64_t>(p.x) ^ splitmix64(std::bit_cast<std::uint64_t>(p.y)));
}

double dither_in(const Interval& span, bool periodic, double x, Rng& rng) noexcept {
  const double width = span.length();
  const double v = x + (rng.uniform() - 0.5) * kDitherScale * width;
  if (periodic) return span.lo + width * reduce_unit((v - span.lo) / width);
  return std::clamp(v, span.lo, span.hi);
}

Point dither(const Domain& domain, Point p, Rng& rng) noexcept {
  switch (domain.kind) {
    case DomainKind::interval: p.x = dither_in(domain.span, false, p.x, rng); break;
    case DomainKind::circle: p.x = dither_in({0.0, 1.0}, true, p.x, rng); break;
    case DomainKind::cylinder:
      p.x = dither_in({0.0, 1.0}, true, p.x, rng);
      p.y = dither_in(domain.span, false, p.y, rng);
      break;
  }
  return p;
}

OrbitWalker::OrbitWalker(const MapSystem& map, Point start, std::uint64_t seed)
    : map_(&map), point_(start), rng_(seed, 0x6f726269) {}

OrbitWalker::OrbitWalker(const MapSystem& map, Point start) : OrbitWalker(map, start, point_seed(start)) {}

const Point& OrbitWalker::step() {
  point_ = dither(map_->domain(), map_->apply(point_), rng_);
  return point_;
}

double birkhoff_average(const MapSystem& map, Point x, const std::function<double(const Point&)>& phi,
                        std::size_t n) {
  if (n == 0) throw ArgumentError("birkhoff_average needs n >= 1");
  if (!map.domain().contains(x)) throw DomainError("birkhoff_average: start point outside the domain");
  OrbitWalker walk(map, x);
  CompensatedSum sum;
  for (std::size_t j = 0; j < n; ++j) {
    try {
      sum += phi(walk.point());
    } catch (const NearCriticalError& e) {
      throw e.at_iterate(j);
    }
    if (j + 1 < n) walk.step();
  }
  return sum.value() / static_cast<double>(n);
}

std::vector<double> lyapunov_exponents(const MapSystem& map, Point x, std::size_t n) {
  return lyapunov_exponents(map, x, n, point_seed(x));
}

std::vector<double> lyapunov_exponents(const MapSystem& map, Point x, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("lyapunov_exponents needs n >= 1");
  OrbitWalker walk(map, x, seed);
  if (map.dimension() == 1) {
    CompensatedSum sum;
    for (std::size_t j = 0; j < n; ++j) {
      const Point& p = walk.point();
      const double dist = map.critical_distance(p);
      if (dist < kNearCriticalFloor) throw NearCriticalError(dist, j);
      sum += std::log(std::abs(map.jacobian_det(p)));
      if (j + 1 < n) walk.step();
    }
    return {sum.value() / static_cast<double>(n)};
  }

  // Frame columns (u, v), started at (e_y, e_x). Each step: [u v] <- Df [u v],
  // then Gram-Schmidt; the log diagonal of R accumulates.
  double ux = 0.0, uy = 1.0, vx = 1.0, vy = 0.0;
  CompensatedSum s1, s2;
  for (std::size_t j = 0; j < n; ++j) {
    const Point& p = walk.point();
    const double dist = map.critical_distance(p);
    if (dist < kNearCriticalFloor) throw NearCriticalError(dist, j);
    const Matrix2 D = map.differential(p);
    const double au = D.a * ux + D.b * uy, bu = D.c * ux + D.d * uy;
    const double av = D.a * vx + D.b * vy, bv = D.c * vx + D.d * vy;
    const double r11 = std::hypot(au, bu);
    ux = au / r11;
    uy = bu / r11;
    const double r12 = ux * av + uy * bv;
    const double wx = av - r12 * ux, wy = bv - r12 * uy;
    // |r22| = |det(Df [u v])| / r11, exact for the triangular cocycles.
    const double r22 = std::abs(D.det()) / r11;
    const double wn = std::hypot(wx, wy);
    vx = wx / wn;
    vy = wy / wn;
    s1 += std::log(r11);
    s2 += std::log(r22);
    if (j + 1 < n) walk.step();
  }
  double l1 = s1.value() / static_cast<double>(n);
  double l2 = s2.value() / static_cast<double>(n);
  if (l1 > l2) std::swap(l1, l2);
  return {l1, l2};
}

OrbitTimes orbit_times(const MapSystem& map, Point x, double lambda, double delta, double eps,
                       std::size_t n_max, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw ArgumentError("expansion margin lambda must be positive");
  if (!(delta > 0.0) || !(eps > 0.0)) throw ArgumentError("delta and eps must be positive");
  if (n_max == 0) throw ArgumentError("n_max must be >= 1");
  RunningCriterion expansion(-0.5 * lambda);
  RunningCriterion recurrence(2.0 * eps);
  OrbitWalker walk(map, x, seed);
  for (std::size_t j = 0; j < n_max; ++j) {
    const Point& p = walk.point();
    expansion.push(log_inverse_norm(map, p, j));
    recurrence.push(-std::log(map.truncated_distance(p, delta)));
    if (j + 1 < n_max) walk.step();
  }
  return {expansion.time(), recurrence.time()};
}

std::optional<std::size_t> expansion_time(const MapSystem& map, Point x, double lambda, std::size_t n_max) {
  return orbit_times(map, x, lambda, 1.0, 1.0, n_max, point_seed(x)).expansion;
}

std::optional<std::size_t> recurrence_time(const MapSystem& map, Point x, double delta, double eps,
                                           std::size_t n_max) {
  if (!(delta > 0.0) || !(eps > 0.0)) throw ArgumentError("delta and eps must be positive");
  if (n_max == 0) throw ArgumentError("n_max must be >= 1");
  RunningCriterion recurrence(2.0 * eps);
  OrbitWalker walk(map, x);
  for (std::size_t j = 0; j < n_max; ++j) {
    const Point& p = walk.point();
    const double dist = map.critical_distance(p);
    if (dist < kNearCriticalFloor) throw NearCriticalError(dist, j);
    recurrence.push(-std::log(map.truncated_distance(p, delta)));
    if (j + 1 < n_max) walk.step();
  }
  return recurrence.time();
}

}  // namespace srblab
