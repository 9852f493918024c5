#pragma once

// Built-in map rules. Each rule is a small immutable value with analytic
// derivatives; MapSystem dispatches over them. One-dimensional rules also
// describe their monotone branches: closed intervals on which the map has a
// continuous, strictly monotone extension (circle maps are described through
// their lift, so a branch of x -> 2x mod 1 runs continuously from 0 to 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include "srblab/linalg.hpp"

namespace srblab {

enum class DomainKind { interval, circle, cylinder };

struct Domain {
  DomainKind kind = DomainKind::interval;
  // interval: the interval itself; circle: [0, 1]; cylinder: the fiber I.
  Interval span{0.0, 1.0};

  static Domain interval(double lo, double hi) { return {DomainKind::interval, {lo, hi}}; }
  static Domain circle() { return {DomainKind::circle, {0.0, 1.0}}; }
  static Domain cylinder(Interval fiber) { return {DomainKind::cylinder, fiber}; }

  int dimension() const noexcept { return kind == DomainKind::cylinder ? 2 : 1; }

  // Lebesgue measure of the domain.
  double volume() const noexcept { return span.length(); }

  double diameter() const noexcept {
    switch (kind) {
      case DomainKind::interval: return span.length();
      case DomainKind::circle: return 0.5;
      case DomainKind::cylinder: return std::hypot(0.5, span.length());
    }
    return 0.0;
  }

  bool contains(const Point& p) const noexcept {
    switch (kind) {
      case DomainKind::interval: return span.lo <= p.x && p.x <= span.hi;
      case DomainKind::circle: return 0.0 <= p.x && p.x < 1.0;
      case DomainKind::cylinder: return 0.0 <= p.x && p.x < 1.0 && span.lo <= p.y && p.y <= span.hi;
    }
    return false;
  }
};

// x - floor(x), with the rounding case that lands on 1.0 folded back to 0.
inline double reduce_unit(double v) noexcept {
  const double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

namespace families {

constexpr double two_pi = 2.0 * std::numbers::pi;

// x -> d x (mod 1). Also backs the doubling map.
struct LinearCircle {
  int d = 2;

  Domain domain() const { return Domain::circle(); }
  double apply(double x) const noexcept { return reduce_unit(d * x); }
  double slope(double) const noexcept { return static_cast<double>(d); }
  std::vector<double> critical_points() const { return {}; }

  std::size_t branch_count() const noexcept { return static_cast<std::size_t>(d); }
  Interval branch_support(std::size_t b) const noexcept {
    return {static_cast<double>(b) / d, static_cast<double>(b + 1) / d};
  }
  double branch_value(std::size_t b, double x) const noexcept { return d * x - static_cast<double>(b); }
  double branch_slope(std::size_t, double) const noexcept { return static_cast<double>(d); }
  double branch_preimage(std::size_t b, double y) const noexcept { return (y + static_cast<double>(b)) / d; }
};

// x -> s min(x, 1 - x) on [0, 1].
struct Tent {
  double s = 2.0;

  Domain domain() const { return Domain::interval(0.0, 1.0); }
  double apply(double x) const noexcept { return s * std::min(x, 1.0 - x); }
  double slope(double x) const noexcept { return x < 0.5 ? s : -s; }
  std::vector<double> critical_points() const { return {}; }

  std::size_t branch_count() const noexcept { return 2; }
  Interval branch_support(std::size_t b) const noexcept { return b == 0 ? Interval{0.0, 0.5} : Interval{0.5, 1.0}; }
  double branch_value(std::size_t b, double x) const noexcept { return b == 0 ? s * x : s * (1.0 - x); }
  double branch_slope(std::size_t b, double) const noexcept { return b == 0 ? s : -s; }
  double branch_preimage(std::size_t b, double y) const noexcept { return b == 0 ? y / s : 1.0 - y / s; }
};

// q(x) = a - x^2 on its invariant interval [-beta, beta], beta the
// orientation-preserving fixed point modulus (1 + sqrt(1 + 4a)) / 2.
struct Quadratic {
  double a = 2.0;
  double beta = 2.0;

  static Quadratic with(double a) { return {a, 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * a))}; }

  Domain domain() const { return Domain::interval(-beta, beta); }
  double apply(double x) const noexcept { return std::clamp(a - x * x, -beta, beta); }
  double slope(double x) const noexcept { return -2.0 * x; }
  std::vector<double> critical_points() const { return {0.0}; }

  std::size_t branch_count() const noexcept { return 2; }
  Interval branch_support(std::size_t b) const noexcept { return b == 0 ? Interval{-beta, 0.0} : Interval{0.0, beta}; }
  double branch_value(std::size_t, double x) const noexcept { return a - x * x; }
  double branch_slope(std::size_t, double x) const noexcept { return -2.0 * x; }
  double branch_preimage(std::size_t b, double y) const noexcept {
    const double r = std::sqrt(std::max(0.0, a - y));
    return b == 0 ? -r : r;
  }
};

// f_t(x) = 2x + t sin(2 pi x) / (2 pi) (mod 1); a degree-two expanding circle
// map for |t| < 2. Branch inverses have no closed form (safeguarded Newton).
struct PerturbedCircle {
  double t = 0.0;

  Domain domain() const { return Domain::circle(); }
  double lift(double x) const noexcept { return 2.0 * x + t * std::sin(two_pi * x) / two_pi; }
  double apply(double x) const noexcept { return reduce_unit(lift(x)); }
  double slope(double x) const noexcept { return 2.0 + t * std::cos(two_pi * x); }
  std::vector<double> critical_points() const { return {}; }

  std::size_t branch_count() const noexcept { return 2; }
  Interval branch_support(std::size_t b) const noexcept { return b == 0 ? Interval{0.0, 0.5} : Interval{0.5, 1.0}; }
  double branch_value(std::size_t b, double x) const noexcept { return lift(x) - static_cast<double>(b); }
  double branch_slope(std::size_t, double x) const noexcept { return slope(x); }
  double branch_preimage(std::size_t b, double y) const noexcept {
    // Increasing branch: Newton steps kept inside a shrinking bracket.
    double lo = branch_support(b).lo;
    double hi = branch_support(b).hi;
    double x = std::clamp(lo + 0.5 * (y - branch_value(b, lo)), lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double r = branch_value(b, x) - y;
      if (r == 0.0) return x;
      if (r < 0.0) lo = x; else hi = x;
      double next = x - r / slope(x);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return next;
      x = next;
    }
    return x;
  }
};

// (theta, x) -> (d theta mod 1, a0 + alpha sin(2 pi theta) - x^2) on S^1 x I.
struct Viana {
  double a0 = 1.5;
  double alpha = 0.01;
  int d = 16;
  double half_width = 1.7;  // I = [-half_width, half_width]

  Domain domain() const { return Domain::cylinder({-half_width, half_width}); }

  Point apply(const Point& p) const noexcept {
    const double fiber = a0 + alpha * std::sin(two_pi * p.x) - p.y * p.y;
    return {reduce_unit(d * p.x), std::clamp(fiber, -half_width, half_width)};
  }

  Matrix2 jacobian(const Point& p) const noexcept {
    return {static_cast<double>(d), 0.0, two_pi * alpha * std::cos(two_pi * p.x), -2.0 * p.y};
  }
};

}  // namespace families
}  // namespace srblab
