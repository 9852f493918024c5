#pragma once

#include <algorithm>
#include <cmath>
#include <span>

namespace srblab {

// A point of a one- or two-dimensional phase space. One-dimensional maps use
// x only; the cylinder maps use (x, y) = (theta, fiber coordinate).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }

  // Sorted interval spanned by two values.
  static Interval spanning(double a, double b) noexcept { return a <= b ? Interval{a, b} : Interval{b, a}; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline double overlap_length(const Interval& a, const Interval& b) noexcept {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

// Row-major 2x2 matrix; one-dimensional maps store f' in a.
struct Matrix2 {
  double a = 0.0, b = 0.0;
  double c = 0.0, d = 0.0;

  static Matrix2 scalar(double v) noexcept { return {v, 0.0, 0.0, 0.0}; }

  double det() const noexcept { return a * d - b * c; }

  Matrix2 operator*(const Matrix2& o) const noexcept {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  // Largest singular value.
  double norm() const noexcept {
    const double s = a * a + b * b + c * c + d * d;
    const double det2 = det() * det();
    const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det2));
    return std::sqrt(0.5 * (s + disc));
  }

  // ||M^{-1}|| = 1 / smallest singular value, computed as sigma_max / |det|
  // to avoid cancellation in the smaller root.
  double inverse_norm() const noexcept {
    const double dt = std::abs(det());
    if (dt == 0.0) return HUGE_VAL;
    return norm() / dt;
  }
};

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_total(std::span<const double> values) noexcept {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace srblab
