#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "srblab/error.hpp"
#include "srblab/linalg.hpp"
#include "srblab/map_families.hpp"
#include "srblab/rng.hpp"

namespace srblab {

enum class MapFamily { doubling, linear_circle, tent, quadratic, perturbed_circle, viana };

std::string_view family_name(MapFamily family);
std::optional<MapFamily> parse_family(std::string_view name);

// Points closer than this to the critical set are refused by log_jacobian.
inline constexpr double kNearCriticalFloor = 1e-15;

// Constants of the non-degeneracy conditions on the critical set.
struct NondegeneracyParams {
  double B = 1.0;
  double beta = 1.0;
  // Pair checks use dist(x, y) < pair_separation * dist(x, C).
  static constexpr double pair_separation = 0.5;

  void validate() const;
};

// Viana skew product parameters. b(theta) = sin(2 pi theta) is fixed. When a0
// is empty the Misiurewicz parameter is used. When half_width is empty the
// fiber interval I = [-w, w] is chosen so that the map sends S^1 x I into its
// interior.
struct VianaParams {
  std::optional<double> a0;
  double alpha = 0.01;
  int d = 16;
  std::optional<double> half_width;
};

// A smooth (or piecewise smooth) map of an interval, the circle or the
// cylinder S^1 x I, with its differential and critical-set geometry.
// Immutable; all member functions are safe to call concurrently.
class MapSystem {
 public:
  using Rule = std::variant<families::LinearCircle, families::Tent, families::Quadratic,
                            families::PerturbedCircle, families::Viana>;

  static MapSystem doubling();
  static MapSystem linear_circle(int d);
  static MapSystem tent(double slope);
  static MapSystem quadratic(double a);
  static MapSystem perturbed_circle(double t);
  static MapSystem viana(const VianaParams& params = {});

  MapFamily family() const noexcept { return family_; }
  std::string_view name() const { return family_name(family_); }
  const Domain& domain() const noexcept { return domain_; }
  int dimension() const noexcept { return domain_.dimension(); }
  const Rule& rule() const noexcept { return rule_; }

  // Named parameters in a stable order (e.g. {"slope", 1.5}).
  std::vector<std::pair<std::string, double>> parameters() const;

  // f(x). Throws DomainError if x lies outside the declared domain.
  Point eval(const Point& p) const;
  // f(x) without the domain check; callers guarantee p is in the domain.
  Point apply(const Point& p) const noexcept;

  Matrix2 differential(const Point& p) const noexcept;
  // det Df(x); f'(x) in dimension one.
  double jacobian_det(const Point& p) const noexcept;
  // ||Df(x)^{-1}||, +inf on the critical set.
  double inverse_norm(const Point& p) const noexcept;
  // ||Df(x)||.
  double derivative_norm(const Point& p) const noexcept;

  // log|det Df(x)|. Throws NearCriticalError within kNearCriticalFloor of C.
  double log_jacobian(const Point& p) const;

  bool has_critical_set() const noexcept;
  // dist(x, C); +inf when C is empty.
  double critical_distance(const Point& p) const noexcept;
  // 1 if dist(x, C) >= delta, otherwise dist(x, C).
  double truncated_distance(const Point& p, double delta) const;
  // Critical points (dimension one) or critical fiber levels {y = c}.
  std::vector<double> critical_levels() const;

  // Lebesgue-uniform point of the domain.
  Point sample_uniform(Rng& rng) const noexcept;

  // Euclidean distance in the domain metric (circle coordinates wrap).
  double distance(const Point& p, const Point& q) const noexcept;

  // Monotone branch structure, dimension one only.
  std::size_t branch_count() const;
  Interval branch_support(std::size_t b) const;
  // Continuous extension of f on the closed branch (lift value for circles).
  double branch_value(std::size_t b, double x) const;
  double branch_slope(std::size_t b, double x) const;
  // Inverse of branch_value; y must lie in branch_image(b).
  double branch_preimage(std::size_t b, double y) const;
  Interval branch_image(std::size_t b) const;

  // Branch containing x (right-closed at the domain end).
  std::size_t branch_of(double x) const;

 private:
  MapSystem(MapFamily family, Rule rule);

  template <class Fn>
  decltype(auto) visit_1d(Fn&& fn) const;

  MapFamily family_;
  Rule rule_;
  Domain domain_;
};

// ---- inline hot paths -----------------------------------------------------

inline Point MapSystem::apply(const Point& p) const noexcept {
  return std::visit(
      [&](const auto& r) -> Point {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, families::Viana>) {
          return r.apply(p);
        } else {
          return {r.apply(p.x), 0.0};
        }
      },
      rule_);
}

inline Matrix2 MapSystem::differential(const Point& p) const noexcept {
  return std::visit(
      [&](const auto& r) -> Matrix2 {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, families::Viana>) {
          return r.jacobian(p);
        } else {
          return Matrix2::scalar(r.slope(p.x));
        }
      },
      rule_);
}

inline double MapSystem::jacobian_det(const Point& p) const noexcept {
  return std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, families::Viana>) {
          return r.jacobian(p).det();
        } else {
          return r.slope(p.x);
        }
      },
      rule_);
}

inline double MapSystem::inverse_norm(const Point& p) const noexcept {
  if (dimension() == 1) {
    const double s = std::abs(jacobian_det(p));
    return s == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / s;
  }
  return differential(p).inverse_norm();
}

inline double MapSystem::derivative_norm(const Point& p) const noexcept {
  if (dimension() == 1) return std::abs(jacobian_det(p));
  return differential(p).norm();
}

inline double MapSystem::critical_distance(const Point& p) const noexcept {
  switch (family_) {
    case MapFamily::quadratic: return std::abs(p.x);
    case MapFamily::viana: return std::abs(p.y);
    default: return std::numeric_limits<double>::infinity();
  }
}

}  // namespace srblab
