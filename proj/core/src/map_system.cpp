#include "srblab/map_system.hpp"

#include <algorithm>
#include <array>

#include "srblab/misiurewicz.hpp"

namespace srblab {

namespace {

constexpr std::array<std::pair<MapFamily, std::string_view>, 6> kNames{{
    {MapFamily::doubling, "doubling"},
    {MapFamily::linear_circle, "linear_circle"},
    {MapFamily::tent, "tent"},
    {MapFamily::quadratic, "quadratic"},
    {MapFamily::perturbed_circle, "perturbed_circle"},
    {MapFamily::viana, "viana"},
}};

double fixed_point_modulus(double a) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * a)); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view family_name(MapFamily family) {
  for (const auto& [f, n] : kNames)
    if (f == family) return n;
  return "unknown";
}

std::optional<MapFamily> parse_family(std::string_view name) {
  for (const auto& [f, n] : kNames)
    if (n == name) return f;
  return std::nullopt;
}

void NondegeneracyParams::validate() const {
  if (!(B > 0.0) || !(beta > 0.0)) throw ArgumentError("non-degeneracy constants need B > 0 and beta > 0");
}

MapSystem::MapSystem(MapFamily family, Rule rule)
    : family_(family), rule_(std::move(rule)) {
  domain_ = std::visit([](const auto& r) { return r.domain(); }, rule_);
}

MapSystem MapSystem::doubling() { return {MapFamily::doubling, families::LinearCircle{2}}; }

MapSystem MapSystem::linear_circle(int d) {
  if (d < 2) throw ArgumentError("linear circle map needs d >= 2, got " + std::to_string(d));
  return {MapFamily::linear_circle, families::LinearCircle{d}};
}

MapSystem MapSystem::tent(double slope) {
  if (!(slope > 1.0 && slope <= 2.0)) throw ArgumentError("tent slope must lie in (1, 2], got " + fmt(slope));
  return {MapFamily::tent, families::Tent{slope}};
}

MapSystem MapSystem::quadratic(double a) {
  if (!(a > 0.0 && a <= 2.0)) throw ArgumentError("quadratic parameter must lie in (0, 2], got " + fmt(a));
  return {MapFamily::quadratic, families::Quadratic::with(a)};
}

MapSystem MapSystem::perturbed_circle(double t) {
  if (!(std::abs(t) < 2.0)) throw ArgumentError("perturbed circle needs |t| < 2, got " + fmt(t));
  return {MapFamily::perturbed_circle, families::PerturbedCircle{t}};
}

MapSystem MapSystem::viana(const VianaParams& params) {
  const double a0 = params.a0 ? *params.a0 : misiurewicz_parameter();
  if (!(a0 > 1.0 && a0 < 2.0)) throw ArgumentError("viana a0 must lie in (1, 2), got " + fmt(a0));
  if (params.d < 2) throw ArgumentError("viana d must be >= 2");
  if (!(params.alpha >= 0.0)) throw ArgumentError("viana alpha must be nonnegative");
  const double a_min = a0 - params.alpha;
  const double a_max = a0 + params.alpha;
  // q maps [-w, w] into [a_min - w^2, a_max]; interior iff a_max < w < beta*(a_min).
  const double ceiling = fixed_point_modulus(a_min);
  double w = params.half_width ? *params.half_width : 0.5 * (a_max + ceiling);
  if (!(a_max < w && w < ceiling) || w >= 2.0)
    throw ArgumentError("fiber interval [-" + fmt(w) + ", " + fmt(w) +
                        "] is not mapped into its interior for a0 = " + fmt(a0) + ", alpha = " +
                        fmt(params.alpha));
  return {MapFamily::viana, families::Viana{a0, params.alpha, params.d, w}};
}

std::vector<std::pair<std::string, double>> MapSystem::parameters() const {
  return std::visit(
      [&](const auto& r) -> std::vector<std::pair<std::string, double>> {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, families::LinearCircle>) {
          return {{"d", static_cast<double>(r.d)}};
        } else if constexpr (std::is_same_v<R, families::Tent>) {
          return {{"slope", r.s}};
        } else if constexpr (std::is_same_v<R, families::Quadratic>) {
          return {{"a", r.a}};
        } else if constexpr (std::is_same_v<R, families::PerturbedCircle>) {
          return {{"t", r.t}};
        } else {
          return {{"a0", r.a0}, {"alpha", r.alpha}, {"d", static_cast<double>(r.d)},
                  {"half_width", r.half_width}};
        }
      },
      rule_);
}

Point MapSystem::eval(const Point& p) const {
  if (!domain_.contains(p)) {
    throw DomainError("point (" + fmt(p.x) + ", " + fmt(p.y) + ") outside the domain of " +
                      std::string(name()));
  }
  return apply(p);
}

double MapSystem::log_jacobian(const Point& p) const {
  const double dist = critical_distance(p);
  if (dist < kNearCriticalFloor) throw NearCriticalError(dist);
  return std::log(std::abs(jacobian_det(p)));
}

bool MapSystem::has_critical_set() const noexcept {
  return family_ == MapFamily::quadratic || family_ == MapFamily::viana;
}

double MapSystem::truncated_distance(const Point& p, double delta) const {
  if (!(delta > 0.0)) throw ArgumentError("truncation radius must be positive");
  const double dist = critical_distance(p);
  return dist >= delta ? 1.0 : dist;
}

std::vector<double> MapSystem::critical_levels() const {
  if (has_critical_set()) return {0.0};
  return {};
}

Point MapSystem::sample_uniform(Rng& rng) const noexcept {
  switch (domain_.kind) {
    case DomainKind::interval: return {rng.uniform(domain_.span.lo, domain_.span.hi), 0.0};
    case DomainKind::circle: return {rng.uniform(), 0.0};
    case DomainKind::cylinder: {
      const double theta = rng.uniform();
      return {theta, rng.uniform(domain_.span.lo, domain_.span.hi)};
    }
  }
  return {};
}

double MapSystem::distance(const Point& p, const Point& q) const noexcept {
  double dx = std::abs(p.x - q.x);
  if (domain_.kind != DomainKind::interval) dx = std::min(dx, 1.0 - dx);
  return std::hypot(dx, p.y - q.y);
}

template <class Fn>
decltype(auto) MapSystem::visit_1d(Fn&& fn) const {
  return std::visit(
      [&](const auto& r) -> decltype(fn(std::get<families::Tent>(rule_))) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, families::Viana>) {
          throw ArgumentError("branch structure is only defined for one-dimensional maps");
        } else {
          return fn(r);
        }
      },
      rule_);
}

std::size_t MapSystem::branch_count() const {
  return visit_1d([](const auto& r) { return r.branch_count(); });
}

Interval MapSystem::branch_support(std::size_t b) const {
  return visit_1d([b](const auto& r) { return r.branch_support(b); });
}

double MapSystem::branch_value(std::size_t b, double x) const {
  return visit_1d([b, x](const auto& r) { return r.branch_value(b, x); });
}

double MapSystem::branch_slope(std::size_t b, double x) const {
  return visit_1d([b, x](const auto& r) { return r.branch_slope(b, x); });
}

double MapSystem::branch_preimage(std::size_t b, double y) const {
  return visit_1d([b, y](const auto& r) { return r.branch_preimage(b, y); });
}

Interval MapSystem::branch_image(std::size_t b) const {
  const Interval s = branch_support(b);
  return Interval::spanning(branch_value(b, s.lo), branch_value(b, s.hi));
}

std::size_t MapSystem::branch_of(double x) const {
  const std::size_t n = branch_count();
  for (std::size_t b = 0; b + 1 < n; ++b)
    if (x < branch_support(b).hi) return b;
  return n - 1;
}

}  // namespace srblab
