#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "srblab/error.hpp"
#include "srblab/map_system.hpp"
#include "srblab/misiurewicz.hpp"
#include "srblab/nondegeneracy.hpp"

using namespace srblab;

namespace {

std::vector<MapSystem> every_family() {
  return {MapSystem::doubling(),          MapSystem::linear_circle(3),      MapSystem::tent(2.0),
          MapSystem::tent(1.5),           MapSystem::quadratic(2.0),        MapSystem::quadratic(1.7),
          MapSystem::perturbed_circle(0.1), MapSystem::viana()};
}

}  // namespace

TEST(Eval, DoublingAndQuadratic) {
  EXPECT_DOUBLE_EQ(MapSystem::doubling().eval({0.3, 0}).x, 0.6);
  EXPECT_DOUBLE_EQ(MapSystem::quadratic(2.0).eval({0.0, 0}).x, 2.0);
}

TEST(Eval, CircleReductionMapsOneToZero) {
  EXPECT_EQ(MapSystem::doubling().eval({0.5, 0}).x, 0.0);
  EXPECT_EQ(MapSystem::linear_circle(3).eval({2.0 / 3.0 + 1e-17, 0}).x < 1.0, true);
}

TEST(Eval, VianaCriticalFiberPoint) {
  const double a = misiurewicz_parameter();
  const MapSystem v = MapSystem::viana({a, 0.01, 16, std::nullopt});
  const Point p = v.eval({0.25, 0.0});
  EXPECT_NEAR(p.x, 0.0, 1e-15);
  EXPECT_NEAR(p.y, a + 0.01, 1e-15);
}

TEST(Eval, OutsideDomainThrows) {
  EXPECT_THROW(MapSystem::quadratic(2.0).eval({2.5, 0}), DomainError);
  EXPECT_THROW(MapSystem::doubling().eval({-0.1, 0}), DomainError);
}

TEST(Construct, ParameterRanges) {
  EXPECT_THROW(MapSystem::tent(2.5), ArgumentError);
  EXPECT_THROW(MapSystem::tent(1.0), ArgumentError);
  EXPECT_THROW(MapSystem::linear_circle(1), ArgumentError);
  EXPECT_THROW(MapSystem::quadratic(2.1), ArgumentError);
  EXPECT_THROW(MapSystem::perturbed_circle(2.0), ArgumentError);
}

TEST(Misiurewicz, CriticalOrbitLandsOnFixedPoint) {
  const double a = misiurewicz_parameter();
  EXPECT_GT(a, 1.0);
  EXPECT_LT(a, 2.0);
  EXPECT_LT(misiurewicz_landing_defect(a, 3), 1e-12);
  // Independent check: iterate p_a from 0 and compare with the fixed point
  // -x+ where x+ = (-1 + sqrt(1 + 4a)) / 2 is the orientation-reversing one.
  const double fixed = (-1.0 + std::sqrt(1.0 + 4.0 * a)) / 2.0;
  double x = 0.0;
  for (int k = 0; k < 3; ++k) x = a - x * x;
  EXPECT_NEAR(x, fixed, 1e-10);
  EXPECT_EQ(a, misiurewicz_parameter());
}

TEST(LogJacobian, ConstantDerivativeFamilies) {
  EXPECT_NEAR(MapSystem::linear_circle(3).log_jacobian({0.123, 0}), 1.0986123, 1e-7);
  EXPECT_DOUBLE_EQ(MapSystem::tent(2.0).log_jacobian({0.3, 0}), std::log(2.0));
  EXPECT_DOUBLE_EQ(MapSystem::quadratic(2.0).log_jacobian({1.0, 0}), std::log(2.0));
}

TEST(LogJacobian, RefusesNearCriticalPoints) {
  EXPECT_THROW(MapSystem::quadratic(2.0).log_jacobian({0.0, 0}), NearCriticalError);
  EXPECT_THROW(MapSystem::quadratic(2.0).log_jacobian({1e-16, 0}), NearCriticalError);
  EXPECT_NO_THROW(MapSystem::quadratic(2.0).log_jacobian({1e-14, 0}));
  EXPECT_THROW(MapSystem::viana().log_jacobian({0.3, 0.0}), NearCriticalError);
}

TEST(LogJacobian, MatchesFiniteDifferences) {
  for (const MapSystem& m : every_family()) {
    Rng rng(7, static_cast<std::uint64_t>(m.family()));
    int checked = 0;
    while (checked < 200) {
      const Point p = m.sample_uniform(rng);
      if (m.critical_distance(p) < 1e-2) continue;
      const double h = 1e-6;
      double det;
      if (m.dimension() == 1) {
        if (p.x - h < m.domain().span.lo || p.x + h > m.domain().span.hi) continue;
        // stay on one branch
        if (m.branch_of(p.x - h) != m.branch_of(p.x + h)) continue;
        const std::size_t b = m.branch_of(p.x);
        det = (m.branch_value(b, p.x + h) - m.branch_value(b, p.x - h)) / (2 * h);
      } else {
        if (std::abs(p.y) + h > m.domain().span.hi) continue;
        auto F = [&](double x, double y) { return m.apply({x, y}); };
        auto lift = [](double a, double b) { return a - b - std::round(a - b); };
        const Point fxp = F(p.x + h, p.y), fxm = F(p.x - h, p.y), fyp = F(p.x, p.y + h), fym = F(p.x, p.y - h);
        const double a11 = lift(fxp.x, fxm.x) / (2 * h), a21 = (fxp.y - fxm.y) / (2 * h);
        const double a12 = lift(fyp.x, fym.x) / (2 * h), a22 = (fyp.y - fym.y) / (2 * h);
        det = a11 * a22 - a12 * a21;
      }
      EXPECT_NEAR(m.log_jacobian(p), std::log(std::abs(det)), 1e-6 * std::max(1.0, std::abs(std::log(std::abs(det)))))
          << m.name() << " at " << p.x << "," << p.y;
      ++checked;
    }
  }
}

TEST(Eval, StaysInDomain) {
  for (const MapSystem& m : every_family()) {
    Rng rng(11, static_cast<std::uint64_t>(m.family()));
    for (int i = 0; i < 5000; ++i) {
      const Point p = m.sample_uniform(rng);
      EXPECT_TRUE(m.domain().contains(m.eval(p))) << m.name();
    }
  }
}

TEST(TruncatedDistance, Branches) {
  const MapSystem q = MapSystem::quadratic(2.0);
  EXPECT_EQ(q.truncated_distance({0.3, 0}, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(q.truncated_distance({0.05, 0}, 0.1), 0.05);
  EXPECT_EQ(MapSystem::doubling().truncated_distance({0.3, 0}, 0.1), 1.0);
  EXPECT_THROW(q.truncated_distance({0.3, 0}, 0.0), ArgumentError);
}

TEST(TruncatedDistance, ExhaustiveGrid) {
  const MapSystem q = MapSystem::quadratic(2.0);
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + i * 0.01;
    for (double delta : {1e-3, 0.01, 0.1, 0.5, 1.0}) {
      const double d = std::abs(x);
      EXPECT_EQ(q.truncated_distance({x, 0}, delta), d >= delta ? 1.0 : d);
    }
  }
}

TEST(Branches, PreimageInvertsValue) {
  for (const MapSystem& m : every_family()) {
    if (m.dimension() != 1) continue;
    for (std::size_t b = 0; b < m.branch_count(); ++b) {
      const Interval s = m.branch_support(b);
      for (int k = 0; k <= 20; ++k) {
        const double x = s.lo + (s.hi - s.lo) * k / 20.0;
        EXPECT_NEAR(m.branch_preimage(b, m.branch_value(b, x)), x, 1e-12) << m.name() << " branch " << b;
      }
    }
  }
}

TEST(Nondegeneracy, CircleHasZeroRatios) {
  const MapSystem m = MapSystem::linear_circle(2);
  Rng rng(3);
  std::vector<Point> pts(1000);
  for (Point& p : pts) p = m.sample_uniform(rng);
  const NondegeneracyReport r = nondegeneracy_probe(m, {1.0, 1.0}, pts, 5);
  EXPECT_EQ(r.c1.ratio, 0.0);
  EXPECT_EQ(r.c2.ratio, 0.0);
  EXPECT_EQ(r.c3.ratio, 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(Nondegeneracy, QuadraticConditionOne) {
  const MapSystem q = MapSystem::quadratic(2.0);
  Rng rng(4);
  std::vector<Point> pts(1000);
  for (Point& p : pts) p = q.sample_uniform(rng);
  const auto r2 = nondegeneracy_probe(q, {2.0, 1.0}, pts, 1);
  EXPECT_LE(r2.c1.ratio, 1.0 + 1e-12);
  const auto r01 = nondegeneracy_probe(q, {0.1, 1.0}, pts, 1);
  EXPECT_NEAR(r01.c1.ratio, 1.0 / 20.0, 1e-12);
}

TEST(Nondegeneracy, EmptySampleAndBadParams) {
  const MapSystem q = MapSystem::quadratic(2.0);
  EXPECT_THROW(nondegeneracy_probe(q, {1.0, 1.0}, {}, 1), ArgumentError);
  EXPECT_THROW((NondegeneracyParams{0.0, 1.0}.validate()), ArgumentError);
}

TEST(Family, NameRoundTrip) {
  for (const MapSystem& m : every_family()) EXPECT_EQ(parse_family(m.name()), m.family());
  EXPECT_FALSE(parse_family("henon").has_value());
}
