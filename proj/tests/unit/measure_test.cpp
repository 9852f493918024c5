#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "srblab/error.hpp"
#include "srblab/parallel.hpp"
#include "srblab/spread.hpp"
#include "srblab/ulam.hpp"
#include "srblab/verification.hpp"

using namespace srblab;

namespace {

// Bin averages of the Chebyshev density 1/(pi sqrt(4 - x^2)) on [-2, 2],
// from its primitive asin(x/2)/pi.
double chebyshev_l1(const GridDensity& rho) {
  double err = 0.0;
  for (std::size_t i = 0; i < rho.grid.nx; ++i) {
    const double a = rho.grid.x_edge(i), b = rho.grid.x_edge(i + 1);
    const double exact = (std::asin(std::clamp(b / 2, -1.0, 1.0)) - std::asin(std::clamp(a / 2, -1.0, 1.0))) /
                         std::numbers::pi;
    err += std::abs(rho.values[i] * (b - a) - exact);
  }
  return err;
}

}  // namespace

TEST(Ulam, DoublingRowsSumToOneMinusDeficit) {
  const InducedMarkovMap F = doubling_first_return_exact(12);
  const UlamMatrix U = ulam_matrix(F, 4);
  ASSERT_EQ(U.grid.size(), 4u);
  double total_deficit = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(U.row_sum(i) + U.row_deficit[i], 1.0, 1e-12);
    total_deficit += U.row_deficit[i] * U.grid.bin_volume();
  }
  EXPECT_LT(total_deficit, std::ldexp(1.0, -12));
  EXPECT_NEAR(total_deficit, F.deficit_mass(), 1e-15);
}

TEST(Ulam, TentTwoBins) {
  const InducedMarkovMap F = first_return_map(MapSystem::tent(2.0), {0.0, 0.5}, 20);
  const UlamMatrix U = ulam_matrix(F, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(U.P.coeff(i, j), 0.5 * (1.0 - U.row_deficit[i]), 1e-6);
  EXPECT_LT(U.row_deficit[1], 1e-5);
}

TEST(Ulam, SingleBin) {
  const InducedMarkovMap F = doubling_first_return_exact(6);
  const UlamMatrix U = ulam_matrix(F, 1);
  EXPECT_NEAR(U.P.coeff(0, 0), 1.0 - F.deficit_mass() / F.delta().length(), 1e-15);
}

TEST(Ulam, OneStepRowsAreStochastic) {
  for (const MapSystem& m : {MapSystem::quadratic(2.0), MapSystem::tent(1.5), MapSystem::perturbed_circle(0.1)}) {
    const UlamMatrix U = ulam_matrix(m, 512);
    for (std::size_t i = 0; i < 512; ++i) EXPECT_NEAR(U.row_sum(i), 1.0, 1e-12) << m.name();
  }
  const UlamMatrix V = ulam_matrix(MapSystem::viana(), 16, 16, 4);
  for (std::size_t i = 0; i < V.grid.size(); ++i) EXPECT_NEAR(V.row_sum(i), 1.0, 1e-12);
}

TEST(Stationary, AffineTowersAreLebesgue) {
  const GridDensity a = stationary_density(ulam_matrix(doubling_first_return_exact(20), 1024));
  const GridDensity b =
      stationary_density(ulam_matrix(first_return_map(MapSystem::tent(2.0), {0.0, 0.5}, 20), 1024));
  for (const GridDensity* g : {&a, &b}) {
    EXPECT_NEAR(g->mass(), 1.0, 1e-10);
    for (double v : g->values) EXPECT_NEAR(v, 2.0, 1e-6);
  }
  EXPECT_NEAR(l1_distance(a, b), 0.0, 1e-9);
}

TEST(Stationary, CesaroAgreesWithPower) {
  const InducedMarkovMap F = first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 16);
  const UlamMatrix U = ulam_matrix(F, 512);
  const GridDensity p = stationary_density(U, SolveMode::power);
  const GridDensity c = stationary_density(U, SolveMode::cesaro, 1e-10);
  EXPECT_LT(l1_distance(p, c), 1e-6);
}

TEST(Stationary, ChebyshevDensityConverges) {
  // The 10^-2 target at 2^14 bins is checked (and missed, 0.0118) by the
  // acceptance run; here only the trend is asserted.
  double prev = HUGE_VAL;
  for (unsigned k : {10u, 12u, 14u}) {
    const GridDensity rho = stationary_density(ulam_matrix(MapSystem::quadratic(2.0), std::size_t{1} << k));
    EXPECT_NEAR(rho.mass(), 1.0, 1e-10);
    const double e = chebyshev_l1(rho);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 0.015);
}

TEST(Stationary, RefinementConsistency) {
  const InducedMarkovMap F = first_return_map(MapSystem::perturbed_circle(0.1), {0.0, 0.5}, 16);
  auto project = [](const GridDensity& fine) {
    GridDensity c = fine;
    c.grid = Grid::line(fine.grid.x, fine.grid.nx / 2);
    c.values.assign(c.grid.nx, 0.0);
    c.flagged.clear();
    for (std::size_t i = 0; i < c.grid.nx; ++i) c.values[i] = 0.5 * (fine.values[2 * i] + fine.values[2 * i + 1]);
    return c;
  };
  double prev = HUGE_VAL;
  for (std::size_t k = 6; k <= 10; ++k) {
    const GridDensity a = stationary_density(ulam_matrix(F, std::size_t{1} << k));
    const GridDensity b = stationary_density(ulam_matrix(F, std::size_t{1} << (k + 1)));
    const double d = l1_distance(a, project(b));
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Stationary, PerturbedCircleTrend) {
  auto rho = [](double t) { return stationary_density(ulam_matrix(MapSystem::perturbed_circle(t), 2048)); };
  const GridDensity r0 = rho(0.0), r1 = rho(0.05), r2 = rho(0.1);
  EXPECT_LE(l1_distance(r0, r1), l1_distance(r0, r2));
  EXPECT_GT(l1_distance(r0, r1), 0.0);
}

TEST(Stationary, WorkerCountInvariant) {
  const UlamMatrix U = ulam_matrix(MapSystem::quadratic(2.0), 4096);
  GridDensity a, b;
  {
    parallel::WorkerScope w(1);
    a = stationary_density(U);
  }
  {
    parallel::WorkerScope w(3);
    b = stationary_density(U);
  }
  EXPECT_EQ(a.values, b.values);
}

TEST(Stationary, IterationCap) {
  const UlamMatrix U = ulam_matrix(MapSystem::perturbed_circle(0.1), 256);
  EXPECT_THROW(stationary_density(U, SolveMode::power, 1e-15, 2), ConvergenceError);
}

TEST(Bounds, Uniform) {
  const DensityBounds b = density_bounds_check(uniform_density(Grid::line({0.0, 1.0}, 64)));
  EXPECT_EQ(b.lower, 1.0);
  EXPECT_EQ(b.upper, 1.0);
  EXPECT_TRUE(b.pass);
}

TEST(Bounds, PlantedZeroBin) {
  GridDensity g = uniform_density(Grid::line({0.0, 1.0}, 64));
  g.values[17] = 0.0;
  const DensityBounds b = density_bounds_check(g);
  EXPECT_FALSE(b.pass);
  EXPECT_EQ(b.lower_bin, 17u);
}

TEST(Bounds, ChebyshevFails) {
  const GridDensity rho = stationary_density(ulam_matrix(MapSystem::quadratic(2.0), 4096));
  const DensityBounds b = density_bounds_check(rho);
  EXPECT_FALSE(b.pass);
  EXPECT_TRUE(b.upper_bin < 4 || b.upper_bin >= 4092);
}

TEST(Bounds, VerifiedTowerWithinAPriori) {
  const VerifiedTower F = VerifiedTower::verify(first_return_map(MapSystem::quadratic(2.0), {-1.0, 1.0}, 14));
  const GridDensity rho = stationary_density(ulam_matrix(F.map(), 2048));
  const DensityBounds b = density_bounds_check(rho, F.report().C0_a_priori);
  EXPECT_TRUE(b.within_a_priori);
  EXPECT_TRUE(b.pass);
}

TEST(Spread, DoublingMassAndUniformity) {
  const InducedMarkovMap F = doubling_first_return_exact(20);
  const GridDensity mu = stationary_density(ulam_matrix(F, 4096));
  const GridDensity s = spread_measure(F, mu, 4096, 20);
  EXPECT_NEAR(s.mass(), 2.0, 1e-5);
  EXPECT_NEAR(s.mass(), kac_mass(F, mu).value, 1e-6);
  const Normalized n = normalize(s);
  EXPECT_LT(l1_distance(n.density, uniform_density(Grid::line({0.0, 1.0}, 4096))), 1e-2);
}

TEST(Spread, TrivialTower) {
  const MapSystem m = MapSystem::linear_circle(3);
  const InducedMarkovMap F = first_return_map(m, {0.0, 1.0}, 1);
  const GridDensity mu = uniform_density(Grid::line({0.0, 1.0}, 256));
  const GridDensity s = spread_measure(F, mu, 256, 1);
  EXPECT_NEAR(s.mass(), 1.0, 1e-12);
  EXPECT_LT(l1_distance(s, mu), 1e-12);
}

TEST(Spread, TentUniform) {
  const InducedMarkovMap F = first_return_map(MapSystem::tent(2.0), {0.0, 0.5}, 20);
  const GridDensity mu = stationary_density(ulam_matrix(F, 4096));
  const Normalized n = normalize(spread_measure(F, mu, 4096, 20));
  EXPECT_LT(l1_distance(n.density, uniform_density(Grid::line({0.0, 1.0}, 4096))), 1e-2);
}

TEST(Spread, KacIdentityOnBuiltInTowers) {
  const std::pair<MapSystem, Interval> towers[] = {{MapSystem::perturbed_circle(0.1), {0.0, 0.5}},
                                                   {MapSystem::quadratic(2.0), {-1.0, 1.0}},
                                                   {MapSystem::tent(2.0), {1.0 / 3.0, 2.0 / 3.0}}};
  for (const auto& [map, delta] : towers) {
    const InducedMarkovMap F = first_return_map(map, delta, 14);
    const GridDensity mu = stationary_density(ulam_matrix(F, 1024));
    const GridDensity s = spread_measure(F, mu, 1024, F.tau_max());
    const double kac = kac_mass(F, mu).value;
    EXPECT_NEAR(normalize(s).mass / kac, 1.0, std::max(1e-6, s.truncation_bound)) << map.name();
  }
}

TEST(Spread, CapBelowTauMaxIsRejected) {
  const InducedMarkovMap F = doubling_first_return_exact(8);
  const GridDensity mu = stationary_density(ulam_matrix(F, 64));
  EXPECT_THROW(spread_measure(F, mu, 64, 5), ArgumentError);
}

TEST(Normalize, Scalars) {
  GridDensity two = uniform_density(Grid::line({0.0, 1.0}, 8), 2.0);
  const Normalized n = normalize(two);
  EXPECT_EQ(n.mass, 2.0);
  for (double v : n.density.values) EXPECT_EQ(v, 1.0);
  const Normalized same = normalize(n.density);
  EXPECT_EQ(same.mass, 1.0);
  EXPECT_EQ(same.density.values, n.density.values);
}

TEST(L1, Direct) {
  const GridDensity u = uniform_density(Grid::line({0.0, 1.0}, 8));
  GridDensity h = u;
  for (std::size_t i = 0; i < 8; ++i) h.values[i] = i < 4 ? 2.0 : 0.0;
  EXPECT_EQ(l1_distance(u, u), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(u, h), 1.0);
  EXPECT_THROW(l1_distance(u, uniform_density(Grid::line({0.0, 1.0}, 4))), ArgumentError);
}
