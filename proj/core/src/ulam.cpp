#include "srblab/ulam.hpp"

#include <cmath>
#include <functional>

#include "srblab/parallel.hpp"

namespace srblab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Pushes the Lebesgue mass of a monotone piece (support S, image I) onto the
// target bins it covers. The outermost preimages are the support endpoints,
// so the piece's full mass is conserved.
void transport_piece(const Grid& grid, Interval S, Interval I, bool increasing, bool clamped_lo, bool clamped_hi,
                     const std::function<double(double)>& inverse, Triplets& out) {
  if (!(I.hi > I.lo) || !(S.hi > S.lo)) return;
  const std::size_t first = grid.x_index(I.lo);
  const std::size_t last = grid.x_index(I.hi);
  std::vector<double> pre;
  pre.reserve(last - first + 2);
  auto at = [&](double y, bool is_lo, bool is_hi) {
    if (is_lo && !clamped_lo) return increasing ? S.lo : S.hi;
    if (is_hi && !clamped_hi) return increasing ? S.hi : S.lo;
    return std::clamp(inverse(y), S.lo, S.hi);
  };
  pre.push_back(at(I.lo, true, false));
  for (std::size_t t = first + 1; t <= last; ++t) pre.push_back(at(grid.x_edge(t), false, false));
  pre.push_back(at(I.hi, false, true));

  for (std::size_t k = 0; k + 1 < pre.size(); ++k) {
    const std::size_t target = first + k;
    const Interval sub = Interval::spanning(pre[k], pre[k + 1]);
    if (!(sub.hi > sub.lo)) continue;
    const std::size_t a = grid.x_index(sub.lo);
    const std::size_t b = grid.x_index(sub.hi);
    for (std::size_t i = a; i <= b; ++i) {
      const double w = overlap_length(sub, grid.x_bin(i));
      if (w > 0.0) out.emplace_back(static_cast<int>(i), static_cast<int>(target), w);
    }
  }
}

UlamMatrix assemble(const Grid& grid, const std::vector<Triplets>& parts, double row_measure) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  Triplets all;
  all.reserve(total);
  for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  for (auto& t : all) t = Eigen::Triplet<double>(t.row(), t.col(), t.value() / row_measure);

  UlamMatrix U;
  U.grid = grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  U.P.resize(n, n);
  U.P.setFromTriplets(all.begin(), all.end());
  U.P.makeCompressed();
  U.PT = U.P.transpose();
  U.PT.makeCompressed();
  U.row_deficit.resize(grid.size());
  U.flagged.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = U.row_sum(i);
    U.row_deficit[i] = 1.0 - s;
    U.flagged[i] = !(s > 1e-14);
  }
  return U;
}

}  // namespace

double UlamMatrix::row_sum(std::size_t i) const {
  CompensatedSum s;
  for (SparseRows::InnerIterator it(P, static_cast<Eigen::Index>(i)); it; ++it) s += it.value();
  return s.value();
}

UlamMatrix ulam_matrix(const InducedMarkovMap& F, std::size_t bins) {
  if (bins < 1) throw ArgumentError("ulam_matrix needs at least one bin");
  const Grid grid = Grid::line(F.delta(), bins);
  const auto parts = parallel::map_indices<Triplets>(
      F.cells().size(),
      [&](std::size_t c) {
        Triplets out;
        const TowerCell& cell = F.cells()[c];
        transport_piece(grid, cell.support, F.delta(), cell.increasing, false, false,
                        [&](double y) { return F.inverse(c, y); }, out);
        return out;
      },
      1);
  UlamMatrix U = assemble(grid, parts, grid.dx());
  U.tau_cap = F.tau_max();
  return U;
}

UlamMatrix ulam_matrix(const MapSystem& map, std::size_t bins) {
  if (map.dimension() != 1) throw ArgumentError("one-step 1D Ulam matrix needs a one-dimensional map");
  if (bins < 1) throw ArgumentError("ulam_matrix needs at least one bin");
  const Interval dom = map.domain().span;
  const Grid grid = Grid::line(dom, bins);
  const auto parts = parallel::map_indices<Triplets>(
      map.branch_count(),
      [&](std::size_t b) {
        Triplets out;
        const Interval S = map.branch_support(b);
        const double v_lo = map.branch_value(b, S.lo);
        const double v_hi = map.branch_value(b, S.hi);
        const bool increasing = v_lo <= v_hi;
        const Interval raw = Interval::spanning(v_lo, v_hi);
        const Interval I{std::max(raw.lo, dom.lo), std::min(raw.hi, dom.hi)};
        transport_piece(grid, S, I, increasing, raw.lo < dom.lo, raw.hi > dom.hi,
                        [&](double y) { return map.branch_preimage(b, y); }, out);
        return out;
      },
      1);
  return assemble(grid, parts, grid.dx());
}

UlamMatrix ulam_matrix(const MapSystem& map, std::size_t nx, std::size_t ny, std::size_t per_axis) {
  if (map.dimension() != 2) throw ArgumentError("2D Ulam matrix needs a two-dimensional map");
  if (per_axis < 1) throw ArgumentError("per_axis must be >= 1");
  const Grid grid = Grid::plane({0.0, 1.0}, nx, map.domain().span, ny);
  const double w = 1.0 / static_cast<double>(per_axis * per_axis);
  const auto parts = parallel::map_indices<Triplets>(
      grid.size(),
      [&](std::size_t row) {
        const std::size_t ix = row % nx, iy = row / nx;
        const Interval bx = grid.x_bin(ix), by = grid.y_bin(iy);
        std::vector<std::pair<std::size_t, double>> hits;
        hits.reserve(per_axis * per_axis);
        for (std::size_t a = 0; a < per_axis; ++a) {
          for (std::size_t b = 0; b < per_axis; ++b) {
            const Point p{bx.lo + bx.length() * (a + 0.5) / per_axis, by.lo + by.length() * (b + 0.5) / per_axis};
            hits.emplace_back(grid.locate(map.apply(p)), w);
          }
        }
        std::sort(hits.begin(), hits.end());
        Triplets out;
        for (std::size_t k = 0; k < hits.size();) {
          double s = 0.0;
          std::size_t j = k;
          for (; j < hits.size() && hits[j].first == hits[k].first; ++j) s += hits[j].second;
          out.emplace_back(static_cast<int>(row), static_cast<int>(hits[k].first), s);
          k = j;
        }
        return out;
      },
      16);
  return assemble(grid, parts, 1.0);
}

namespace {

void apply_transpose(const UlamMatrix& U, const std::vector<double>& p, std::vector<double>& out) {
  parallel::for_each_chunk(p.size(), 2048, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      double s = 0.0;
      for (SparseRows::InnerIterator it(U.PT, static_cast<Eigen::Index>(r)); it; ++it)
        s += it.value() * p[static_cast<std::size_t>(it.col())];
      out[r] = s;
    }
  });
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s.value();
}

}  // namespace

GridDensity stationary_density(const UlamMatrix& U, SolveMode mode, double tol, std::size_t max_iters) {
  if (!(tol > 0.0)) throw ArgumentError("stationary_density needs tol > 0");
  const std::size_t n = U.grid.size();
  std::size_t active = 0;
  for (bool f : U.flagged) active += f ? 0 : 1;
  if (active == 0) throw ArgumentError("every Ulam row is flagged (all deficit)");

  std::vector<double> p(n, 0.0), next(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p[i] = U.flagged[i] ? 0.0 : 1.0 / static_cast<double>(active);
  std::vector<double> avg = p, avg_next(n, 0.0);
  double lost_total = 0.0;
  double residual = HUGE_VAL;
  std::size_t it = 0;
  for (; it < max_iters; ++it) {
    apply_transpose(U, p, next);
    const double kept = compensated_total(next);
    if (!(kept > 0.0)) throw ConvergenceError("all mass leaked into the deficit", 1.0, it);
    lost_total += 1.0 - kept;
    for (double& v : next) v /= kept;
    if (mode == SolveMode::power) {
      residual = l1_diff(next, p);
      std::swap(p, next);
      if (residual <= tol) break;
    } else {
      const double k = static_cast<double>(it + 2);
      for (std::size_t i = 0; i < n; ++i) avg_next[i] = avg[i] + (next[i] - avg[i]) / k;
      residual = l1_diff(avg_next, avg);
      std::swap(avg, avg_next);
      std::swap(p, next);
      if (residual <= tol) break;
    }
  }
  if (it == max_iters) throw ConvergenceError("stationary density did not converge", residual, max_iters);

  const std::vector<double>& masses = mode == SolveMode::power ? p : avg;
  std::vector<double> values(n);
  const double vol = U.grid.bin_volume();
  for (std::size_t i = 0; i < n; ++i) values[i] = masses[i] / vol;
  GridDensity rho(U.grid, std::move(values), Provenance::stationary);
  rho.deficit = lost_total;
  rho.iterations = it + 1;
  rho.tau_cap = U.tau_cap;
  rho.flagged = U.flagged;
  return rho;
}

DensityBounds density_bounds_check(const GridDensity& rho, std::optional<double> C0) {
  DensityBounds r;
  r.lower = HUGE_VAL;
  r.upper = -HUGE_VAL;
  const std::size_t n = rho.values.size();
  auto active = [&](std::size_t i) { return rho.flagged.empty() || !rho.flagged[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!active(i)) continue;
    const double v = rho.values[i];
    if (v < r.lower) {
      r.lower = v;
      r.lower_bin = i;
    }
    if (v > r.upper) {
      r.upper = v;
      r.upper_bin = i;
    }
  }
  if (rho.grid.dimension == 1 && rho.grid.nx >= 4) {
    double coarse = 0.0;
    for (std::size_t i = 0; i + 1 < n; i += 2) coarse = std::max(coarse, 0.5 * (rho.values[i] + rho.values[i + 1]));
    r.refinement_growth = coarse > 0.0 ? r.upper / coarse : HUGE_VAL;
  }
  r.a_priori_C0 = C0;
  if (C0) {
    // C0 = K0 / m; the matching lower bound for a probability density is
    // 1 / (K0 m) = 1 / (C0 m^2).
    const double m = rho.grid.bin_volume() * static_cast<double>(rho.grid.size());
    r.a_priori_lower = 1.0 / (*C0 * m * m);
    const double slack = 1e-9;
    r.within_a_priori = r.upper <= *C0 * (1.0 + slack) && r.lower >= r.a_priori_lower * (1.0 - slack);
  }
  r.pass = r.lower > 0.0 && std::isfinite(r.upper) && r.refinement_growth <= 1.1 && r.within_a_priori;
  return r;
}

}  // namespace srblab
