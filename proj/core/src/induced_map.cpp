#include "srblab/induced_map.hpp"

#include <algorithm>
#include <cmath>

namespace srblab {

InducedMarkovMap::InducedMarkovMap(MapSystem base, Interval delta, std::vector<TowerCell> cells,
                                   std::vector<DeficitPiece> deficit, std::size_t tau_max)
    : base_(std::move(base)), delta_(delta), cells_(std::move(cells)), deficit_(std::move(deficit)),
      tau_max_(tau_max) {
  if (base_.dimension() != 1) throw ArgumentError("induced maps are built for one-dimensional maps only");
  if (tau_max_ < 1) throw ArgumentError("tau_max must be >= 1");
  auto by_left = [](const auto& a, const auto& b) { return a.support.lo < b.support.lo; };
  std::sort(cells_.begin(), cells_.end(), by_left);
  std::sort(deficit_.begin(), deficit_.end(), by_left);
  for (const auto& c : cells_) {
    if (c.itinerary.size() != c.tau || c.tau < 1) throw ArgumentError("cell itinerary length must equal tau");
  }
}

double InducedMarkovMap::cell_mass() const {
  CompensatedSum s;
  for (const auto& c : cells_) s += c.support.length();
  return s.value();
}

double InducedMarkovMap::deficit_mass() const {
  CompensatedSum s;
  for (const auto& d : deficit_) s += d.support.length();
  return s.value();
}

std::optional<std::size_t> InducedMarkovMap::locate(double x) const {
  auto it = std::upper_bound(cells_.begin(), cells_.end(), x,
                             [](double v, const TowerCell& c) { return v < c.support.lo; });
  if (it == cells_.begin()) return std::nullopt;
  --it;
  const Interval& s = it->support;
  if (x < s.hi || (x == s.hi && s.hi >= delta_.hi)) return static_cast<std::size_t>(it - cells_.begin());
  return std::nullopt;
}

double InducedMarkovMap::push(std::span<const std::uint32_t> itinerary, std::size_t j, double x) const {
  for (std::size_t i = 0; i < j; ++i) x = base_.branch_value(itinerary[i], x);
  return x;
}

double InducedMarkovMap::pull(std::span<const std::uint32_t> itinerary, std::size_t j, double y) const {
  for (std::size_t i = j; i-- > 0;) y = base_.branch_preimage(itinerary[i], y);
  return y;
}

double InducedMarkovMap::push_derivative(std::span<const std::uint32_t> itinerary, std::size_t j,
                                         double x) const {
  double d = 1.0;
  for (std::size_t i = 0; i < j; ++i) {
    d *= std::abs(base_.branch_slope(itinerary[i], x));
    x = base_.branch_value(itinerary[i], x);
  }
  return d;
}

double InducedMarkovMap::eval(std::size_t cell, double x) const {
  const auto& c = cells_.at(cell);
  return push(c.itinerary, c.tau, x);
}

double InducedMarkovMap::derivative(std::size_t cell, double x) const {
  const auto& c = cells_.at(cell);
  return push_derivative(c.itinerary, c.tau, x);
}

double InducedMarkovMap::log_derivative(std::size_t cell, double x) const {
  const auto& c = cells_.at(cell);
  double s = 0.0;
  for (std::size_t i = 0; i < c.tau; ++i) {
    s += std::log(std::abs(base_.branch_slope(c.itinerary[i], x)));
    x = base_.branch_value(c.itinerary[i], x);
  }
  return s;
}

double InducedMarkovMap::inverse(std::size_t cell, double y) const {
  const auto& c = cells_.at(cell);
  return pull(c.itinerary, c.tau, y);
}

InducedMarkovMap InducedMarkovMap::with_cell(std::size_t index, TowerCell cell) const {
  auto cells = cells_;
  cells.at(index) = std::move(cell);
  InducedMarkovMap out(base_, delta_, std::move(cells), deficit_, tau_max_);
  out.set_constants(kappa_, distortion_);
  return out;
}

double InducedMarkovMap::tail_mass(std::size_t n) const {
  CompensatedSum s;
  for (const auto& c : cells_)
    if (c.tau > n) s += c.support.length();
  if (tau_max_ + 1 > n) s += deficit_mass();
  return s.value();
}

double InducedMarkovMap::tail_ratio() const {
  const double below = tail_mass(tau_max_ - 1);
  if (!(below > 0.0)) return 0.0;
  return std::min(tail_mass(tau_max_) / below, 0.999);
}

namespace {

template <class Fn>
void for_overlaps(const Grid& grid, const Interval& piece, Fn&& fn) {
  if (!(piece.hi > piece.lo)) return;
  const std::size_t first = grid.x_index(piece.lo);
  const std::size_t last = grid.x_index(piece.hi);
  for (std::size_t i = first; i <= last && i < grid.nx; ++i) {
    const double w = overlap_length(piece, grid.x_bin(i));
    if (w > 0.0) fn(i, w);
  }
}

void check_delta_grid(const InducedMarkovMap& F, const GridDensity& mu) {
  if (mu.grid.dimension != 1) throw ArgumentError("mu_F must live on a one-dimensional grid");
  const double scale = F.delta().length();
  if (std::abs(mu.grid.x.lo - F.delta().lo) > 1e-12 * scale || std::abs(mu.grid.x.hi - F.delta().hi) > 1e-12 * scale)
    throw ArgumentError("mu_F grid does not span the inducing domain");
}

}  // namespace

double deficit_measure(const InducedMarkovMap& F, const GridDensity& mu_F) {
  check_delta_grid(F, mu_F);
  CompensatedSum s;
  for (const auto& d : F.deficit())
    for_overlaps(mu_F.grid, d.support, [&](std::size_t i, double w) { s += mu_F.values[i] * w; });
  return s.value();
}

KacMass kac_mass(const InducedMarkovMap& F, const GridDensity& mu_F) {
  check_delta_grid(F, mu_F);
  const double mass = mu_F.mass();
  if (std::abs(mass - 1.0) > 1e-9) throw ArgumentError("kac_mass needs a unit-mass mu_F");
  CompensatedSum s;
  for (const auto& c : F.cells()) {
    const double tau = static_cast<double>(c.tau);
    for_overlaps(mu_F.grid, c.support, [&](std::size_t i, double w) { s += tau * mu_F.values[i] * w; });
  }
  const double censored = deficit_measure(F, mu_F);
  s += static_cast<double>(F.tau_max() + 1) * censored;
  return {s.value(), censored};
}

double deficit_error_bar(const InducedMarkovMap& F, double deficit_measure) {
  const double r = F.tail_ratio();
  return deficit_measure * r / (1.0 - r);
}

double return_time_l1_distance(const InducedMarkovMap& f1, const InducedMarkovMap& f2) {
  const double scale = std::max(1.0, f1.delta().length());
  if (std::abs(f1.delta().lo - f2.delta().lo) > 1e-12 * scale ||
      std::abs(f1.delta().hi - f2.delta().hi) > 1e-12 * scale)
    throw ArgumentError("return_time_l1_distance needs the same inducing domain");

  std::vector<double> cuts{f1.delta().lo, f1.delta().hi};
  for (const auto* F : {&f1, &f2}) {
    for (const auto& c : F->cells()) {
      cuts.push_back(c.support.lo);
      cuts.push_back(c.support.hi);
    }
    for (const auto& d : F->deficit()) {
      cuts.push_back(d.support.lo);
      cuts.push_back(d.support.hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto tau_at = [](const InducedMarkovMap& F, double x) {
    const auto idx = F.locate(x);
    return idx ? static_cast<double>(F.cells()[*idx].tau) : static_cast<double>(F.tau_max() + 1);
  };
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(cuts[i], f1.delta().lo);
    const double hi = std::min(cuts[i + 1], f1.delta().hi);
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    s += std::abs(tau_at(f1, mid) - tau_at(f2, mid)) * (hi - lo);
  }
  return s.value();
}

}  // namespace srblab
