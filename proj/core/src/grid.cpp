#include "srblab/grid.hpp"

#include <algorithm>

#include "srblab/error.hpp"

namespace srblab {

Grid Grid::line(Interval span, std::size_t bins) {
  if (bins < 1) throw ArgumentError("grid needs at least one bin");
  if (!(span.hi > span.lo)) throw ArgumentError("grid interval must have positive length");
  return {span, bins, {0.0, 1.0}, 1, 1};
}

Grid Grid::plane(Interval theta, std::size_t nx, Interval fiber, std::size_t ny) {
  if (nx < 1 || ny < 1) throw ArgumentError("grid needs at least one bin per axis");
  if (!(theta.hi > theta.lo) || !(fiber.hi > fiber.lo)) throw ArgumentError("grid sides must have positive length");
  return {theta, nx, fiber, ny, 2};
}

double Grid::bin_volume() const noexcept { return dimension == 1 ? dx() : dx() * dy(); }

double Grid::x_edge(std::size_t i) const noexcept {
  if (i >= nx) return x.hi;
  return x.lo + x.length() * static_cast<double>(i) / static_cast<double>(nx);
}

double Grid::y_edge(std::size_t j) const noexcept {
  if (j >= ny) return y.hi;
  return y.lo + y.length() * static_cast<double>(j) / static_cast<double>(ny);
}

std::size_t Grid::x_index(double v) const noexcept {
  const double t = (v - x.lo) / x.length() * static_cast<double>(nx);
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), nx - 1);
}

std::size_t Grid::y_index(double v) const noexcept {
  const double t = (v - y.lo) / y.length() * static_cast<double>(ny);
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), ny - 1);
}

std::size_t Grid::locate(const Point& p) const noexcept {
  if (dimension == 1) return x_index(p.x);
  return y_index(p.y) * nx + x_index(p.x);
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::stationary: return "stationary";
    case Provenance::spread: return "spread";
    case Provenance::normalized: return "normalized";
    case Provenance::external: return "external";
  }
  return "external";
}

GridDensity::GridDensity(Grid g, std::vector<double> v, Provenance p)
    : grid(g), values(std::move(v)), provenance(p) {
  if (values.size() != grid.size()) throw ArgumentError("density values do not match the grid size");
}

double GridDensity::mass() const {
  CompensatedSum s;
  for (double v : values) s += v;
  return s.value() * grid.bin_volume();
}

GridDensity uniform_density(const Grid& grid, double value) {
  return GridDensity(grid, std::vector<double>(grid.size(), value), Provenance::external);
}

}  // namespace srblab
