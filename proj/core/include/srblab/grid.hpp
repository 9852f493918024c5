#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "srblab/linalg.hpp"

namespace srblab {

// Uniform bins over an interval (ny == 1) or a rectangle theta x fiber.
// Bin (ix, iy) has flat index iy * nx + ix.
struct Grid {
  Interval x{0.0, 1.0};
  std::size_t nx = 1;
  Interval y{0.0, 1.0};
  std::size_t ny = 1;
  int dimension = 1;

  static Grid line(Interval span, std::size_t bins);
  static Grid plane(Interval theta, std::size_t nx, Interval fiber, std::size_t ny);

  std::size_t size() const noexcept { return nx * ny; }
  double bin_volume() const noexcept;
  double dx() const noexcept { return x.length() / static_cast<double>(nx); }
  double dy() const noexcept { return y.length() / static_cast<double>(ny); }

  double x_edge(std::size_t i) const noexcept;
  double y_edge(std::size_t j) const noexcept;
  Interval x_bin(std::size_t ix) const noexcept { return {x_edge(ix), x_edge(ix + 1)}; }
  Interval y_bin(std::size_t iy) const noexcept { return {y_edge(iy), y_edge(iy + 1)}; }

  std::size_t x_index(double v) const noexcept;
  std::size_t y_index(double v) const noexcept;
  std::size_t locate(const Point& p) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;
};

enum class Provenance { stationary, spread, normalized, external };

std::string_view provenance_name(Provenance p);

// Piecewise-constant density with respect to Lebesgue measure.
struct GridDensity {
  Grid grid;
  std::vector<double> values;
  Provenance provenance = Provenance::external;
  // Bookkeeping carried to CSV headers and downstream error bars.
  double deficit = 0.0;           // stationary: cumulative renormalized mass
  double truncation_bound = 0.0;  // spread: tail bound beyond the tau cap
  std::size_t tau_cap = 0;        // tower tau_max the density was built with
  std::size_t iterations = 0;
  std::vector<bool> flagged;      // bins excluded from the solve (all deficit)

  GridDensity() = default;
  GridDensity(Grid g, std::vector<double> v, Provenance p);

  double mass() const;
  double bin_mass(std::size_t i) const { return values[i] * grid.bin_volume(); }
};

GridDensity uniform_density(const Grid& grid, double value = 1.0);

}  // namespace srblab
