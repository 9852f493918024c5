#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srblab/grid.hpp"
#include "srblab/map_system.hpp"

namespace srblab {

// One cell omega of the induced partition. F = f^tau on the cell, evaluated
// by following the branch itinerary of f.
struct TowerCell {
  Interval support;
  std::size_t tau = 1;
  std::vector<std::uint32_t> itinerary;  // branch of f at steps 0..tau-1
  bool increasing = true;                // orientation of F on the cell
  double deriv_min = 0.0;                // |DF| range over construction samples
  double deriv_max = 0.0;
};

// Part of Delta that had not returned by tau_max. The itinerary has length
// tau_max so the mass can still be pushed forward tau_max steps.
struct DeficitPiece {
  Interval support;
  std::vector<std::uint32_t> itinerary;
};

class InducedMarkovMap {
 public:
  InducedMarkovMap(MapSystem base, Interval delta, std::vector<TowerCell> cells,
                   std::vector<DeficitPiece> deficit, std::size_t tau_max);

  const MapSystem& base() const noexcept { return base_; }
  const Interval& delta() const noexcept { return delta_; }
  const std::vector<TowerCell>& cells() const noexcept { return cells_; }
  const std::vector<DeficitPiece>& deficit() const noexcept { return deficit_; }
  std::size_t tau_max() const noexcept { return tau_max_; }

  double kappa() const noexcept { return kappa_; }
  double distortion() const noexcept { return distortion_; }
  void set_constants(double kappa, double distortion) noexcept {
    kappa_ = kappa;
    distortion_ = distortion;
  }

  double cell_mass() const;
  double deficit_mass() const;

  // Index of the cell containing x, or nullopt on deficit or outside Delta.
  std::optional<std::size_t> locate(double x) const;

  // f^j(x) along the itinerary (j <= itinerary length); continuous lift.
  double push(std::span<const std::uint32_t> itinerary, std::size_t j, double x) const;
  // Pulls y back through the first j branches of the itinerary.
  double pull(std::span<const std::uint32_t> itinerary, std::size_t j, double y) const;
  // |D f^j(x)| along the itinerary.
  double push_derivative(std::span<const std::uint32_t> itinerary, std::size_t j, double x) const;

  double eval(std::size_t cell, double x) const;
  double derivative(std::size_t cell, double x) const;  // |DF|
  double log_derivative(std::size_t cell, double x) const;
  double inverse(std::size_t cell, double y) const;     // G: Delta -> cell

  // Copy with one cell replaced (used by mutation tests).
  InducedMarkovMap with_cell(std::size_t index, TowerCell cell) const;

  // Lebesgue mass of {tau > n}, with deficit counted as tau = tau_max + 1.
  double tail_mass(std::size_t n) const;
  // Ratio m{tau > tau_max} / m{tau > tau_max - 1}, used to extrapolate the
  // uncovered tail geometrically.
  double tail_ratio() const;

 private:
  MapSystem base_;
  Interval delta_;
  std::vector<TowerCell> cells_;
  std::vector<DeficitPiece> deficit_;
  std::size_t tau_max_;
  double kappa_ = 0.0;
  double distortion_ = 0.0;
};

// x -> 2x mod 1 on Delta = [0, 1/2): cell k is [1/2 - 2^-k, 1/2 - 2^-k-1)
// with tau = k, for k = 1..k_max.
InducedMarkovMap doubling_first_return_exact(std::size_t k_max);

// First-return map of a one-dimensional piecewise monotone map to Delta,
// tracked in image space: each unreturned image is split by the branches of
// f, mapped, and intersected with Delta. A full cover of Delta yields a cell;
// the parts outside Delta continue until tau_max and then become deficit.
// A return that covers Delta only partially is not Markov and raises a
// ConstructionError naming the offending subinterval.
InducedMarkovMap first_return_map(const MapSystem& map, Interval delta, std::size_t tau_max,
                                  double tol = 1e-12);

// int_Delta |tau1 - tau2| dm, tau extended by tau_max + 1 on the deficit.
double return_time_l1_distance(const InducedMarkovMap& f1, const InducedMarkovMap& f2);

struct KacMass {
  double value = 0.0;          // int tau dmu_F, deficit at tau_max + 1
  double censored_mass = 0.0;  // mu_F(deficit)
};

// mu_F must be a unit-mass density on a grid over Delta.
KacMass kac_mass(const InducedMarkovMap& F, const GridDensity& mu_F);

// mu_F-mass of the deficit pieces.
double deficit_measure(const InducedMarkovMap& F, const GridDensity& mu_F);

// Geometric extrapolation of the part of a tau-weighted integral lost on the
// deficit: mu(def) * r / (1 - r), r the tail ratio.
double deficit_error_bar(const InducedMarkovMap& F, double deficit_measure);

}  // namespace srblab
