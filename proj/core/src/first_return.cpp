#include "srblab/induced_map.hpp"

#include <cmath>
#include <cstdio>

#include "srblab/verification.hpp"

namespace srblab {

namespace {

constexpr std::size_t kMaxPieces = 1u << 20;

std::string show(const Interval& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", s.lo, s.hi);
  return buf;
}

void fill_derivative_range(const InducedMarkovMap& F, TowerCell& cell) {
  constexpr int n = 65;
  cell.deriv_min = HUGE_VAL;
  cell.deriv_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = cell.support.lo + cell.support.length() * i / (n - 1);
    const double d = F.push_derivative(cell.itinerary, cell.tau, x);
    cell.deriv_min = std::min(cell.deriv_min, d);
    cell.deriv_max = std::max(cell.deriv_max, d);
  }
}

// Measures kappa and K on the built tower and fills the per-cell derivative
// ranges. Verification failures leave the constants at their defaults.
InducedMarkovMap finish(InducedMarkovMap F) {
  auto cells = F.cells();
  for (auto& c : cells) fill_derivative_range(F, c);
  InducedMarkovMap out(F.base(), F.delta(), std::move(cells), F.deficit(), F.tau_max());
  if (!out.cells().empty()) {
    try {
      const auto r = verify_axioms(out);
      out.set_constants(r.kappa, r.K);
    } catch (const VerificationError&) {
      out.set_constants(HUGE_VAL, HUGE_VAL);
    }
  }
  return out;
}

}  // namespace

InducedMarkovMap doubling_first_return_exact(std::size_t k_max) {
  if (k_max < 1) throw ArgumentError("k_max must be >= 1");
  if (k_max > 60) throw ArgumentError("k_max above 60 is not representable on dyadic cells");
  std::vector<TowerCell> cells;
  std::vector<std::uint32_t> itinerary{0};
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double lo = 0.5 - std::ldexp(1.0, -static_cast<int>(k));
    const double hi = 0.5 - std::ldexp(1.0, -static_cast<int>(k) - 1);
    const double slope = std::ldexp(1.0, static_cast<int>(k));
    cells.push_back({{lo, hi}, k, itinerary, true, slope, slope});
    itinerary.push_back(1);
  }
  itinerary.pop_back();
  std::vector<DeficitPiece> deficit{{{0.5 - std::ldexp(1.0, -static_cast<int>(k_max) - 1), 0.5}, itinerary}};
  InducedMarkovMap F(MapSystem::doubling(), {0.0, 0.5}, std::move(cells), std::move(deficit), k_max);
  F.set_constants(0.5, 0.0);
  return F;
}

InducedMarkovMap first_return_map(const MapSystem& map, Interval delta, std::size_t tau_max, double tol) {
  if (map.dimension() != 1) throw ArgumentError("first_return_map needs a one-dimensional map");
  if (tau_max < 1) throw ArgumentError("tau_max must be >= 1");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  const Interval dom = map.domain().span;
  if (!(delta.hi > delta.lo) || delta.lo < dom.lo || delta.hi > dom.hi)
    throw ArgumentError("inducing domain " + show(delta) + " is not a subinterval of the domain");

  struct Piece {
    Interval image;
    std::vector<std::uint32_t> itinerary;
  };
  // A scratch map used only for pulling points back along itineraries.
  const InducedMarkovMap scratch(map, delta, {}, {}, tau_max);
  auto pull_interval = [&](const std::vector<std::uint32_t>& itin, Interval y) {
    return Interval::spanning(scratch.pull(itin, itin.size(), y.lo), scratch.pull(itin, itin.size(), y.hi));
  };

  std::vector<TowerCell> cells;
  std::vector<Piece> pending{{delta, {}}};
  const std::size_t branches = map.branch_count();
  for (std::size_t k = 1; k <= tau_max && !pending.empty(); ++k) {
    std::vector<Piece> next;
    for (const Piece& piece : pending) {
      for (std::uint32_t b = 0; b < branches; ++b) {
        const Interval S = map.branch_support(b);
        const Interval J{std::max(piece.image.lo, S.lo), std::min(piece.image.hi, S.hi)};
        if (!(J.length() > tol)) continue;
        const Interval img = Interval::spanning(map.branch_value(b, J.lo), map.branch_value(b, J.hi));
        auto itin = piece.itinerary;
        itin.push_back(b);
        const double inside = overlap_length(img, delta);
        if (inside <= tol) {
          next.push_back({img, std::move(itin)});
          continue;
        }
        if (img.lo > delta.lo + tol || img.hi < delta.hi - tol) {
          const Interval hit{std::max(img.lo, delta.lo), std::min(img.hi, delta.hi)};
          throw ConstructionError("return at step " + std::to_string(k) + " of " + show(pull_interval(itin, hit)) +
                                  " covers only " + show(hit) + " of the inducing domain (not Markov)");
        }
        const double g_lo = scratch.pull(itin, k, delta.lo);
        const double g_hi = scratch.pull(itin, k, delta.hi);
        TowerCell cell;
        cell.support = Interval::spanning(g_lo, g_hi);
        cell.tau = k;
        cell.increasing = g_lo < g_hi;
        if (delta.lo - img.lo > tol) next.push_back({{img.lo, delta.lo}, itin});
        if (img.hi - delta.hi > tol) next.push_back({{delta.hi, img.hi}, itin});
        cell.itinerary = std::move(itin);
        cells.push_back(std::move(cell));
      }
    }
    if (next.size() > kMaxPieces) throw ConstructionError("first-return construction exceeded the piece budget");
    pending = std::move(next);
  }

  std::vector<DeficitPiece> deficit;
  for (const Piece& piece : pending) {
    if (piece.itinerary.size() < tau_max) continue;  // pieces that left for good
    deficit.push_back({pull_interval(piece.itinerary, piece.image), piece.itinerary});
  }
  return finish(InducedMarkovMap(map, delta, std::move(cells), std::move(deficit), tau_max));
}

}  // namespace srblab
