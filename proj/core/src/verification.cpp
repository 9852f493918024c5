#include "srblab/verification.hpp"

#include <cmath>

#include "srblab/parallel.hpp"

namespace srblab {

namespace {

struct CellStats {
  double onto = 0.0;
  double kappa = 0.0;
  double kappa_x = 0.0;
  double K = 0.0;
  double K_x = 0.0, K_y = 0.0;
  std::size_t samples = 0;
};

double hausdorff(const Interval& a, const Interval& b) {
  return std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi));
}

CellStats measure_cell(const InducedMarkovMap& F, std::size_t index, std::size_t min_samples) {
  const TowerCell& cell = F.cells()[index];
  const Interval s = cell.support;
  const auto by_mass = static_cast<std::size_t>(std::ceil(s.length() / 1e-4));
  const std::size_t n = std::max(min_samples, by_mass);
  std::vector<double> xs, fx, df;
  xs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? s.hi : s.lo + s.length() * static_cast<double>(i) / static_cast<double>(n - 1);
    if (!xs.empty() && x <= xs.back()) continue;
    const double d = F.derivative(index, x);
    if (!std::isfinite(d) || d == 0.0) continue;
    xs.push_back(x);
    fx.push_back(F.eval(index, x));
    df.push_back(d);
  }
  if (xs.size() < 2) {
    throw VerificationError("cell " + std::to_string(index) + " has fewer than 2 usable samples");
  }

  CellStats st;
  st.samples = xs.size();
  st.onto = hausdorff(Interval::spanning(F.eval(index, s.lo), F.eval(index, s.hi)), F.delta());
  std::size_t lo_i = 0, hi_i = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double k = 1.0 / df[i];
    if (k > st.kappa) {
      st.kappa = k;
      st.kappa_x = xs[i];
    }
    if (df[i] < df[lo_i]) lo_i = i;
    if (df[i] > df[hi_i]) hi_i = i;
  }
  // Pairs: neighbours, and every sample against the extreme-derivative samples.
  auto pair = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    const double gap = std::abs(fx[i] - fx[j]);
    if (!(gap > 0.0)) return;
    const double k = std::abs(df[i] / df[j] - 1.0) / gap;
    if (k > st.K) {
      st.K = k;
      st.K_x = xs[i];
      st.K_y = xs[j];
    }
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i + 1 < xs.size()) {
      pair(i, i + 1);
      pair(i + 1, i);
    }
    pair(i, lo_i);
    pair(i, hi_i);
    pair(lo_i, i);
    pair(hi_i, i);
  }
  return st;
}

}  // namespace

VerificationReport verify_axioms(const InducedMarkovMap& F, std::size_t min_samples,
                                 const VerificationTolerances& tol) {
  if (F.cells().empty()) throw VerificationError("induced map has no cells");
  if (min_samples < 2) throw ArgumentError("need at least 2 samples per cell");
  const auto stats = parallel::map_indices<CellStats>(
      F.cells().size(), [&](std::size_t i) { return measure_cell(F, i, min_samples); }, 1);

  VerificationReport r;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& st = stats[i];
    r.samples += st.samples;
    if (st.onto > r.onto_defect) {
      r.onto_defect = st.onto;
      r.onto_witness = i;
    }
    if (st.kappa > r.kappa) {
      r.kappa = st.kappa;
      r.kappa_witness = st.kappa_x;
    }
    if (st.K > r.K) {
      r.K = st.K;
      r.K_witness_x = st.K_x;
      r.K_witness_y = st.K_y;
    }
  }
  r.L = F.base().domain().diameter();
  r.markov_pass = r.onto_defect <= tol.markov * F.delta().length();
  r.expansion_pass = r.kappa < 1.0 - tol.expansion;
  r.distortion_pass = std::isfinite(r.K) && r.K <= tol.distortion_limit;
  if (r.kappa < 1.0) {
    r.K1 = std::exp(r.K * r.L * r.kappa / (1.0 - r.kappa));
  } else {
    r.K1 = HUGE_VAL;
  }
  r.K0 = r.K1 * r.K1;
  r.C0_a_priori = r.K0 / F.delta().length();
  return r;
}

VerifiedTower VerifiedTower::verify(InducedMarkovMap F, std::size_t min_samples, const VerificationTolerances& tol) {
  VerificationReport r = verify_axioms(F, min_samples, tol);
  if (!r.pass()) {
    std::string failed;
    if (!r.markov_pass) failed += " markov(onto-defect " + std::to_string(r.onto_defect) + ")";
    if (!r.expansion_pass) failed += " expansion(kappa " + std::to_string(r.kappa) + ")";
    if (!r.distortion_pass) failed += " distortion(K " + std::to_string(r.K) + ")";
    throw RefusalError("induced map failed axiom verification:" + failed);
  }
  F.set_constants(r.kappa, r.K);
  return VerifiedTower(std::move(F), r);
}

}  // namespace srblab
