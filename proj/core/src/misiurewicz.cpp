#include "srblab/misiurewicz.hpp"

#include <cmath>
#include <mutex>

#include "srblab/error.hpp"

namespace srblab {

double misiurewicz_landing_defect(double a, int k) {
  double x = 0.0;
  for (int i = 0; i < k; ++i) x = a - x * x;
  return x - 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * a));
}

namespace {

double search() {
  constexpr int grid = 4096;
  constexpr double lo_a = 1.0, hi_a = 2.0;
  double best = HUGE_VAL;
  for (int k = 1; k <= 64; ++k) {
    double prev_a = lo_a + (hi_a - lo_a) / grid;
    double prev = misiurewicz_landing_defect(prev_a, k);
    for (int i = 2; i < grid; ++i) {
      const double a = lo_a + (hi_a - lo_a) * i / grid;
      const double v = misiurewicz_landing_defect(a, k);
      if ((prev < 0.0) != (v < 0.0)) {
        double lo = prev_a, hi = a;
        const bool rising = prev < 0.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const bool below = misiurewicz_landing_defect(mid, k) < 0.0;
          if (below == rising) lo = mid; else hi = mid;
        }
        const double root = 0.5 * (lo + hi);
        const double defect = std::abs(misiurewicz_landing_defect(root, k));
        best = std::min(best, defect);
        if (defect <= 1e-12) return root;
      }
      prev_a = a;
      prev = v;
    }
  }
  throw ConvergenceError("no preperiodic critical orbit found for a in (1, 2)", best, 64);
}

}  // namespace

double misiurewicz_parameter() {
  static const double value = search();
  return value;
}

}  // namespace srblab
