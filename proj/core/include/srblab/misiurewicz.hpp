#pragma once

namespace srblab {

// The parameter a in (1, 2) at which the critical orbit of p(x) = a - x^2
// lands on the orientation-reversing fixed point x+(a) = (-1 + sqrt(1 + 4a)) / 2.
// Found by scanning the landing iterate k = 1..64 with bisection and cached
// after the first call. Throws ConvergenceError if no k lands within 1e-12.
double misiurewicz_parameter();

// p_a^k(0) - x+(a).
double misiurewicz_landing_defect(double a, int k);

}  // namespace srblab
