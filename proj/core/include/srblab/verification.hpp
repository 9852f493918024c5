#pragma once

#include "srblab/induced_map.hpp"

namespace srblab {

struct VerificationTolerances {
  double markov = 1e-6;      // onto-defect, relative to |Delta|
  double expansion = 1e-12;  // slack on kappa < 1
  // Distortion passes when K is finite; a limit can be imposed for tests.
  double distortion_limit = 1e12;
};

struct VerificationReport {
  double onto_defect = 0.0;  // worst Hausdorff gap between F(omega) and Delta
  std::size_t onto_witness = 0;
  double kappa = 0.0;        // max over samples of 1/|DF|
  double kappa_witness = 0.0;
  double K = 0.0;            // sup |DF(x)/DF(y) - 1| / |F(x) - F(y)|
  double K_witness_x = 0.0;
  double K_witness_y = 0.0;
  double L = 0.0;            // diameter bound entering the a-priori constants
  double K1 = 1.0;           // exp(K L kappa / (1 - kappa))
  double K0 = 1.0;           // K1^2
  double C0_a_priori = 1.0;  // K0 / m(Delta)
  std::size_t samples = 0;
  bool markov_pass = false;
  bool expansion_pass = false;
  bool distortion_pass = false;

  bool pass() const noexcept { return markov_pass && expansion_pass && distortion_pass; }
};

// Samples per cell: max(min_samples, ceil(m(omega) / 1e-4)), endpoints
// included. Throws VerificationError for a cell with fewer than two usable
// samples.
VerificationReport verify_axioms(const InducedMarkovMap& F, std::size_t min_samples = 64,
                                 const VerificationTolerances& tol = {});

// An induced map whose axioms were checked. Estimators that rely on the
// axioms take this type.
class VerifiedTower {
 public:
  // Throws RefusalError if verification fails.
  static VerifiedTower verify(InducedMarkovMap F, std::size_t min_samples = 64,
                              const VerificationTolerances& tol = {});

  const InducedMarkovMap& map() const noexcept { return map_; }
  const VerificationReport& report() const noexcept { return report_; }
  const InducedMarkovMap* operator->() const noexcept { return &map_; }

 private:
  VerifiedTower(InducedMarkovMap F, VerificationReport r) : map_(std::move(F)), report_(r) {}

  InducedMarkovMap map_;
  VerificationReport report_;
};

}  // namespace srblab
