#pragma once

// Randomized numerical checks of the heat-kernel mollifier J_eps:
//   1. sup |J f| <= sup |f| and J f -> f uniformly,
//   2. derivatives commute with J,
//   3. int (J v) w = int (J w) v,
//   4. ||J f - f||_{H^{m-1}} <= eps ||f||_{H^m},
//   5. eps^nu ||J f||_{H^{m+nu}} <= C ||f||_{H^m} uniformly in eps.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlspec/spectral.hpp"

namespace nlspec {

/// Random real field whose modes satisfy 0 < |k|^2 <= max_k2, plus a random
/// mean. Coefficients are standard normal (Hermitian-paired).
SpectralField random_band_limited(const TorusGrid& grid, double max_k2, std::mt19937_64& rng);

/// Sup of |f| over the continuous torus for a band-limited field: dense
/// resampling to bracket the candidates, then Newton polishing of each
/// candidate local maximum.
double continuous_sup_abs(const SpectralField& f);

struct MollifierSuiteConfig {
  int dim = 1;
  int n = 64;
  int m = 5;
  int nu = 2;
  int seeds = 100;
  std::uint64_t seed = 20240601;
};

struct LemmaCheck {
  std::string item;         // "1-contraction", "1-uniform", "2", "3", "4-rate", "4-limit", "5"
  std::string description;
  double worst = 0.0;       // worst observed statistic
  double tolerance = 0.0;   // pass iff worst <= tolerance
  bool passed = false;
};

struct MollifierSuiteReport {
  MollifierSuiteConfig config;
  double band_k2 = 0.0;  // squared wavenumber bound of the random fields
  std::vector<LemmaCheck> checks;
  /// Literal max/min of eps^nu ||J f||_{H^{m+nu}} over the item-5 ladder (diagnostic).
  double item5_max_over_min = 0.0;

  bool all_passed() const;
};

/// Band limit keeping item 4 constant-free under the exp(-eps |k|^2)
/// multiplier: |k|^2 <= 4 pi^2 / d.
double mollifier_suite_band(int dim);

/// Throws ContractError unless m > d/2 and m + nu <= kMaxDerivativeOrder.
MollifierSuiteReport mollifier_lemma_suite(const MollifierSuiteConfig& config);

}  // namespace nlspec
