#pragma once

// Analytical block-error-rate estimate for a polarized profile: per-bit
// error probabilities from the Gaussian LLR model, combined over the
// information set, plus a bisection search for the design SNR that meets a
// target BLER.

#include <cstdint>
#include <string>
#include <vector>

#include "polarforge/polarization.hpp"

namespace polarforge::bler {

struct BlerEstimate {
  double bler = 0.0;
  std::vector<double> per_bit;  // aligned with the info set, ascending index
};

// Gaussian tail Q(x) = erfc(x / sqrt(2)) / 2.
double q_function(double x);

// Error probability of a bit whose polarized log-SNR is xi_hat.  With the
// LLR of a transmitted bit distributed N(4 gamma, 8 gamma), the decision
// error is Q(mean / stddev) = Q(sqrt(2 gamma)).  kNegInf maps to 1/2.
double bit_error_prob(double xi_hat);

// BLER over the best-K information set of the profile (or an explicit set),
// 1 - prod(1 - P_k) accumulated in the log domain.  An empty set (k = 0)
// yields 0; duplicate or out-of-range indices throw.
BlerEstimate estimate_bler(const polarization::PolarizationProfile& profile,
                           std::uint32_t k);
BlerEstimate estimate_bler(const polarization::PolarizationProfile& profile,
                           const std::vector<std::uint32_t>& info_set);

// Design SNR in dB at which the (2^n, k) estimate meets target_bler.
// Bisection on [lo_db, hi_db]: stops when |estimate - target| <= est_tol or
// the bracket narrows to 0.01 dB.  Throws std::invalid_argument when the
// bracket does not straddle the target.
double find_design_snr(int n, std::uint32_t k, double target_bler,
                       double lo_db, double hi_db, double est_tol = 1e-4);

// {"bler": ..., "per_bit": [...]}, bler at 6 significant digits.
std::string to_json(const BlerEstimate& estimate);

// CSV with header index,xi_hat,p_bit over the construction's info set.
std::string per_bit_csv(const polarization::PolarizationProfile& profile,
                        const polarization::CodeConstruction& code);

}  // namespace polarforge::bler
