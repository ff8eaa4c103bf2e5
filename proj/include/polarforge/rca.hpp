#pragma once

// Reciprocal channel mapping in the log-SNR domain.  A channel with SNR
// gamma has the reciprocal SNR psi(gamma) defined by C(psi) = 1 - C(gamma);
// reciprocal SNRs add at check nodes exactly as plain SNRs add at variable
// nodes.  Everything here works on xi = ln(gamma), with lambda_log(xi) =
// ln(psi(exp(xi))) built from the closed-form capacity branches.

#include <limits>
#include <numbers>

namespace polarforge::rca {

// Fully degraded channel (gamma = 0).  Absorbing for check nodes, identity
// for variable nodes.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// dB-to-log-SNR boundary conversion: xi = ln(10^(db/10)).
inline constexpr double log_snr_from_db(double db) {
  return db * std::numbers::ln10 / 10.0;
}

// ln(psi(exp(xi))).  Strictly decreasing; approximately self-inverse.
// Uses a series asymptote below kXiAsym and a log-tail asymptote above
// ln(kGamma3), the exact branch inversions in between.  Domain: finite xi;
// throws std::domain_error on non-finite input (kNegInf included; the
// combiners treat that value themselves and never pass it down).
double lambda_log(double xi);

// Stable ln(exp(a) + exp(b)); -inf acts as the identity.
double log_sum_exp(double a, double b);

// Check-node SNR update: reciprocal SNRs add.  kNegInf absorbs.
double check_node_combine(double xi0, double xi1);

// Variable-node SNR update: SNRs add.  kNegInf is the identity.
double variable_node_combine(double xi0, double xi1);

}  // namespace polarforge::rca
