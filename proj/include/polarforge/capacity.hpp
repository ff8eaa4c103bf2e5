#pragma once

// Closed-form piecewise approximation of the BI-AWGN channel capacity C(gamma)
// and its complement U(gamma) = 1 - C(gamma), gamma = Es/N0 linear.  Four
// regions: a cubic series complement at low SNR, two fitted stretched
// exponentials in the middle, and an exponential tail at high SNR.  The
// closed-form inverse covers the same four regions (Lambert W for the tail).
// A composite-quadrature oracle evaluates the defining integral directly; it
// is slow and exists for tests and error reports only.

#include <string>
#include <vector>

namespace polarforge::capacity {

// Region boundaries (linear SNR).
inline constexpr double kGamma1 = 0.04;
inline constexpr double kGamma2 = 1.0;
inline constexpr double kGamma3 = 10.0;

// High-SNR tail coefficient: U4(gamma) = alpha * exp(-gamma) / sqrt(gamma).
inline constexpr double kAlpha = 1.16125142;

// Stretched-exponential fits for the two mid regions:
// U(gamma) = 1 - (1 - exp(-h1 * gamma^h2))^h3.
inline constexpr double kH21 = 1.396634;
inline constexpr double kH22 = 0.872764;
inline constexpr double kH23 = 1.148562;
inline constexpr double kH31 = 1.266967;
inline constexpr double kH32 = 0.938175;
inline constexpr double kH33 = 0.986830;

// U at the region boundaries.
inline constexpr double kU1c = 0.9444774;
inline constexpr double kU2c = 0.2785484;
inline constexpr double kU3c = 1.667e-5;

// C at the region boundaries (complements of the above, to their stored
// precision; used to pick inverse branches).
inline constexpr double kC1 = 0.055523;
inline constexpr double kC2 = 0.721452;
inline constexpr double kC3 = 0.999983;

// Switchover for the very-low-SNR asymptote of the reciprocal map (used by
// the rca module; kept here with the rest of the constant block).
inline constexpr double kGammaAsym = 1.21974e-5;
inline constexpr double kXiAsym = -11.3143;

// Complement U_hat(gamma) of the approximate capacity.  Domain: gamma > 0,
// finite; throws std::domain_error otherwise.
double u_hat(double gamma);

// Approximate capacity C_hat(gamma) = 1 - u_hat(gamma), strictly increasing.
double c_hat(double gamma);

// Closed-form inverse of c_hat.  Domain: 0 < c < 1.
double c_hat_inverse(double c);

// Inverse of u_hat, evaluated directly in the complement so that channels
// with capacity extremely close to 1 (where 1-c loses all relative precision
// in a double) can still be inverted accurately.  Domain: 0 < u < 1.
double capacity_complement_inverse(double u);

// Principal branch of the Lambert W function for x > 0: returns w with
// w * exp(w) = x to relative 1e-12.  Halley iteration.
double lambert_w0(double x);

// Quadrature evaluation of the defining integral
//   U(gamma) = (1/sqrt(pi)) * Integral exp(-z^2) log2(1 + exp(-(4g + 4 sqrt(g) z))) dz
// by composite Gauss-Legendre panels; the panel count is refined until two
// successive passes agree to 1e-10; throws std::runtime_error otherwise.
double complement_oracle(double gamma);

// 1 - complement_oracle(gamma).
double capacity_oracle(double gamma);

// Curve-fit J-function approximations kept only for the error comparison
// below; x is the LLR standard deviation, x = sqrt(8 * gamma).
double j_tenbrink(double x);
double j_brannstrom(double x);

struct ErrorReportRow {
  double gamma_db;
  double eps_proposed;
  double eps_tenbrink;
  double eps_brannstrom;
};

// Signed approximation errors against the quadrature oracle on the given
// grid of linear SNRs.
std::vector<ErrorReportRow> error_report(const std::vector<double>& gammas);

// CSV with header gamma_db,eps_proposed,eps_tenbrink,eps_brannstrom,
// 12 significant digits.
std::string error_report_csv(const std::vector<ErrorReportRow>& rows);

namespace detail {
// A(c) of the cubic inverse branch (c below kC1):
// c_hat_inverse(c) = (1 - 3/A + A) / 4.  Shared with the reciprocal map,
// which needs the same branch in log form.
double cubic_a(double c);
}  // namespace detail

}  // namespace polarforge::capacity
