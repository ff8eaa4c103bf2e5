#include "polarforge/rca.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polarforge/capacity.hpp"

namespace polarforge::rca {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Largest gamma the tail branch is allowed to see; beyond this exp(xi)
// saturates and lambda heads to -inf gracefully.
constexpr double kGammaCap = 1e300;

}  // namespace

double lambda_log(double xi) {
  using namespace polarforge::capacity;
  if (!std::isfinite(xi)) {
    throw std::domain_error("lambda_log: xi must be finite");
  }

  if (xi < kXiAsym) {
    // Deeply degraded input: series asymptote of the reciprocal log-SNR,
    // derived from the Lambert-W tail without evaluating W itself.
    const double b = kLn2 + 2.0 * (std::log(kAlpha) + std::log(kLn2)) - 2.0 * xi;
    return std::log(b + (1.0 / b - 1.0) * std::log(b)) - kLn2;
  }

  double g = std::exp(xi);
  if (g > kGammaCap) g = kGammaCap;
  if (g > kGamma3) {
    // Excellent input: reciprocal complement is the exponential tail, so
    // ln(psi) collapses to a linear-plus-log expression.
    return std::log(kLn2) + std::log(kAlpha) - g - 0.5 * xi;
  }

  // Mid range: complement through the matching branch, then invert the
  // capacity at that value, in log form throughout.
  const double u = u_hat(g);
  if (u < kC1) {
    const double a = detail::cubic_a(u);
    return std::log(1.0 - 3.0 / a + a) - 2.0 * kLn2;
  }
  if (u < kC2) {
    const double t = -std::log1p(-std::pow(u, 1.0 / kH23));
    return (std::log(t) - std::log(kH21)) / kH22;
  }
  const double t = -std::log1p(-std::pow(u, 1.0 / kH33));
  return (std::log(t) - std::log(kH31)) / kH32;
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

double check_node_combine(double xi0, double xi1) {
  if (xi0 == kNegInf || xi1 == kNegInf) return kNegInf;
  const double l0 = lambda_log(xi0);
  const double l1 = lambda_log(xi1);
  return lambda_log(log_sum_exp(l0, l1));
}

double variable_node_combine(double xi0, double xi1) {
  if (xi0 == kNegInf) return xi1;
  if (xi1 == kNegInf) return xi0;
  return log_sum_exp(xi0, xi1);
}

}  // namespace polarforge::rca
