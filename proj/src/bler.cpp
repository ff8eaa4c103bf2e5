#include "polarforge/bler.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "polarforge/rca.hpp"

namespace polarforge::bler {

namespace {

double estimate_over_sorted_set(const polarization::PolarizationProfile& profile,
                                const std::vector<std::uint32_t>& info_set,
                                std::vector<double>& per_bit) {
  per_bit.clear();
  per_bit.reserve(info_set.size());
  double log_ok = 0.0;  // sum of ln(1 - P_k)
  for (std::uint32_t idx : info_set) {
    const double p = bit_error_prob(profile[idx]);
    per_bit.push_back(p);
    log_ok += std::log1p(-p);
  }
  return -std::expm1(log_ok);
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double bit_error_prob(double xi_hat) {
  if (xi_hat == rca::kNegInf) return 0.5;
  const double gamma = std::exp(xi_hat);
  return q_function(std::sqrt(2.0 * gamma));
}

BlerEstimate estimate_bler(const polarization::PolarizationProfile& profile,
                           std::uint32_t k) {
  if (k > profile.size()) {
    throw std::invalid_argument("estimate_bler: k exceeds the block length");
  }
  const polarization::CodeConstruction code =
      polarization::select_information_set(profile, k);
  BlerEstimate est;
  est.bler = estimate_over_sorted_set(profile, code.info_set, est.per_bit);
  return est;
}

BlerEstimate estimate_bler(const polarization::PolarizationProfile& profile,
                           const std::vector<std::uint32_t>& info_set) {
  if (info_set.size() > profile.size()) {
    throw std::invalid_argument("estimate_bler: info set larger than the block");
  }
  std::vector<bool> seen(profile.size(), false);
  for (std::uint32_t idx : info_set) {
    if (idx >= profile.size()) {
      throw std::invalid_argument("estimate_bler: info index out of range");
    }
    if (seen[idx]) {
      throw std::invalid_argument("estimate_bler: duplicate info index");
    }
    seen[idx] = true;
  }
  BlerEstimate est;
  est.bler = estimate_over_sorted_set(profile, info_set, est.per_bit);
  return est;
}

double find_design_snr(int n, std::uint32_t k, double target_bler,
                       double lo_db, double hi_db, double est_tol) {
  if (!(target_bler > 0.0 && target_bler < 1.0)) {
    throw std::invalid_argument("find_design_snr: target must lie in (0, 1)");
  }
  if (!(lo_db < hi_db)) {
    throw std::invalid_argument("find_design_snr: empty bracket");
  }
  const auto estimate_at = [n, k](double db) {
    return estimate_bler(
               polarization::polarize_uniform(n, rca::log_snr_from_db(db)), k)
        .bler;
  };
  if (estimate_at(lo_db) < target_bler || estimate_at(hi_db) > target_bler) {
    throw std::invalid_argument("find_design_snr: bracket does not straddle target");
  }
  double lo = lo_db;
  double hi = hi_db;
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    const double est = estimate_at(mid);
    if (std::fabs(est - target_bler) <= est_tol) return mid;
    if (est > target_bler) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string to_json(const BlerEstimate& estimate) {
  char rounded[40];
  std::snprintf(rounded, sizeof rounded, "%.5e", estimate.bler);
  nlohmann::json j;
  j["bler"] = std::strtod(rounded, nullptr);
  j["per_bit"] = estimate.per_bit;
  return j.dump(2) + "\n";
}

std::string per_bit_csv(const polarization::PolarizationProfile& profile,
                        const polarization::CodeConstruction& code) {
  std::string out = "index,xi_hat,p_bit\n";
  char line[96];
  for (std::uint32_t idx : code.info_set) {
    std::snprintf(line, sizeof line, "%u,%.12g,%.12g\n", idx, profile[idx],
                  bit_error_prob(profile[idx]));
    out += line;
  }
  return out;
}

}  // namespace polarforge::bler
