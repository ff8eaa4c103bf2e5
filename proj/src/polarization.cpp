#include "polarforge/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "polarforge/rca.hpp"

namespace polarforge::polarization {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Index order for "kth largest, ties toward the smaller index".
struct ProfileRank {
  const PolarizationProfile& xs;
  bool operator()(std::uint32_t a, std::uint32_t b) const {
    if (xs[a] != xs[b]) return xs[a] > xs[b];
    return a < b;
  }
};

}  // namespace

PolarizationProfile polarize_uniform(int n, double xi0) {
  if (n < 0 || n > kMaxStages) {
    throw std::invalid_argument("polarize_uniform: n must lie in [0, 24]");
  }
  PolarizationProfile xs(std::size_t{1} << n);
  xs[0] = xi0;
  // Prefix doubling: after stage i the first 2^i entries hold the profile
  // of a length-2^i code.
  for (int i = 1; i <= n; ++i) {
    const std::size_t half = std::size_t{1} << (i - 1);
    for (std::size_t j = 0; j < half; ++j) {
      const double x0 = xs[j];
      xs[j] = rca::check_node_combine(x0, x0);
      xs[j + half] = rca::variable_node_combine(x0, x0);
    }
  }
  return xs;
}

PolarizationProfile polarize_distinct(PolarizationProfile xs) {
  const std::size_t n_total = xs.size();
  if (!is_power_of_two(n_total) || n_total > (std::size_t{1} << kMaxStages)) {
    throw std::invalid_argument(
        "polarize_distinct: length must be a power of two at most 2^24");
  }
  for (std::size_t block = 2; block <= n_total; block <<= 1) {
    const std::size_t half = block / 2;
    for (std::size_t base = 0; base < n_total; base += block) {
      for (std::size_t j = 0; j < half; ++j) {
        const double a = xs[base + j];
        const double b = xs[base + j + half];
        xs[base + j] = rca::check_node_combine(a, b);
        xs[base + j + half] = rca::variable_node_combine(a, b);
      }
    }
  }
  return xs;
}

std::vector<std::uint8_t> CodeConstruction::frozen_mask() const {
  std::vector<std::uint8_t> mask(block_length, 1);
  for (std::uint32_t idx : info_set) mask[idx] = 0;
  return mask;
}

CodeConstruction select_information_set(const PolarizationProfile& profile,
                                        std::uint32_t k,
                                        double design_snr_db) {
  const std::size_t n_total = profile.size();
  if (n_total == 0 || n_total > (std::size_t{1} << kMaxStages) ||
      (n_total & (n_total - 1)) != 0) {
    throw std::invalid_argument(
        "select_information_set: profile length must be a power of two");
  }
  if (k > n_total) {
    throw std::invalid_argument("select_information_set: k exceeds the block length");
  }
  std::vector<std::uint32_t> order(n_total);
  std::iota(order.begin(), order.end(), 0u);
  const ProfileRank rank{profile};
  if (k > 0 && k < n_total) {
    std::nth_element(order.begin(), order.begin() + k, order.end(), rank);
  }
  CodeConstruction code;
  code.block_length = static_cast<std::uint32_t>(n_total);
  code.dimension = k;
  code.design_snr_db = design_snr_db;
  code.info_set.assign(order.begin(), order.begin() + k);
  std::sort(code.info_set.begin(), code.info_set.end());
  return code;
}

std::string to_json(const CodeConstruction& code) {
  nlohmann::json j;
  j["n"] = code.block_length;
  j["k"] = code.dimension;
  if (std::isnan(code.design_snr_db)) {
    j["design_snr_db"] = nullptr;
  } else {
    j["design_snr_db"] = code.design_snr_db;
  }
  j["method"] = code.method;
  j["info_set"] = code.info_set;
  return j.dump(2) + "\n";
}

CodeConstruction construction_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CodeConstruction code;
  code.block_length = j.at("n").get<std::uint32_t>();
  code.dimension = j.at("k").get<std::uint32_t>();
  if (j.at("design_snr_db").is_null()) {
    code.design_snr_db = std::nan("");
  } else {
    code.design_snr_db = j.at("design_snr_db").get<double>();
  }
  code.method = j.at("method").get<std::string>();
  code.info_set = j.at("info_set").get<std::vector<std::uint32_t>>();

  if (!is_power_of_two(code.block_length)) {
    throw std::invalid_argument("construction: n must be a power of two");
  }
  if (code.info_set.size() != code.dimension) {
    throw std::invalid_argument("construction: info_set size does not match k");
  }
  std::sort(code.info_set.begin(), code.info_set.end());
  for (std::size_t i = 0; i < code.info_set.size(); ++i) {
    if (code.info_set[i] >= code.block_length) {
      throw std::invalid_argument("construction: info index out of range");
    }
    if (i > 0 && code.info_set[i] == code.info_set[i - 1]) {
      throw std::invalid_argument("construction: duplicate info index");
    }
  }
  return code;
}

std::string to_frozen_mask_text(const CodeConstruction& code) {
  const std::vector<std::uint8_t> frozen = code.frozen_mask();
  std::string out;
  out.reserve(2 * frozen.size());
  for (std::uint8_t f : frozen) {
    out += f ? '0' : '1';
    out += '\n';
  }
  return out;
}

}  // namespace polarforge::polarization
