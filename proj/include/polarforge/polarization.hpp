#pragma once

// Channel polarization over the 2x2 kernel, tracked with the reciprocal
// channel combiners, plus information-set selection and the construction
// file formats.
//
// Index convention: the profile entry at index k is the polarized log-SNR of
// encoder input bit u_k under the same butterfly layout as the encoder (no
// bit-reversal permutation anywhere).  Stage i pairs indices (base+j,
// base+j+2^{i-1}); the low index takes the check-node role, the high index
// the variable-node role.

#include <cstdint>
#include <string>
#include <vector>

namespace polarforge::polarization {

using PolarizationProfile = std::vector<double>;

inline constexpr int kMaxStages = 24;

// Polarized profile for N = 2^n copies of one channel at log-SNR xi0.
// Prefix-doubling recursion, O(N) combiner evaluations.
PolarizationProfile polarize_uniform(int n, double xi0);

// Polarized profile for N distinct channel log-SNRs (length a power of two,
// at most 2^kMaxStages).  In-place stage/block/offset recursion; equals
// polarize_uniform when all inputs coincide.
PolarizationProfile polarize_distinct(PolarizationProfile xs);

struct CodeConstruction {
  std::uint32_t block_length = 0;  // N, power of two
  std::uint32_t dimension = 0;     // K
  double design_snr_db = 0.0;      // NaN when built from per-channel SNRs
  std::string method = "rca";
  std::vector<std::uint32_t> info_set;  // ascending indices, size K

  // N bytes, 1 = frozen position.
  std::vector<std::uint8_t> frozen_mask() const;
};

// The K indices with the largest profile entries; ties broken toward the
// smaller index.  design_snr_db is carried through for serialization.
CodeConstruction select_information_set(const PolarizationProfile& profile,
                                        std::uint32_t k,
                                        double design_snr_db = 0.0);

// {"n": N, "k": K, "design_snr_db": ..., "method": "rca",
//  "info_set": [sorted]}.  "n" is the block length N; design_snr_db is null
// for per-channel constructions.
std::string to_json(const CodeConstruction& code);
CodeConstruction construction_from_json(const std::string& text);

// N lines, one character per line: 0 = frozen, 1 = information.
std::string to_frozen_mask_text(const CodeConstruction& code);

}  // namespace polarforge::polarization
