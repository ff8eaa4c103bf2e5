#pragma once

// Monte Carlo validation chain: polar encoder, BPSK over AWGN with exact
// LLRs, successive-cancellation decoder, and a deterministic multi-worker
// block-error harness.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "polarforge/polarization.hpp"

namespace polarforge::sim {

// xoshiro256++ with splitmix64 seeding.  long_jump() advances 2^192 steps,
// so streams derived by repeated jumps never overlap at feasible trial
// counts.  Gaussians come from polar-form Box-Muller, which keeps the
// output sequence identical across compilers and standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();   // [0, 1), 53-bit
  double gaussian();  // standard normal
  void long_jump();

 private:
  std::array<std::uint64_t, 4> state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

// Polar transform x = u F^{(x)n} over GF(2), in the butterfly layout shared
// with the polarization recursion.  The construction supplies the expected
// length; frozen positions of u must already be zero.
std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& u,
                                 const polarization::CodeConstruction& code);

// BPSK (bit b -> symbol 1-2b), noise variance 1/(2 gamma0) per real symbol,
// LLR = 4 gamma0 y: the LLR of a transmitted 0 is N(4 gamma0, 8 gamma0).
std::vector<double> awgn_llrs(const std::vector<std::uint8_t>& x,
                              double gamma0, RandomStream& rng);

// Reusable successive-cancellation decoder for one block length.  Scratch
// arenas are allocated once; decode() is O(N log N) with the exact
// check-node combine (atanh form, evaluated in a stable log decomposition)
// and g(a, b, u) = b + (1-2u) a.  Frozen positions decide 0.
class ScDecoder {
 public:
  explicit ScDecoder(std::uint32_t block_length);

  // llr and frozen have block_length entries; u_hat receives all N
  // decisions.
  void decode(const double* llr, const std::uint8_t* frozen,
              std::uint8_t* u_hat);

  std::uint32_t block_length() const { return block_length_; }

 private:
  void decode_node(const double* llr, std::uint32_t len, std::uint8_t* x_out,
                   std::uint32_t u_offset, std::uint32_t u_stride,
                   double* scratch, std::uint8_t* bit_scratch);

  std::uint32_t block_length_;
  const std::uint8_t* frozen_ = nullptr;
  std::uint8_t* u_hat_ = nullptr;
  std::vector<double> llr_arena_;        // N-1
  std::vector<std::uint8_t> bit_arena_;  // 2N-2
  std::vector<std::uint8_t> root_x_;     // N
};

struct ScResult {
  std::vector<std::uint8_t> u_hat;      // all N decisions
  std::vector<std::uint8_t> info_bits;  // K decisions, info set ascending
};

// One-shot convenience wrapper around ScDecoder.
ScResult sc_decode(const std::vector<double>& llrs,
                   const polarization::CodeConstruction& code);

struct SimConfig {
  polarization::CodeConstruction construction;
  double channel_snr_db = 0.0;
  std::uint64_t max_trials = 100000;
  std::uint64_t target_block_errors = 100;
  std::uint64_t seed = 0;
  std::uint32_t worker_count = 1;
  bool all_zero_codeword = false;  // symmetry shortcut, off by default
};

struct SimResult {
  std::uint64_t trials_run = 0;
  std::uint64_t block_errors = 0;
  double bler_point = 0.0;
  double ci95_halfwidth = 0.0;
  double elapsed_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Runs random-message trials until max_trials or target_block_errors,
// whichever first, with the stop decision taken on fixed round boundaries
// so the outcome is a pure function of (seed, worker_count).  Worker w uses
// the seed stream advanced by w long jumps.
SimResult run_monte_carlo(const SimConfig& config);

std::string to_json(const SimConfig& config, const SimResult& result);

// n,k,method,design_snr_db,channel_snr_db,trials,block_errors,bler,ci95,seed
std::string csv_header();
std::string csv_row(const SimConfig& config, const SimResult& result);

}  // namespace polarforge::sim
