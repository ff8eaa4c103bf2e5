#include "polarforge/sim.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace polarforge::sim {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix64_next(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Exact check-node LLR combine, 2 atanh(tanh(a/2) tanh(b/2)), in the stable
// decomposition.  The corrections must use |a+b| and |a-b|; the superficially
// similar |a|+|b| and ||a|-|b|| forms are wrong whenever the signs differ.
inline double f_combine(double a, double b) {
  const double mag = std::min(std::fabs(a), std::fabs(b));
  double r = (std::signbit(a) != std::signbit(b)) ? -mag : mag;
  const double s = std::fabs(a + b);
  if (s < 50.0) r += std::log1p(std::exp(-s));
  const double d = std::fabs(a - b);
  if (d < 50.0) r -= std::log1p(std::exp(-d));
  return r;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64_next(s);
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = std::rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_gaussian_ = v * m;
  has_cached_gaussian_ = true;
  return u * m;
}

void RandomStream::long_jump() {
  static constexpr std::uint64_t kJump[] = {
      0x76e15d3efefdcbbfULL, 0xc5004e441c522fb3ULL, 0x77710069854ee241ULL,
      0x39109bb02acbe635ULL};
  std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  for (std::uint64_t jump : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (jump & (std::uint64_t{1} << b)) {
        s0 ^= state_[0];
        s1 ^= state_[1];
        s2 ^= state_[2];
        s3 ^= state_[3];
      }
      next_u64();
    }
  }
  state_ = {s0, s1, s2, s3};
}

std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& u,
                                 const polarization::CodeConstruction& code) {
  if (u.size() != code.block_length) {
    throw std::invalid_argument("encode: message length does not match the code");
  }
  std::vector<std::uint8_t> x = u;
  const std::size_t n_total = x.size();
  for (std::size_t half = 1; half < n_total; half <<= 1) {
    for (std::size_t base = 0; base < n_total; base += 2 * half) {
      for (std::size_t j = 0; j < half; ++j) {
        x[base + j] ^= x[base + j + half];
      }
    }
  }
  return x;
}

std::vector<double> awgn_llrs(const std::vector<std::uint8_t>& x,
                              double gamma0, RandomStream& rng) {
  const double sigma = std::sqrt(1.0 / (2.0 * gamma0));
  std::vector<double> llr(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y = (1.0 - 2.0 * x[i]) + sigma * rng.gaussian();
    llr[i] = 4.0 * gamma0 * y;
  }
  return llr;
}

ScDecoder::ScDecoder(std::uint32_t block_length) : block_length_(block_length) {
  if (block_length == 0 || (block_length & (block_length - 1)) != 0) {
    throw std::invalid_argument("ScDecoder: block length must be a power of two");
  }
  llr_arena_.resize(block_length - 1);
  bit_arena_.resize(2 * std::size_t{block_length} - 2);
  root_x_.resize(block_length);
}

void ScDecoder::decode(const double* llr, const std::uint8_t* frozen,
                       std::uint8_t* u_hat) {
  frozen_ = frozen;
  u_hat_ = u_hat;
  decode_node(llr, block_length_, root_x_.data(), 0, 1, llr_arena_.data(),
              bit_arena_.data());
}

// The recursion splits on even/odd positions, so subproblem bit j of the
// f-branch is u[offset + 2 j stride] and of the g-branch
// u[offset + (2 j + 1) stride].  That pairing makes decoder bit u_k see the
// synthetic channel the polarization profile assigns to index k.
void ScDecoder::decode_node(const double* llr, std::uint32_t len,
                            std::uint8_t* x_out, std::uint32_t u_offset,
                            std::uint32_t u_stride, double* scratch,
                            std::uint8_t* bit_scratch) {
  if (len == 1) {
    std::uint8_t bit = 0;
    if (!frozen_[u_offset]) bit = llr[0] < 0.0;
    u_hat_[u_offset] = bit;
    x_out[0] = bit;
    return;
  }
  const std::uint32_t half = len / 2;
  double* child_llr = scratch;
  std::uint8_t* x_even = bit_scratch;
  std::uint8_t* x_odd = bit_scratch + half;

  for (std::uint32_t i = 0; i < half; ++i) {
    child_llr[i] = f_combine(llr[2 * i], llr[2 * i + 1]);
  }
  decode_node(child_llr, half, x_even, u_offset, 2 * u_stride, scratch + half,
              bit_scratch + 2 * half);

  for (std::uint32_t i = 0; i < half; ++i) {
    const double a = llr[2 * i];
    const double b = llr[2 * i + 1];
    child_llr[i] = x_even[i] ? b - a : b + a;
  }
  decode_node(child_llr, half, x_odd, u_offset + u_stride, 2 * u_stride,
              scratch + half, bit_scratch + 2 * half);

  for (std::uint32_t i = 0; i < half; ++i) {
    x_out[2 * i] = x_even[i] ^ x_odd[i];
    x_out[2 * i + 1] = x_odd[i];
  }
}

ScResult sc_decode(const std::vector<double>& llrs,
                   const polarization::CodeConstruction& code) {
  if (llrs.size() != code.block_length) {
    throw std::invalid_argument("sc_decode: LLR length does not match the code");
  }
  const std::vector<std::uint8_t> frozen = code.frozen_mask();
  ScDecoder decoder(code.block_length);
  ScResult result;
  result.u_hat.resize(code.block_length);
  decoder.decode(llrs.data(), frozen.data(), result.u_hat.data());
  result.info_bits.reserve(code.info_set.size());
  for (std::uint32_t idx : code.info_set) {
    result.info_bits.push_back(result.u_hat[idx]);
  }
  return result;
}

namespace {

struct Worker {
  Worker(const SimConfig& config, std::uint32_t index)
      : rng(config.seed), decoder(config.construction.block_length) {
    for (std::uint32_t j = 0; j < index; ++j) rng.long_jump();
    const std::uint32_t n_total = config.construction.block_length;
    u.resize(n_total);
    x.resize(n_total);
    llr.resize(n_total);
    u_hat.resize(n_total);
  }

  // Runs `quota` trials, returns the number of block errors.
  std::uint64_t run(const SimConfig& config, const std::vector<std::uint8_t>& frozen,
                    double gamma0, std::uint64_t quota) {
    const double sigma = std::sqrt(1.0 / (2.0 * gamma0));
    const std::uint32_t n_total = config.construction.block_length;
    const auto& info = config.construction.info_set;
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < quota; ++t) {
      if (config.all_zero_codeword) {
        std::fill(u.begin(), u.end(), 0);
        std::fill(x.begin(), x.end(), 0);
      } else {
        std::fill(u.begin(), u.end(), 0);
        for (std::uint32_t idx : info) {
          u[idx] = static_cast<std::uint8_t>(rng.next_u64() >> 63);
        }
        x.assign(u.begin(), u.end());
        for (std::size_t half = 1; half < n_total; half <<= 1) {
          for (std::size_t base = 0; base < n_total; base += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
              x[base + j] ^= x[base + j + half];
            }
          }
        }
      }
      for (std::uint32_t i = 0; i < n_total; ++i) {
        const double y = (1.0 - 2.0 * x[i]) + sigma * rng.gaussian();
        llr[i] = 4.0 * gamma0 * y;
      }
      decoder.decode(llr.data(), frozen.data(), u_hat.data());
      for (std::uint32_t idx : info) {
        if (u_hat[idx] != u[idx]) {
          ++errors;
          break;
        }
      }
    }
    return errors;
  }

  RandomStream rng;
  ScDecoder decoder;
  std::vector<std::uint8_t> u, x, u_hat;
  std::vector<double> llr;
};

double ci95_halfwidth(std::uint64_t errors, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / t;
  if (errors >= 10) {
    return kZ95 * std::sqrt(p * (1.0 - p) / t);
  }
  // Wilson interval halfwidth: better behaved at small counts.
  const double z2 = kZ95 * kZ95;
  return kZ95 * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / (1.0 + z2 / t);
}

}  // namespace

SimResult run_monte_carlo(const SimConfig& config) {
  const auto& code = config.construction;
  if (code.block_length == 0 || (code.block_length & (code.block_length - 1)) != 0) {
    throw std::invalid_argument("run_monte_carlo: block length must be a power of two");
  }
  if (code.info_set.size() != code.dimension) {
    throw std::invalid_argument("run_monte_carlo: construction info set is inconsistent");
  }
  if (config.max_trials < 1 || config.target_block_errors < 1) {
    throw std::invalid_argument("run_monte_carlo: trial and error targets must be >= 1");
  }
  if (config.worker_count < 1) {
    throw std::invalid_argument("run_monte_carlo: worker_count must be >= 1");
  }
  const double gamma0 = std::pow(10.0, config.channel_snr_db / 10.0);
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw std::invalid_argument("run_monte_carlo: bad channel SNR");
  }

  const std::vector<std::uint8_t> frozen = code.frozen_mask();
  const std::uint32_t n_workers = config.worker_count;
  std::vector<std::unique_ptr<Worker>> workers;
  workers.reserve(n_workers);
  for (std::uint32_t w = 0; w < n_workers; ++w) {
    workers.push_back(std::make_unique<Worker>(config, w));
  }

  // Fixed per-worker chunking with the stop decision on round boundaries:
  // counts are a pure function of (seed, worker_count).
  constexpr std::uint64_t kChunk = 1024;
  std::uint64_t trials_done = 0;
  std::uint64_t block_errors = 0;
  const auto t_start = std::chrono::steady_clock::now();
  while (trials_done < config.max_trials &&
         block_errors < config.target_block_errors) {
    const std::uint64_t remaining = config.max_trials - trials_done;
    const std::uint64_t round_total = std::min<std::uint64_t>(remaining, n_workers * kChunk);
    const std::uint64_t base = round_total / n_workers;
    const std::uint64_t extra = round_total % n_workers;
    std::vector<std::uint64_t> quota(n_workers);
    std::vector<std::uint64_t> errors(n_workers, 0);
    for (std::uint32_t w = 0; w < n_workers; ++w) {
      quota[w] = base + (w < extra ? 1 : 0);
    }
    if (n_workers == 1) {
      errors[0] = workers[0]->run(config, frozen, gamma0, quota[0]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n_workers);
      for (std::uint32_t w = 0; w < n_workers; ++w) {
        if (quota[w] == 0) continue;
        pool.emplace_back([&, w] {
          errors[w] = workers[w]->run(config, frozen, gamma0, quota[w]);
        });
      }
      for (std::thread& th : pool) th.join();
    }
    trials_done += round_total;
    for (std::uint64_t e : errors) block_errors += e;
  }
  const auto t_stop = std::chrono::steady_clock::now();

  SimResult result;
  result.trials_run = trials_done;
  result.block_errors = block_errors;
  result.bler_point =
      static_cast<double>(block_errors) / static_cast<double>(trials_done);
  result.ci95_halfwidth = ci95_halfwidth(block_errors, trials_done);
  result.elapsed_seconds = std::chrono::duration<double>(t_stop - t_start).count();
  result.seed = config.seed;
  return result;
}

std::string to_json(const SimConfig& config, const SimResult& result) {
  nlohmann::json j;
  j["n"] = config.construction.block_length;
  j["k"] = config.construction.dimension;
  j["method"] = config.construction.method;
  if (std::isnan(config.construction.design_snr_db)) {
    j["design_snr_db"] = nullptr;
  } else {
    j["design_snr_db"] = config.construction.design_snr_db;
  }
  j["channel_snr_db"] = config.channel_snr_db;
  j["max_trials"] = config.max_trials;
  j["target_block_errors"] = config.target_block_errors;
  j["worker_count"] = config.worker_count;
  j["all_zero_codeword"] = config.all_zero_codeword;
  j["trials"] = result.trials_run;
  j["block_errors"] = result.block_errors;
  j["bler"] = result.bler_point;
  j["ci95_halfwidth"] = result.ci95_halfwidth;
  j["elapsed_seconds"] = result.elapsed_seconds;
  j["seed"] = result.seed;
  return j.dump(2) + "\n";
}

std::string csv_header() {
  return "n,k,method,design_snr_db,channel_snr_db,trials,block_errors,bler,ci95,seed\n";
}

std::string csv_row(const SimConfig& config, const SimResult& result) {
  char line[256];
  std::snprintf(line, sizeof line, "%u,%u,%s,%.10g,%.10g,%llu,%llu,%.10g,%.10g,%llu\n",
                config.construction.block_length, config.construction.dimension,
                config.construction.method.c_str(),
                config.construction.design_snr_db, config.channel_snr_db,
                static_cast<unsigned long long>(result.trials_run),
                static_cast<unsigned long long>(result.block_errors),
                result.bler_point, result.ci95_halfwidth,
                static_cast<unsigned long long>(result.seed));
  return line;
}

}  // namespace polarforge::sim
