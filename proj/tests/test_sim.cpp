#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarforge/bler.hpp"
#include "polarforge/polarization.hpp"
#include "polarforge/rca.hpp"
#include "polarforge/sim.hpp"

using namespace polarforge::sim;
using polarforge::polarization::CodeConstruction;
using polarforge::polarization::polarize_uniform;
using polarforge::polarization::select_information_set;
using polarforge::rca::log_snr_from_db;

namespace {

CodeConstruction make_code(int n, std::uint32_t k, double design_snr_db) {
  const auto profile = polarize_uniform(n, log_snr_from_db(design_snr_db));
  return select_information_set(profile, k, design_snr_db);
}

CodeConstruction rate_one(int n) {
  return make_code(n, std::uint32_t{1} << n, 0.0);
}

}  // namespace

TEST_CASE("random streams are deterministic and decorrelated across jumps") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream c(42), d(42);
  d.long_jump();
  int same = 0;
  for (int i = 0; i < 64; ++i) same += c.next_u64() == d.next_u64();
  CHECK(same == 0);

  RandomStream e(1);
  double mean = 0.0, var = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double g = e.gaussian();
    mean += g;
    var += g * g;
  }
  mean /= count;
  var = var / count - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);

  RandomStream f(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = f.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("encode: the length-2 kernel and linearity") {
  const auto code = rate_one(1);
  CHECK(encode({1, 1}, code) == std::vector<std::uint8_t>{0, 1});
  CHECK(encode({1, 0}, code) == std::vector<std::uint8_t>{1, 0});
  CHECK(encode({0, 0}, code) == std::vector<std::uint8_t>{0, 0});

  // Linearity: encode(u ^ v) == encode(u) ^ encode(v).
  const auto big = rate_one(5);
  RandomStream rng(3);
  std::vector<std::uint8_t> u(32), v(32), w(32);
  for (int rep = 0; rep < 20; ++rep) {
    for (int i = 0; i < 32; ++i) {
      u[i] = rng.next_u64() & 1;
      v[i] = rng.next_u64() & 1;
      w[i] = u[i] ^ v[i];
    }
    const auto xu = encode(u, big);
    const auto xv = encode(v, big);
    const auto xw = encode(w, big);
    for (int i = 0; i < 32; ++i) CHECK(xw[i] == (xu[i] ^ xv[i]));
  }

  CHECK_THROWS_AS(encode({0, 0, 0}, big), std::invalid_argument);
}

TEST_CASE("encode applies the tensor-power transform in natural order") {
  const auto code = rate_one(3);
  // x_j collects u_k over all k whose bits cover j's.
  for (std::uint32_t k = 0; k < 8; ++k) {
    std::vector<std::uint8_t> u(8, 0);
    u[k] = 1;
    const auto x = encode(u, code);
    for (std::uint32_t j = 0; j < 8; ++j) {
      const bool covers = (j & ~k) == 0;
      CHECK(x[j] == static_cast<std::uint8_t>(covers ? 1 : 0));
    }
  }
}

TEST_CASE("awgn_llrs statistics match the channel model") {
  RandomStream rng(11);
  const double gamma0 = std::pow(10.0, 0.2);
  const std::vector<std::uint8_t> x(20000, 0);
  const auto llr = awgn_llrs(x, gamma0, rng);
  double mean = 0.0, var = 0.0;
  for (double v : llr) mean += v;
  mean /= static_cast<double>(llr.size());
  for (double v : llr) var += (v - mean) * (v - mean);
  var /= static_cast<double>(llr.size());
  // LLR of a transmitted zero is N(4 gamma, 8 gamma).
  CHECK(std::fabs(mean - 4.0 * gamma0) / (4.0 * gamma0) < 0.01);
  CHECK(std::fabs(var - 8.0 * gamma0) / (8.0 * gamma0) < 0.05);
}

TEST_CASE("sc_decode: the length-2 kernel decisions") {
  const auto code = rate_one(1);
  // u0 from f(a,b); u1 from g with the u0 decision folded in.
  const auto r = sc_decode({3.0, 5.0}, code);
  CHECK(r.u_hat == std::vector<std::uint8_t>{0, 0});
  const auto r2 = sc_decode({-3.0, 5.0}, code);
  // f(-3,5) < 0 so u0 = 1; then g = 5 - (-3) = 8 > 0 so u1 = 0.
  CHECK(r2.u_hat == std::vector<std::uint8_t>{1, 0});
  const auto r3 = sc_decode({-3.0, -5.0}, code);
  CHECK(r3.u_hat == std::vector<std::uint8_t>{0, 1});
  CHECK(r3.info_bits == r3.u_hat);
  CHECK_THROWS_AS(sc_decode({1.0}, code), std::invalid_argument);
}

TEST_CASE("noiseless round trip at several block lengths") {
  RandomStream rng(5);
  for (int n : {1, 3, 6, 10}) {
    auto code = make_code(n, (std::uint32_t{1} << n) / 2, 0.0);
    const auto frozen = code.frozen_mask();
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::uint8_t> u(code.block_length, 0);
      for (std::uint32_t i = 0; i < code.block_length; ++i) {
        if (!frozen[i]) u[i] = rng.next_u64() & 1;
      }
      const auto x = encode(u, code);
      std::vector<double> llr(code.block_length);
      for (std::uint32_t i = 0; i < code.block_length; ++i) {
        llr[i] = x[i] ? -1e9 : 1e9;
      }
      const auto r = sc_decode(llr, code);
      CHECK(r.u_hat == u);
    }
  }
}

TEST_CASE("frozen positions always decode to zero") {
  const auto code = make_code(3, 4, 0.0);
  RandomStream rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> llr(8);
    for (auto& v : llr) v = 4.0 * (rng.gaussian());
    const auto r = sc_decode(llr, code);
    const auto frozen = code.frozen_mask();
    for (std::uint32_t i = 0; i < 8; ++i) {
      if (frozen[i]) CHECK(r.u_hat[i] == 0);
    }
    CHECK(r.info_bits.size() == 4);
  }
}

TEST_CASE("run_monte_carlo is reproducible and respects its stop rules") {
  SimConfig cfg;
  cfg.construction = make_code(4, 8, 0.0);
  cfg.channel_snr_db = 0.0;
  cfg.max_trials = 4096;
  cfg.target_block_errors = 1u << 30;  // never reached
  cfg.seed = 2024;
  cfg.worker_count = 1;

  const auto r1 = run_monte_carlo(cfg);
  const auto r2 = run_monte_carlo(cfg);
  CHECK(r1.trials_run == 4096);
  CHECK(r1.block_errors == r2.block_errors);
  CHECK(r1.bler_point == r2.bler_point);
  CHECK(r1.seed == 2024);
  CHECK(r1.block_errors > 0);
  CHECK(r1.bler_point ==
        static_cast<double>(r1.block_errors) / static_cast<double>(r1.trials_run));
  CHECK(r1.ci95_halfwidth > 0.0);

  // Early stop on the error target: reported trials stay on a round
  // boundary and at least the target was collected.
  SimConfig early = cfg;
  early.max_trials = 1u << 20;
  early.target_block_errors = 16;
  const auto r3 = run_monte_carlo(early);
  CHECK(r3.block_errors >= 16);
  CHECK(r3.trials_run < early.max_trials);
  const auto r4 = run_monte_carlo(early);
  CHECK(r3.trials_run == r4.trials_run);
  CHECK(r3.block_errors == r4.block_errors);
}

TEST_CASE("multi-worker runs are reproducible for a fixed worker count") {
  SimConfig cfg;
  cfg.construction = make_code(4, 8, 0.0);
  cfg.channel_snr_db = 1.0;
  cfg.max_trials = 8192;
  cfg.target_block_errors = 1u << 30;
  cfg.seed = 77;
  cfg.worker_count = 3;

  const auto r1 = run_monte_carlo(cfg);
  const auto r2 = run_monte_carlo(cfg);
  CHECK(r1.trials_run == 8192);
  CHECK(r1.block_errors == r2.block_errors);

  // A different worker count partitions differently but lands within
  // statistical agreement of the single-worker answer.
  SimConfig cfg1 = cfg;
  cfg1.worker_count = 1;
  const auto s = run_monte_carlo(cfg1);
  const double diff = std::fabs(r1.bler_point - s.bler_point);
  CHECK(diff < 4.0 * (r1.ci95_halfwidth + s.ci95_halfwidth));
}

TEST_CASE("measured error rate agrees with the analytic estimate") {
  // (64, 16) at its 1% design point: around 200 block errors expected in
  // 20000 trials, so both the point and its CI are well resolved.
  const auto code = make_code(6, 16, -2.53);
  const auto profile = polarize_uniform(6, log_snr_from_db(-2.53));
  const double est = polarforge::bler::estimate_bler(profile, 16).bler;

  SimConfig cfg;
  cfg.construction = code;
  cfg.channel_snr_db = -2.53;
  cfg.max_trials = 20000;
  cfg.target_block_errors = 1u << 30;
  cfg.seed = 31337;
  const auto r = run_monte_carlo(cfg);
  CHECK(r.block_errors > 50);
  CHECK(std::fabs(r.bler_point - est) < 4.0 * r.ci95_halfwidth);
}

TEST_CASE("all-zero-codeword shortcut matches random messages statistically") {
  SimConfig cfg;
  cfg.construction = make_code(5, 16, 0.0);
  cfg.channel_snr_db = 0.0;
  cfg.max_trials = 16384;
  cfg.target_block_errors = 1u << 30;
  cfg.seed = 555;
  const auto random_msgs = run_monte_carlo(cfg);
  cfg.all_zero_codeword = true;
  const auto all_zero = run_monte_carlo(cfg);
  CHECK(std::fabs(random_msgs.bler_point - all_zero.bler_point) <
        4.0 * (random_msgs.ci95_halfwidth + all_zero.ci95_halfwidth));
}

TEST_CASE("run_monte_carlo validates its configuration") {
  SimConfig cfg;
  cfg.construction = make_code(3, 4, 0.0);
  cfg.max_trials = 0;
  CHECK_THROWS_AS(run_monte_carlo(cfg), std::invalid_argument);
  cfg.max_trials = 100;
  cfg.worker_count = 0;
  CHECK_THROWS_AS(run_monte_carlo(cfg), std::invalid_argument);
  cfg.worker_count = 1;
  cfg.channel_snr_db = std::nan("");
  CHECK_THROWS_AS(run_monte_carlo(cfg), std::invalid_argument);
}

TEST_CASE("serialization includes the headline figures") {
  SimConfig cfg;
  cfg.construction = make_code(3, 4, 0.0);
  cfg.channel_snr_db = 0.25;
  cfg.max_trials = 512;
  cfg.target_block_errors = 1u << 30;
  cfg.seed = 8;
  const auto r = run_monte_carlo(cfg);

  const std::string json = to_json(cfg, r);
  for (const char* key : {"\"n\"", "\"k\"", "\"channel_snr_db\"", "\"trials\"",
                          "\"block_errors\"", "\"bler\"", "\"seed\""}) {
    CHECK(json.find(key) != std::string::npos);
  }

  CHECK(csv_header() ==
        "n,k,method,design_snr_db,channel_snr_db,trials,block_errors,bler,ci95,seed\n");
  const std::string row = csv_row(cfg, r);
  CHECK(row.rfind("8,4,rca,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 9);
  CHECK(row.back() == '\n');
}
