// polarforge: polar-code construction and evaluation for the binary-input
// AWGN channel.  Subcommands: construct, estimate, simulate,
// capacity-report.  Every run writes a manifest next to its outputs with the
// full parameter set needed to regenerate them.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarforge/bler.hpp"
#include "polarforge/capacity.hpp"
#include "polarforge/polarization.hpp"
#include "polarforge/rca.hpp"
#include "polarforge/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
namespace capacity = polarforge::capacity;
namespace rca = polarforge::rca;
namespace polarization = polarforge::polarization;
namespace bler = polarforge::bler;
namespace sim = polarforge::sim;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 12345;

std::uint64_t seed_from_environment() {
  const char* env = std::getenv("POLARFORGE_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0') {
    throw std::invalid_argument(std::string("POLARFORGE_SEED is not a number: ") + env);
  }
  return value;
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

fs::path sibling_with_extension(const fs::path& out, const char* extension) {
  fs::path p = out;
  p.replace_extension(extension);
  return p;
}

void write_manifest(const fs::path& out, const std::string& command,
                    const json& parameters, const std::vector<fs::path>& outputs,
                    double elapsed_seconds) {
  json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["parameters"] = parameters;
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  m["outputs"] = files;
  m["elapsed_seconds"] = elapsed_seconds;
  write_text_file(sibling_with_extension(out, ".manifest.json"), m.dump(2) + "\n");
}

std::vector<double> parse_snr_csv(const fs::path& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read per-channel SNR file: " + path.string());
  }
  std::vector<double> db_values;
  std::string token;
  while (std::getline(in, token)) {
    std::stringstream line(token);
    std::string cell;
    while (std::getline(line, cell, ',')) {
      // Trim whitespace; skip blank cells so trailing newlines are harmless.
      const auto begin = cell.find_first_not_of(" \t\r");
      if (begin == std::string::npos) continue;
      const auto end = cell.find_last_not_of(" \t\r");
      const std::string trimmed = cell.substr(begin, end - begin + 1);
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(trimmed, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("malformed SNR entry '" + trimmed + "' in " +
                                    path.string());
      }
      if (used != trimmed.size() || !std::isfinite(value)) {
        throw std::invalid_argument("malformed SNR entry '" + trimmed + "' in " +
                                    path.string());
      }
      db_values.push_back(value);
    }
  }
  if (db_values.size() != expected) {
    throw std::invalid_argument(path.string() + " holds " +
                                std::to_string(db_values.size()) +
                                " SNR values; expected " + std::to_string(expected));
  }
  return db_values;
}

std::vector<double> sweep_points(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw std::invalid_argument("sweep bounds must be finite");
  }
  if (step == 0.0) {
    if (stop != start) {
      throw std::invalid_argument("--snr-step 0 requires --snr-stop == --snr-start");
    }
    return {start};
  }
  if (step < 0.0) {
    throw std::invalid_argument("--snr-step must be non-negative");
  }
  if (stop < start) {
    throw std::invalid_argument("--snr-stop must not be below --snr-start");
  }
  const double count_f = (stop - start) / step;
  if (count_f > 100000.0) {
    throw std::invalid_argument("sweep would exceed 100000 points");
  }
  const int count = static_cast<int>(std::floor(count_f + 1e-9)) + 1;
  std::vector<double> points(count);
  for (int i = 0; i < count; ++i) points[i] = start + i * step;
  return points;
}

// Inline construction parameters shared by the subcommands that can either
// load a construction file or build one on the fly.
struct CodeArgs {
  int n = -1;
  double rate = -1.0;
  std::uint32_t k = 0;
  bool k_given = false;
  double design_snr_db = std::numeric_limits<double>::quiet_NaN();
  std::string per_channel_path;

  void add_flags(CLI::App* cmd, bool required_n) {
    auto* n_opt = cmd->add_option("--n", n, "log2 of the block length N");
    if (required_n) n_opt->required();
    n_opt->check(CLI::Range(0, polarization::kMaxStages));
    auto* rate_opt =
        cmd->add_option("--rate", rate, "code rate K/N")->check(CLI::Range(0.0, 1.0));
    auto* k_opt = cmd->add_option("--k", k, "number of information bits K");
    rate_opt->excludes(k_opt);
    k_opt->excludes(rate_opt);
    cmd->add_option("--design-snr-db", design_snr_db,
                    "design SNR gamma_0 in dB (Es/N0)");
    k_given_tracker_ = k_opt;
  }

  void add_per_channel_flag(CLI::App* cmd) {
    cmd->add_option("--per-channel-snrs", per_channel_path,
                    "CSV of N per-channel SNRs in dB (distinct-channel mode)");
  }

  void finalize() { k_given = k_given_tracker_ != nullptr && k_given_tracker_->count() > 0; }

  std::uint32_t dimension() const {
    const std::uint32_t n_total = std::uint32_t{1} << n;
    if (k_given) {
      if (k > n_total) throw std::invalid_argument("--k exceeds the block length");
      return k;
    }
    if (rate < 0.0) {
      throw std::invalid_argument("one of --rate or --k is required");
    }
    return static_cast<std::uint32_t>(std::lround(rate * n_total));
  }

  polarization::CodeConstruction build() const {
    if (n < 0) throw std::invalid_argument("--n is required to build a construction");
    const std::uint32_t n_total = std::uint32_t{1} << n;
    polarization::PolarizationProfile profile;
    if (!per_channel_path.empty()) {
      const auto db_values = parse_snr_csv(per_channel_path, n_total);
      std::vector<double> xs(db_values.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = rca::log_snr_from_db(db_values[i]);
      }
      profile = polarization::polarize_distinct(std::move(xs));
    } else {
      if (!std::isfinite(design_snr_db)) {
        throw std::invalid_argument("--design-snr-db is required");
      }
      profile = polarization::polarize_uniform(n, rca::log_snr_from_db(design_snr_db));
    }
    const double recorded_snr =
        per_channel_path.empty() ? design_snr_db
                                 : std::numeric_limits<double>::quiet_NaN();
    return polarization::select_information_set(profile, dimension(), recorded_snr);
  }

  json parameters() const {
    json p;
    if (n >= 0) p["n"] = n;
    if (k_given) {
      p["k"] = k;
    } else if (rate >= 0.0) {
      p["rate"] = rate;
    }
    if (std::isfinite(design_snr_db)) p["design_snr_db"] = design_snr_db;
    if (!per_channel_path.empty()) p["per_channel_snrs"] = per_channel_path;
    return p;
  }

 private:
  CLI::Option* k_given_tracker_ = nullptr;
};

polarization::CodeConstruction load_construction(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read construction file: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return polarization::construction_from_json(buffer.str());
}

int log2_of(std::uint32_t n_total) {
  int n = 0;
  while ((std::uint32_t{1} << n) < n_total) ++n;
  return n;
}

std::string format_row(double snr_db, double estimate) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", snr_db, estimate);
  return buf;
}

int cmd_construct(const CodeArgs& args, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto code = args.build();

  const fs::path mask_path = sibling_with_extension(out, ".mask");
  write_text_file(out, polarization::to_json(code));
  write_text_file(mask_path, polarization::to_frozen_mask_text(code));

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json params = args.parameters();
  params["out"] = out.string();
  write_manifest(out, "construct", params, {out, mask_path}, elapsed);
  std::cout << "wrote " << out.string() << " (N=" << code.block_length
            << ", K=" << code.dimension << ")\n";
  return 0;
}

struct SweepArgs {
  double start = std::numeric_limits<double>::quiet_NaN();
  double stop = std::numeric_limits<double>::quiet_NaN();
  double step = 0.0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--snr-start", start, "first channel SNR in dB")->required();
    stop_opt_ = cmd->add_option("--snr-stop", stop, "last channel SNR in dB");
    cmd->add_option("--snr-step", step, "sweep step in dB (0 = single point)");
  }

  std::vector<double> points() const {
    const double effective_stop = stop_opt_->count() > 0 ? stop : start;
    return sweep_points(start, effective_stop, step);
  }

  json parameters() const {
    json p;
    p["snr_start_db"] = start;
    if (stop_opt_->count() > 0) p["snr_stop_db"] = stop;
    p["snr_step_db"] = step;
    return p;
  }

 private:
  CLI::Option* stop_opt_ = nullptr;
};

int cmd_estimate(const CodeArgs& args, const std::string& construction_path,
                 const SweepArgs& sweep, bool redesign, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();

  int n = args.n;
  std::uint32_t dimension = 0;
  std::vector<std::uint32_t> info_set;
  if (!construction_path.empty()) {
    const auto code = load_construction(construction_path);
    n = log2_of(code.block_length);
    dimension = code.dimension;
    info_set = code.info_set;
  } else {
    const auto code = args.build();
    n = log2_of(code.block_length);
    dimension = code.dimension;
    info_set = code.info_set;
  }

  std::string csv = "channel_snr_db,estimated_bler\n";
  for (double snr_db : sweep.points()) {
    const auto profile = polarization::polarize_uniform(n, rca::log_snr_from_db(snr_db));
    const double estimate = redesign
                                ? bler::estimate_bler(profile, dimension).bler
                                : bler::estimate_bler(profile, info_set).bler;
    csv += format_row(snr_db, estimate);
  }
  write_text_file(out, csv);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json params = args.parameters();
  if (!construction_path.empty()) params["construction"] = construction_path;
  params.update(sweep.parameters());
  params["redesign_each_point"] = redesign;
  params["out"] = out.string();
  write_manifest(out, "estimate", params, {out}, elapsed);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_simulate(const CodeArgs& args, const std::string& construction_path,
                 const SweepArgs& sweep, bool redesign, std::uint64_t seed,
                 std::uint64_t max_trials, std::uint64_t target_errors,
                 std::uint32_t workers, bool all_zero, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();

  std::optional<polarization::CodeConstruction> fixed;
  if (!construction_path.empty()) {
    fixed = load_construction(construction_path);
  } else if (!redesign) {
    fixed = args.build();
  }

  std::string csv = sim::csv_header();
  for (double snr_db : sweep.points()) {
    sim::SimConfig config;
    if (fixed.has_value()) {
      config.construction = *fixed;
    } else {
      CodeArgs point = args;
      point.design_snr_db = snr_db;
      config.construction = point.build();
    }
    config.channel_snr_db = snr_db;
    config.max_trials = max_trials;
    config.target_block_errors = target_errors;
    config.seed = seed;
    config.worker_count = workers;
    config.all_zero_codeword = all_zero;
    const auto result = sim::run_monte_carlo(config);
    csv += sim::csv_row(config, result);
  }
  write_text_file(out, csv);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json params = args.parameters();
  if (!construction_path.empty()) params["construction"] = construction_path;
  params.update(sweep.parameters());
  params["redesign_each_point"] = redesign;
  params["seed"] = seed;
  params["max_trials"] = max_trials;
  params["target_errors"] = target_errors;
  params["workers"] = workers;
  params["all_zero_codeword"] = all_zero;
  params["out"] = out.string();
  write_manifest(out, "simulate", params, {out}, elapsed);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_capacity_report(double db_start, double db_stop, int points,
                        const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  if (points < 1) throw std::invalid_argument("--grid-db-points must be at least 1");
  if (points > 1 && db_stop <= db_start) {
    throw std::invalid_argument("--grid-db-stop must exceed --grid-db-start");
  }
  std::vector<double> gammas(points);
  for (int i = 0; i < points; ++i) {
    const double db = points == 1
                          ? db_start
                          : db_start + (db_stop - db_start) * i / (points - 1);
    gammas[i] = std::pow(10.0, db / 10.0);
  }
  const auto rows = capacity::error_report(gammas);
  write_text_file(out, capacity::error_report_csv(rows));

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json params;
  params["grid_db_start"] = db_start;
  params["grid_db_stop"] = db_stop;
  params["grid_db_points"] = points;
  params["out"] = out.string();
  write_manifest(out, "capacity-report", params, {out}, elapsed);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar-code construction toolkit for the binary-input AWGN channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  int exit_code = 0;
  std::function<void()> run;

  // construct
  auto* construct = app.add_subcommand(
      "construct", "Build a code and write its JSON + frozen-mask files");
  auto construct_args = std::make_shared<CodeArgs>();
  auto construct_out = std::make_shared<std::string>();
  construct_args->add_flags(construct, /*required_n=*/true);
  construct_args->add_per_channel_flag(construct);
  construct->add_option("--out", *construct_out, "output JSON path")->required();
  construct->callback([&exit_code, construct_args, construct_out] {
    construct_args->finalize();
    exit_code = cmd_construct(*construct_args, *construct_out);
  });

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "Analytic BLER over a channel-SNR sweep");
  auto estimate_args = std::make_shared<CodeArgs>();
  auto estimate_sweep = std::make_shared<SweepArgs>();
  auto estimate_construction = std::make_shared<std::string>();
  auto estimate_out = std::make_shared<std::string>();
  auto estimate_redesign = std::make_shared<bool>(false);
  estimate_args->add_flags(estimate, /*required_n=*/false);
  estimate->add_option("--construction", *estimate_construction,
                       "construction JSON written by `construct`");
  estimate_sweep->add_flags(estimate);
  estimate->add_flag("--redesign-each-point", *estimate_redesign,
                     "re-select the information set at every sweep point");
  estimate->add_option("--out", *estimate_out, "output CSV path")->required();
  estimate->callback([&exit_code, estimate_args, estimate_sweep, estimate_construction,
                      estimate_out, estimate_redesign] {
    estimate_args->finalize();
    exit_code = cmd_estimate(*estimate_args, *estimate_construction, *estimate_sweep,
                             *estimate_redesign, *estimate_out);
  });

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo BLER over a channel-SNR sweep");
  auto simulate_args = std::make_shared<CodeArgs>();
  auto simulate_sweep = std::make_shared<SweepArgs>();
  auto simulate_construction = std::make_shared<std::string>();
  auto simulate_out = std::make_shared<std::string>();
  auto simulate_redesign = std::make_shared<bool>(false);
  auto simulate_all_zero = std::make_shared<bool>(false);
  auto seed = std::make_shared<std::uint64_t>(0);
  auto max_trials = std::make_shared<std::uint64_t>(100000);
  auto target_errors = std::make_shared<std::uint64_t>(100);
  auto workers = std::make_shared<std::uint32_t>(1);
  simulate_args->add_flags(simulate, /*required_n=*/false);
  simulate->add_option("--construction", *simulate_construction,
                       "construction JSON written by `construct`");
  simulate_sweep->add_flags(simulate);
  simulate->add_flag("--redesign-each-point", *simulate_redesign,
                     "design the code at each sweep point's SNR");
  auto* seed_opt = simulate->add_option(
      "--seed", *seed, "RNG seed (default: POLARFORGE_SEED env var, else 12345)");
  simulate->add_option("--max-trials", *max_trials, "trial budget per sweep point");
  simulate->add_option("--target-errors", *target_errors,
                       "stop a point after this many block errors");
  simulate->add_option("--workers", *workers, "worker thread count")
      ->check(CLI::Range(1u, 256u));
  simulate->add_flag("--all-zero-codeword", *simulate_all_zero,
                     "transmit the all-zero codeword instead of random messages");
  simulate->add_option("--out", *simulate_out, "output CSV path")->required();
  simulate->callback([&exit_code, simulate_args, simulate_sweep, simulate_construction,
                      simulate_out, simulate_redesign, simulate_all_zero, seed, seed_opt,
                      max_trials, target_errors, workers] {
    simulate_args->finalize();
    const std::uint64_t effective_seed =
        seed_opt->count() > 0 ? *seed : seed_from_environment();
    exit_code = cmd_simulate(*simulate_args, *simulate_construction, *simulate_sweep,
                             *simulate_redesign, effective_seed, *max_trials,
                             *target_errors, *workers, *simulate_all_zero,
                             *simulate_out);
  });

  // capacity-report
  auto* report = app.add_subcommand(
      "capacity-report", "Approximation-error table for the capacity fits");
  auto db_start = std::make_shared<double>(0.0);
  auto db_stop = std::make_shared<double>(0.0);
  auto points = std::make_shared<int>(0);
  auto report_out = std::make_shared<std::string>();
  report->add_option("--grid-db-start", *db_start, "first SNR in dB")->required();
  report->add_option("--grid-db-stop", *db_stop, "last SNR in dB")->required();
  report->add_option("--grid-db-points", *points, "number of grid points")->required();
  report->add_option("--out", *report_out, "output CSV path")->required();
  report->callback([&exit_code, db_start, db_stop, points, report_out] {
    exit_code = cmd_capacity_report(*db_start, *db_stop, *points, *report_out);
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "polarforge: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
