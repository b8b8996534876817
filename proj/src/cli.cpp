#include "wrv/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wrv/engine.hpp"
#include "wrv/rng.hpp"
#include "wrv/scenario.hpp"
#include "wrv/sweep.hpp"
#include "wrv/vhf.hpp"

namespace wrv::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WRV_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return ".";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// The manifest is written in a "started" state before the run and finalized
// with the wall-clock duration afterwards.
class Manifest {
 public:
  Manifest(const fs::path& dir, const Scenario& sc,
           std::vector<std::string> outputs)
      : path_(dir / "manifest.json"), start_(std::chrono::steady_clock::now()) {
    doc_["config_hash"] = config_hash(sc);
    doc_["seed"] = sc.seed;
    doc_["version"] = kVersion;
    doc_["outputs"] = outputs;
    doc_["status"] = "started";
    doc_["wall_clock_s"] = nullptr;
    write_file(path_, doc_.dump(2) + "\n");
  }

  void finalize() {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    doc_["status"] = "finished";
    doc_["wall_clock_s"] = elapsed;
    write_file(path_, doc_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    // config and input validation problems exit 2, runtime failures exit 1
    if (what.rfind("config:", 0) == 0 || what.rfind("trajectory", 0) == 0) {
      return 2;
    }
    return 1;
  }
}

Scenario load_checked(const std::string& config_path, long long seed_override) {
  Scenario sc = config_path.empty() ? Scenario{} : load_scenario(config_path);
  if (seed_override >= 0) sc.seed = static_cast<std::uint64_t>(seed_override);
  validate_scenario(sc);
  // referenced trajectory files must exist before any computation starts
  for (const auto& w : sc.whales) {
    if (w.source == "csv" && !fs::exists(w.path)) {
      throw std::runtime_error("config: $.whales.path: no such file: " + w.path);
    }
  }
  return sc;
}

}  // namespace

int cmd_run(const std::string& config_path, long long seed_override,
            const std::string& out_dir) {
  return guard([&]() {
    const Scenario sc = load_checked(config_path, seed_override);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    Manifest manifest(dir, sc, {"trace.jsonl", "metrics.csv", "manifest.json"});

    std::ostringstream trace;
    const Metrics m = run_scenario(sc, &trace);
    write_file(dir / "trace.jsonl", trace.str());
    write_file(dir / "metrics.csv", metrics_to_csv(m));
    manifest.finalize();

    std::cout << "run complete: " << m.surfacings.size() << " surfacings, "
              << m.attempts.size() << " flight attempts, success="
              << (m.any_success ? "yes" : "no") << "\n";
    return 0;
  });
}

int cmd_table3(const std::string& config_path, int trials,
               const std::string& out_dir) {
  return guard([&]() {
    const Scenario sc = load_checked(config_path, -1);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    Manifest manifest(dir, sc, {"table3.csv", "manifest.json"});

    const auto cells = sweep_noise(sc, trials, sc.seed);
    write_file(dir / "table3.csv", noise_table_csv(cells));
    manifest.finalize();

    std::cout << "sigma_deg  acoustic-only     acoustic+vhf\n";
    for (double sigma : {0.1, 5.0, 10.0, 15.0}) {
      const NoiseCell* ac = nullptr;
      const NoiseCell* av = nullptr;
      for (const auto& c : cells) {
        if (c.sigma_deg == sigma) (c.vhf ? av : ac) = &c;
      }
      char line[160];
      std::snprintf(line, sizeof(line), "%8.1f   %.2f +/- %.2f    %.2f +/- %.2f\n",
                    sigma, ac->rel_mean, ac->rel_ci, av->rel_mean, av->rel_ci);
      std::cout << line;
    }
    return 0;
  });
}

int cmd_flightsweep(const std::string& config_path, int runs,
                    const std::string& out_dir) {
  return guard([&]() {
    const Scenario sc = load_checked(config_path, -1);
    const fs::path dir = resolve_out_dir(out_dir);
    fs::create_directories(dir);
    Manifest manifest(dir, sc, {"flightsweep.csv", "manifest.json"});

    const auto cells = sweep_flight(sc, {300.0, 600.0, 900.0}, runs, sc.seed);
    write_file(dir / "flightsweep.csv", flight_table_csv(cells));
    manifest.finalize();

    std::cout << "flight_min  runs  success_rate\n";
    for (const auto& c : cells) {
      char line[120];
      std::snprintf(line, sizeof(line), "%10.1f  %4d  %.1f%%\n", c.budget_s / 60.0,
                    c.runs, 100.0 * c.success_rate);
      std::cout << line;
    }
    return 0;
  });
}

namespace {

IQRecord load_iq_csv(const std::string& path, const VHFParams& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("vhf: cannot open " + path);
  IQRecord rec;
  rec.sample_rate_hz = params.sample_rate_hz;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find("re0") != std::string::npos) continue;
    std::stringstream ss(line);
    std::string f;
    std::vector<double> vals;
    while (std::getline(ss, f, ',')) vals.push_back(std::stod(f));
    if (vals.size() != 5) {
      throw std::runtime_error("vhf: row " + std::to_string(lineno) +
                               ": expected re0,im0,re1,im1,heading_rad");
    }
    rec.ch0.emplace_back(vals[0], vals[1]);
    rec.ch1.emplace_back(vals[2], vals[3]);
    rec.headings.push_back(vals[4]);
  }
  if (rec.ch0.empty()) throw std::runtime_error("vhf: empty IQ file " + path);
  return rec;
}

}  // namespace

int cmd_vhf_profile(const VhfProfileArgs& args) {
  return guard([&]() {
    VHFParams params;
    params.antenna_separation_m = args.separation_m;

    IQRecord rec;
    if (!args.iq_csv.empty()) {
      rec = load_iq_csv(args.iq_csv, params);
    } else {
      RotationPlan rot;
      rot.duration_s = args.pulses * params.pulse_period_s;
      SynthNoise noise;
      noise.target_snr2 = args.snr2;
      noise.phase_sigma_per_pulse = args.phase_noise;
      auto rng = make_rng(args.seed, "vhf_profile");
      rec = synthesize_iq(args.bearing_deg, rot, params, noise, rng);
    }

    const auto pulses = detect_pulses(rec, params);
    if (pulses.empty()) throw std::runtime_error("no pulses detected");
    const AOAProfile prof = compute_aoa_profile(pulses, params);

    const fs::path dir = resolve_out_dir(args.out_dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "angle_deg,value\n";
    char buf[64];
    for (std::size_t i = 0; i < prof.angles_deg.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.9f\n", prof.angles_deg[i],
                    prof.values[i]);
      csv << buf;
    }
    write_file(dir / "profile.csv", csv.str());

    json peaks = json::array();
    for (const auto& [angle, value] : prof.top_peaks) {
      peaks.push_back({{"angle_deg", angle}, {"value", value}});
    }
    write_file(dir / "peaks.json",
               json{{"pulses", pulses.size()}, {"top_peaks", peaks}}.dump(2) + "\n");

    std::cout << pulses.size() << " pulses, top peak at "
              << (prof.top_peaks.empty() ? -1.0 : prof.top_peaks[0].first)
              << " deg\n";
    return 0;
  });
}

int run_main(int argc, const char* const* argv) {
  CLI::App app{"Whale-rendezvous simulation and planning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed_override = -1;
  int trials = 25;
  int runs = 40;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--seed", seed_override, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory");

  auto* table3 = app.add_subcommand(
      "table3", "Noise sweep: relative localization error table");
  table3->add_option("config", config_path, "Scenario config (JSON)")->required();
  table3->add_option("--trials", trials, "Trials per cell (default 25)");
  table3->add_option("--out", out_dir, "Output directory");

  auto* flight = app.add_subcommand(
      "flightsweep", "Success rate vs flight-time budget (5/10/15 min)");
  flight->add_option("config", config_path, "Scenario config (JSON)")->required();
  flight->add_option("--runs", runs, "Runs per budget (default 40)");
  flight->add_option("--out", out_dir, "Output directory");

  VhfProfileArgs vargs;
  auto* vhf = app.add_subcommand("vhf-profile",
                                 "Pulse detection + AOA profile from IQ data");
  vhf->add_option("--iq", vargs.iq_csv, "IQ CSV (re0,im0,re1,im1,heading_rad)");
  vhf->add_option("--bearing-deg", vargs.bearing_deg, "Synthetic tag bearing");
  vhf->add_option("--separation", vargs.separation_m, "Antenna separation (m)");
  vhf->add_option("--pulses", vargs.pulses, "Synthetic pulse count");
  vhf->add_option("--snr2", vargs.snr2, "Synthetic SNR^2 target");
  vhf->add_option("--phase-noise", vargs.phase_noise, "Per-pulse phase noise (rad)");
  vhf->add_option("--seed", vargs.seed, "Synthesis seed");
  vhf->add_option("--out", vargs.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return cmd_run(config_path, seed_override, out_dir);
  if (table3->parsed()) return cmd_table3(config_path, trials, out_dir);
  if (flight->parsed()) return cmd_flightsweep(config_path, runs, out_dir);
  if (vhf->parsed()) return cmd_vhf_profile(vargs);
  return 2;
}

}  // namespace wrv::cli
