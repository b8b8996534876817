#pragma once
#include <cstdint>
#include <string>

namespace wrv::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success, 1 runtime failure, 2 invalid config/arguments.
int run_main(int argc, const char* const* argv);

/// Individual commands (exposed for in-process testing).
int cmd_run(const std::string& config_path, long long seed_override,
            const std::string& out_dir);
int cmd_table3(const std::string& config_path, int trials,
               const std::string& out_dir);
int cmd_flightsweep(const std::string& config_path, int runs,
                    const std::string& out_dir);

struct VhfProfileArgs {
  std::string iq_csv;       // optional: load a two-channel IQ CSV
  double bearing_deg = 0.0; // synthesis mode
  double separation_m = 2.0;
  int pulses = 36;
  double snr2 = 1e12;
  double phase_noise = 0.0;
  std::uint64_t seed = 1;
  std::string out_dir;
};
int cmd_vhf_profile(const VhfProfileArgs& args);

}  // namespace wrv::cli
