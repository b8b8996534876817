#pragma once
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "wrv/world.hpp"

namespace wrv {

struct VHFParams {
  double wavelength_m = 1.9886;       // c / 150.754 MHz
  double antenna_separation_m = 2.0;  // baseline length l
  double snr2_threshold = 10.0;       // mean square signal-to-noise gate
  double power_threshold_dbm = -77.0; // spectral detection gate
  int samples_per_pulse_top = 200;    // strongest samples kept per pulse
  double grid_step_deg = 1.0;
  double sample_rate_hz = 16384.0;
  double tone_freq_hz = 1024.0;  // baseband tone; near an FFT bin
  int fft_window = 256;
  int fft_hop = 64;
  double dbm_ref_db = -75.0;  // maps unit synthetic tone power to dBm
  double moving_avg_ms = 1.0;
  double pulse_on_s = 0.020;      // 20 ms pulse
  double pulse_period_s = 1.100;  // every 1100 ms
};

/// Two-channel complex baseband capture. headings carries the per-sample
/// baseline heading reported by the flight controller.
struct IQRecord {
  std::vector<std::complex<double>> ch0, ch1;
  std::vector<double> headings;
  double sample_rate_hz = 0.0;
  double center_freq_hz = 150.754e6;
};

struct PulseRecord {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;  // one past the last sample
  double snr2 = 0.0;
  double mean_phase_diff = 0.0;   // circular mean of arg(ch1 * conj(ch0))
  double baseline_heading = 0.0;  // at the pulse midpoint
  double peak_power_dbm = 0.0;
};

struct AOAProfile {
  std::vector<double> angles_deg;
  std::vector<double> values;  // coherence in [0, 1]
  std::vector<std::pair<double, double>> top_peaks;  // (angle deg, value)
};

/// In-place rotation emulating a virtual circular aperture.
struct RotationPlan {
  double start_heading_rad = 0.0;
  double sweep_rad = kTwoPi;  // must cover a full turn
  double duration_s = 40.0;
};

struct SynthNoise {
  double target_snr2 = 1e12;          // coherent amplitude^2 / noise power
  double phase_sigma_per_pulse = 0.0; // slow channel drift, one draw per pulse
  double phase_sigma_per_sample = 0.0;
};

/// Synthesize a two-channel record of a pulsing tag. The channel phase
/// difference per sample is (2 pi l / lambda) cos(bearing - heading(t)), the
/// envelope is 20 ms on / 1080 ms off, and additive complex Gaussian noise
/// sets the floor. Requires the rotation to cover at least 360 degrees.
IQRecord synthesize_iq(double tag_bearing_deg, const RotationPlan& rotation,
                       const VHFParams& params, const SynthNoise& noise,
                       std::mt19937_64& rng);

/// Sliding-FFT pulse detection. Windows pass when the peak spectral power
/// reaches the dBm threshold and the peak-to-floor ratio reaches the SNR^2
/// threshold; contiguous windows merge into pulses. Each pulse's magnitude
/// is smoothed by a moving average, the strongest samples feed the phase
/// statistics, and the pulse is kept only if its coherent SNR^2 passes the
/// threshold.
std::vector<PulseRecord> detect_pulses(const IQRecord& record,
                                       const VHFParams& params);

/// Virtual-aperture AOA: coherence of measured phase differences against the
/// steering prediction on a 1-degree grid, with the top three local maxima.
/// Requires pulses spanning at least 180 degrees of baseline headings.
AOAProfile compute_aoa_profile(const std::vector<PulseRecord>& pulses,
                               const VHFParams& params);

/// True iff at least one pulse with SNR^2 above threshold falls inside
/// [window_start_s, window_end_s) of record time.
bool surfacing_cue(const std::vector<PulseRecord>& pulses, double window_start_s,
                   double window_end_s, const VHFParams& params);

}  // namespace wrv
