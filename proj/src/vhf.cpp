#include "wrv/vhf.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wrv {

namespace {

constexpr double kSynthAmplitude = 4.0;
constexpr double kPulseStartOffset_s = 0.040;

// RAII wrapper for a fixed-size FFTW complex-to-complex plan.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    plan_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  // returns |X_k|^2 for the window starting at `begin`
  void power_spectrum(const std::complex<double>* begin, std::vector<double>& out) {
    for (int i = 0; i < n_; ++i) {
      buf_[i][0] = begin[i].real();
      buf_[i][1] = begin[i].imag();
    }
    fftw_execute(plan_);
    out.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      out[i] = buf_[i][0] * buf_[i][0] + buf_[i][1] * buf_[i][1];
    }
  }

 private:
  int n_;
  fftw_complex* buf_;
  fftw_plan plan_;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

IQRecord synthesize_iq(double tag_bearing_deg, const RotationPlan& rotation,
                       const VHFParams& params, const SynthNoise& noise,
                       std::mt19937_64& rng) {
  if (rotation.sweep_rad < kTwoPi - 1e-9) {
    throw std::invalid_argument("synthesize_iq: rotation must cover >= 360 degrees");
  }
  if (rotation.duration_s <= 0.0 || params.sample_rate_hz <= 0.0) {
    throw std::invalid_argument("synthesize_iq: invalid duration or sample rate");
  }

  const std::size_t n =
      static_cast<std::size_t>(rotation.duration_s * params.sample_rate_hz);
  IQRecord rec;
  rec.sample_rate_hz = params.sample_rate_hz;
  rec.ch0.resize(n);
  rec.ch1.resize(n);
  rec.headings.resize(n);

  const double bearing_rad = deg2rad(tag_bearing_deg);
  const double kappa = kTwoPi * params.antenna_separation_m / params.wavelength_m;
  const double omega = kTwoPi * params.tone_freq_hz;
  const double sigma_n = noise.target_snr2 > 0.0
                             ? kSynthAmplitude / std::sqrt(noise.target_snr2)
                             : 0.0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u2pi(0.0, kTwoPi);

  // pulse bookkeeping: per-pulse carrier phase and slow phase drift
  const auto pulse_index = [&](double t) -> long {
    if (t < kPulseStartOffset_s) return -1;
    const double rel = t - kPulseStartOffset_s;
    const long k = static_cast<long>(rel / params.pulse_period_s);
    const double within = rel - k * params.pulse_period_s;
    return within < params.pulse_on_s ? k : -1;
  };

  long cur_pulse = -2;
  double carrier_phase = 0.0;
  double pulse_drift = 0.0;
  const double noise_scale = sigma_n / std::sqrt(2.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / params.sample_rate_hz;
    const double heading = wrap_2pi(rotation.start_heading_rad +
                                    rotation.sweep_rad * t / rotation.duration_s);
    rec.headings[i] = heading;

    std::complex<double> s0{0.0, 0.0}, s1{0.0, 0.0};
    const long k = pulse_index(t);
    if (k >= 0) {
      if (k != cur_pulse) {
        cur_pulse = k;
        carrier_phase = u2pi(rng);
        pulse_drift = noise.phase_sigma_per_pulse > 0.0
                          ? noise.phase_sigma_per_pulse * gauss(rng)
                          : 0.0;
      }
      double dphi = kappa * std::cos(bearing_rad - heading) + pulse_drift;
      if (noise.phase_sigma_per_sample > 0.0) {
        dphi += noise.phase_sigma_per_sample * gauss(rng);
      }
      const double base = omega * t + carrier_phase;
      s0 = std::polar(kSynthAmplitude, base);
      s1 = std::polar(kSynthAmplitude, base + dphi);
    }
    if (sigma_n > 0.0) {
      s0 += std::complex<double>(noise_scale * gauss(rng), noise_scale * gauss(rng));
      s1 += std::complex<double>(noise_scale * gauss(rng), noise_scale * gauss(rng));
    }
    rec.ch0[i] = s0;
    rec.ch1[i] = s1;
  }
  return rec;
}

std::vector<PulseRecord> detect_pulses(const IQRecord& record,
                                       const VHFParams& params) {
  if (record.ch0.empty() || record.ch0.size() != record.ch1.size()) {
    throw std::invalid_argument("detect_pulses: empty or mismatched channels");
  }
  const std::size_t n = record.ch0.size();
  const int W = params.fft_window;
  const int hop = std::max(1, params.fft_hop);
  if (n < static_cast<std::size_t>(W)) return {};

  // Noise floor from the sample-power median; pulses occupy ~2% of the
  // record, so the median sits on noise. |n|^2 is exponential with median
  // sigma^2 ln 2.
  std::vector<double> powers(n);
  for (std::size_t i = 0; i < n; ++i) powers[i] = std::norm(record.ch0[i]);
  const double floor_power = std::max(median(powers) / std::log(2.0), 1e-300);

  struct WindowHit {
    std::size_t win_index;
    int peak_bin;
    double dbm;
  };
  std::vector<WindowHit> hits;
  FftPlan fft(W);
  std::vector<double> spec;
  const std::size_t n_windows = (n - W) / hop + 1;
  for (std::size_t w = 0; w < n_windows; ++w) {
    const std::size_t s = w * hop;
    fft.power_spectrum(&record.ch0[s], spec);
    int peak_bin = 0;
    double peak = 0.0, total = 0.0;
    for (int k = 0; k < W; ++k) {
      total += spec[k];
      if (spec[k] > peak) {
        peak = spec[k];
        peak_bin = k;
      }
    }
    const double rest = (total - peak) / std::max(1, W - 1);
    const double ratio = rest > 0.0 ? peak / rest : std::numeric_limits<double>::infinity();
    const double amp2 = peak / (static_cast<double>(W) * W);
    const double dbm = 10.0 * std::log10(std::max(amp2, 1e-300)) + params.dbm_ref_db;
    if (dbm >= params.power_threshold_dbm && ratio >= params.snr2_threshold) {
      hits.push_back({w, peak_bin, dbm});
    }
  }
  if (hits.empty()) return {};

  const int ma = std::max<int>(1, static_cast<int>(params.moving_avg_ms * 1e-3 *
                                                   record.sample_rate_hz));
  std::vector<PulseRecord> pulses;
  std::size_t run_start = 0;
  const auto flush_run = [&](std::size_t lo, std::size_t hi) {
    // candidate extent in samples
    const std::size_t s0 = hits[lo].win_index * hop;
    const std::size_t s1 = std::min(n, hits[hi].win_index * hop + W);
    // modal peak bin across the run
    std::vector<int> bins;
    double peak_dbm = -std::numeric_limits<double>::infinity();
    for (std::size_t h = lo; h <= hi; ++h) {
      bins.push_back(hits[h].peak_bin);
      peak_dbm = std::max(peak_dbm, hits[h].dbm);
    }
    std::sort(bins.begin(), bins.end());
    int bin = bins[bins.size() / 2];
    if (bin > W / 2) bin -= W;  // negative frequencies
    const double omega = kTwoPi * bin * record.sample_rate_hz / W;

    // moving-average-smoothed magnitude over the extent
    const std::size_t len = s1 - s0;
    std::vector<double> mag(len);
    for (std::size_t i = 0; i < len; ++i) mag[i] = std::abs(record.ch0[s0 + i]);
    std::vector<double> smooth(len, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      acc += mag[i];
      if (i >= static_cast<std::size_t>(ma)) acc -= mag[i - ma];
      smooth[i] = acc / std::min<std::size_t>(i + 1, ma);
    }

    // strongest samples by smoothed magnitude
    std::vector<std::size_t> order(len);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t top =
        std::min<std::size_t>(len, static_cast<std::size_t>(
                                       std::max(1, params.samples_per_pulse_top)));
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](std::size_t a, std::size_t b) { return smooth[a] > smooth[b]; });

    // coherent amplitude estimate and phase statistics over the top samples
    std::complex<double> demod{0.0, 0.0};
    std::complex<double> phasor{0.0, 0.0};
    for (std::size_t r = 0; r < top; ++r) {
      const std::size_t i = s0 + order[r];
      const double t = static_cast<double>(i) / record.sample_rate_hz;
      const std::complex<double> rot = std::polar(1.0, -omega * t);
      demod += record.ch0[i] * rot;
      phasor += record.ch1[i] * std::conj(record.ch0[i]);
    }
    demod /= static_cast<double>(top);
    const double snr2 = std::norm(demod) / floor_power;
    if (snr2 < params.snr2_threshold) return;

    PulseRecord p;
    p.start_idx = s0;
    p.end_idx = s1;
    p.snr2 = snr2;
    p.mean_phase_diff = std::arg(phasor);
    p.baseline_heading =
        record.headings.empty() ? 0.0 : record.headings[(s0 + s1) / 2];
    p.peak_power_dbm = peak_dbm;
    pulses.push_back(p);
  };

  for (std::size_t h = 1; h <= hits.size(); ++h) {
    // allow one missing window inside a pulse before splitting
    if (h == hits.size() || hits[h].win_index > hits[h - 1].win_index + 2) {
      flush_run(run_start, h - 1);
      run_start = h;
    }
  }
  return pulses;
}

AOAProfile compute_aoa_profile(const std::vector<PulseRecord>& pulses,
                               const VHFParams& params) {
  if (pulses.empty()) {
    throw std::invalid_argument("compute_aoa_profile: no pulses");
  }
  // heading span on the circle: 2 pi minus the largest empty gap
  std::vector<double> hs;
  hs.reserve(pulses.size());
  for (const auto& p : pulses) hs.push_back(wrap_2pi(p.baseline_heading));
  std::sort(hs.begin(), hs.end());
  double max_gap = kTwoPi - hs.back() + hs.front();
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    max_gap = std::max(max_gap, hs[i + 1] - hs[i]);
  }
  if (kTwoPi - max_gap < kPi - 1e-9) {
    throw std::runtime_error("compute_aoa_profile: aperture incomplete (pulses span < 180 degrees)");
  }

  const double kappa = kTwoPi * params.antenna_separation_m / params.wavelength_m;
  const int n_grid = static_cast<int>(std::lround(360.0 / params.grid_step_deg));
  AOAProfile prof;
  prof.angles_deg.resize(n_grid);
  prof.values.resize(n_grid);
  const double inv_n2 = 1.0 / (static_cast<double>(pulses.size()) * pulses.size());
  for (int g = 0; g < n_grid; ++g) {
    const double a_deg = g * params.grid_step_deg;
    const double a = deg2rad(a_deg);
    std::complex<double> acc{0.0, 0.0};
    for (const auto& p : pulses) {
      const double predicted = kappa * std::cos(a - p.baseline_heading);
      acc += std::polar(1.0, p.mean_phase_diff - predicted);
    }
    prof.angles_deg[g] = a_deg;
    prof.values[g] = std::norm(acc) * inv_n2;
  }

  // top three circular local maxima
  std::vector<std::pair<double, double>> peaks;
  for (int g = 0; g < n_grid; ++g) {
    const double prev = prof.values[(g + n_grid - 1) % n_grid];
    const double next = prof.values[(g + 1) % n_grid];
    const double v = prof.values[g];
    if (v >= prev && v > next) peaks.emplace_back(prof.angles_deg[g], v);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  if (peaks.size() > 3) peaks.resize(3);
  prof.top_peaks = std::move(peaks);
  return prof;
}

bool surfacing_cue(const std::vector<PulseRecord>& pulses, double window_start_s,
                   double window_end_s, const VHFParams& params) {
  for (const auto& p : pulses) {
    const double t = 0.5 * static_cast<double>(p.start_idx + p.end_idx) /
                     params.sample_rate_hz;
    if (t >= window_start_s && t < window_end_s && p.snr2 >= params.snr2_threshold) {
      return true;
    }
  }
  return false;
}

}  // namespace wrv
