#include "advaudio/features.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace

int MfccConfig::window_samples() const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int MfccConfig::hop_samples() const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void MfccConfig::validate() const {
  if (sample_rate <= 0) throw Error("mfcc: sample_rate must be positive");
  if (hop_samples() <= 0) throw Error("mfcc: hop must be positive");
  if (window_samples() < hop_samples()) throw Error("mfcc: window shorter than hop");
  if (num_coefficients <= 0 || num_coefficients > num_filters)
    throw Error("mfcc: need 0 < num_coefficients <= num_filters");
  if (fft_size < window_samples())
    throw Error("mfcc: fft_size " + std::to_string(fft_size) + " < window of " +
                std::to_string(window_samples()) + " samples");
  if (!is_power_of_two(fft_size)) throw Error("mfcc: fft_size must be a power of two");
}

MfccExtractor::MfccExtractor(const MfccConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int win = cfg_.window_samples();

  hann_.resize(static_cast<std::size_t>(win));
  for (int i = 0; i < win; ++i)
    hann_[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (win - 1));

  // Triangular filters on the HTK mel scale, 0 Hz .. Nyquist, mapped onto
  // FFT bin centers.
  const std::size_t bins = static_cast<std::size_t>(cfg_.fft_size / 2 + 1);
  const double mel_lo = hz_to_mel(0.0);
  const double mel_hi = hz_to_mel(cfg_.sample_rate / 2.0);
  std::vector<std::size_t> edges(static_cast<std::size_t>(cfg_.num_filters) + 2);
  for (std::size_t j = 0; j < edges.size(); ++j) {
    double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(j) /
                              static_cast<double>(cfg_.num_filters + 1);
    double hz = mel_to_hz(mel);
    edges[j] = static_cast<std::size_t>(
        std::floor((cfg_.fft_size + 1) * hz / cfg_.sample_rate));
    if (edges[j] >= bins) edges[j] = bins - 1;
  }

  filters_.resize(static_cast<std::size_t>(cfg_.num_filters));
  for (int f = 0; f < cfg_.num_filters; ++f) {
    const std::size_t lo = edges[static_cast<std::size_t>(f)];
    const std::size_t mid = edges[static_cast<std::size_t>(f) + 1];
    const std::size_t hi = edges[static_cast<std::size_t>(f) + 2];
    Filter& filt = filters_[static_cast<std::size_t>(f)];
    filt.first_bin = lo;
    filt.weights.assign(hi > lo ? hi - lo + 1 : 1, 0.0);
    for (std::size_t k = lo; k <= hi && k < bins; ++k) {
      double w = 0.0;
      if (k < mid && mid > lo)
        w = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
      else if (k == mid)
        w = mid > lo || hi > mid ? 1.0 : 0.0;
      else if (k <= hi && hi > mid)
        w = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
      filt.weights[k - lo] = w;
    }
  }

  // Orthonormal DCT-II over the log filterbank energies.
  const int M = cfg_.num_filters;
  dct_.resize(static_cast<std::size_t>(cfg_.num_coefficients) * static_cast<std::size_t>(M));
  for (int k = 0; k < cfg_.num_coefficients; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
    for (int m = 0; m < M; ++m)
      dct_[static_cast<std::size_t>(k) * M + m] =
          scale * std::cos(std::numbers::pi * k * (m + 0.5) / M);
  }
}

MfccMatrix MfccExtractor::compute(const AudioClip& clip) const {
  const int win = cfg_.window_samples();
  const int hop = cfg_.hop_samples();
  if (clip.sample_rate != cfg_.sample_rate)
    throw Error("mfcc: clip sample rate " + std::to_string(clip.sample_rate) +
                " does not match configured " + std::to_string(cfg_.sample_rate));
  if (clip.samples.size() < static_cast<std::size_t>(win))
    throw Error("mfcc: clip of " + std::to_string(clip.samples.size()) +
                " samples is shorter than one window (" + std::to_string(win) + ")");

  const std::size_t n = clip.samples.size();
  std::vector<double> emphasized(n);
  emphasized[0] = clip.samples[0];
  for (std::size_t i = 1; i < n; ++i)
    emphasized[i] = clip.samples[i] - cfg_.preemphasis * clip.samples[i - 1];

  const std::size_t frames = (n - static_cast<std::size_t>(win)) / static_cast<std::size_t>(hop) + 1;
  const std::size_t bins = static_cast<std::size_t>(cfg_.fft_size / 2 + 1);

  MfccMatrix out;
  out.frame_count = frames;
  out.coeff_count = static_cast<std::size_t>(cfg_.num_coefficients);
  out.data.resize(frames * out.coeff_count);

  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(cfg_.fft_size));
  std::vector<double> magnitude(bins);
  std::vector<double> log_energy(static_cast<std::size_t>(cfg_.num_filters));

  for (std::size_t t = 0; t < frames; ++t) {
    const double* frame = emphasized.data() + t * static_cast<std::size_t>(hop);
    for (int i = 0; i < win; ++i)
      spectrum[static_cast<std::size_t>(i)] = frame[i] * hann_[static_cast<std::size_t>(i)];
    std::fill(spectrum.begin() + win, spectrum.end(), std::complex<double>(0.0, 0.0));
    fft(spectrum);
    for (std::size_t k = 0; k < bins; ++k) magnitude[k] = std::abs(spectrum[k]);

    for (std::size_t f = 0; f < filters_.size(); ++f) {
      const Filter& filt = filters_[f];
      double acc = 0.0;
      for (std::size_t j = 0; j < filt.weights.size(); ++j)
        acc += filt.weights[j] * magnitude[filt.first_bin + j];
      log_energy[f] = std::log(std::max(acc, kLogFloor));
    }

    for (std::size_t k = 0; k < out.coeff_count; ++k) {
      double acc = 0.0;
      const double* row = dct_.data() + k * static_cast<std::size_t>(cfg_.num_filters);
      for (int m = 0; m < cfg_.num_filters; ++m) acc += row[m] * log_energy[static_cast<std::size_t>(m)];
      out.data[t * out.coeff_count + k] = acc;
    }
  }
  return out;
}

MfccMatrix compute_mfcc(const AudioClip& clip, const MfccConfig& cfg) {
  return MfccExtractor(cfg).compute(clip);
}

double mfcc_distance(const MfccMatrix& a, const MfccMatrix& b) {
  if (a.frame_count != b.frame_count || a.coeff_count != b.coeff_count)
    throw Error("mfcc_distance: shape mismatch (" + std::to_string(a.frame_count) + "x" +
                std::to_string(a.coeff_count) + " vs " + std::to_string(b.frame_count) + "x" +
                std::to_string(b.coeff_count) + ")");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double correlation_coefficient(const AudioClip& a, const AudioClip& b) {
  if (a.samples.size() != b.samples.size())
    throw Error("correlation: length mismatch (" + std::to_string(a.samples.size()) + " vs " +
                std::to_string(b.samples.size()) + ")");
  const std::size_t n = a.samples.size();
  if (n == 0) throw Error("correlation: empty input");

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a.samples[i];
    mean_b += b.samples[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.samples[i] - mean_a;
    const double db = b.samples[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) throw Error("correlation: zero-variance input");
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace advaudio
