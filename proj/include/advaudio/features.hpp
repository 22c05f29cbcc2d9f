#pragma once

#include <cstddef>
#include <vector>

#include "advaudio/audio_io.hpp"

namespace advaudio {

/// Front-end parameters for the acoustic-similarity objective.
/// 25 ms / 10 ms framing; the remaining values are the conventional ASR
/// defaults and all configurable.
struct MfccConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int num_filters = 26;
  int num_coefficients = 13;
  int fft_size = 512;
  double preemphasis = 0.97;

  int window_samples() const;
  int hop_samples() const;

  /// Throws on inconsistent settings (window < hop, too many coefficients,
  /// fft shorter than a window, non-power-of-two fft).
  void validate() const;
};

/// Row-major [frame][coefficient] feature matrix.
struct MfccMatrix {
  std::size_t frame_count = 0;
  std::size_t coeff_count = 0;
  std::vector<double> data;

  double at(std::size_t frame, std::size_t coeff) const {
    return data[frame * coeff_count + coeff];
  }
};

/// Precomputes window/filterbank/DCT tables once and reuses them across
/// candidates; the attack loop extracts features thousands of times per run.
class MfccExtractor {
 public:
  explicit MfccExtractor(const MfccConfig& cfg);

  MfccMatrix compute(const AudioClip& clip) const;
  const MfccConfig& config() const { return cfg_; }

 private:
  struct Filter {
    std::size_t first_bin = 0;
    std::vector<double> weights;
  };

  MfccConfig cfg_;
  std::vector<double> hann_;
  std::vector<Filter> filters_;
  std::vector<double> dct_;  // [coeff][filter]
};

/// Pre-emphasis -> framing -> Hann window -> magnitude FFT -> triangular
/// mel filterbank (HTK scale) -> log -> DCT-II. One-shot convenience
/// wrapper around MfccExtractor.
MfccMatrix compute_mfcc(const AudioClip& clip, const MfccConfig& cfg);

/// Euclidean distance over the full matrices (all frames, all
/// coefficients). Shapes must match.
double mfcc_distance(const MfccMatrix& a, const MfccMatrix& b);

/// Pearson correlation of two equal-length waveforms.
double correlation_coefficient(const AudioClip& a, const AudioClip& b);

}  // namespace advaudio
