#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace advaudio {

/// Mono PCM waveform. Amplitudes are normalized floats in [-1, 1]; every
/// 16-bit PCM value is exactly representable, so a load/save cycle is
/// lossless. One sample = one gene of the attack genome.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Reads a RIFF/WAVE file. Only PCM, 16-bit, mono data is accepted;
/// anything else is rejected with the offending property in the message.
AudioClip load_wav(const std::filesystem::path& path);

/// Writes a canonical 44-byte-header PCM 16-bit mono WAV. Amplitudes are
/// quantized by round(a * 32768), clamped to [-32768, 32767], which makes
/// save(load(f)) reproduce f's sample bytes exactly.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

/// Serializes the clip to WAV bytes (same encoding as save_wav).
std::vector<std::uint8_t> wav_bytes(const AudioClip& clip);

float clamp_amplitude(float v);

/// Limits every element to [-1, 1] in place.
void clamp(std::vector<float>& samples);

/// Copying variant of clamp().
std::vector<float> clamped(std::span<const float> samples);

}  // namespace advaudio
