// Shared fixtures for the test suites.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "advaudio/audio_io.hpp"

namespace testsupport {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("advaudio-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Builds a 16 kHz clip out of 100 ms sine windows with the given RMS
/// levels (25 cycles per window, so the per-window RMS is exact). This is
/// the shape the toy transcriber reads.
inline advaudio::AudioClip window_tone_clip(const std::vector<double>& window_rms) {
  constexpr int kRate = 16000;
  constexpr std::size_t kWindow = 1600;
  advaudio::AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.reserve(window_rms.size() * kWindow);
  for (double rms : window_rms) {
    const double amplitude = rms * std::numbers::sqrt2;
    for (std::size_t i = 0; i < kWindow; ++i) {
      const double phase = 2.0 * std::numbers::pi * 25.0 * static_cast<double>(i) / kWindow;
      clip.samples.push_back(static_cast<float>(amplitude * std::sin(phase)));
    }
  }
  return clip;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testsupport
