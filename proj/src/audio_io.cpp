#include "advaudio/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());

  std::uint8_t riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12))
    throw IoError(path.string() + ": truncated RIFF header");
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw IoError(path.string() + ": not a RIFF/WAVE container");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::vector<std::uint8_t> data;
  bool have_data = false;

  // Walk chunks until both fmt and data are seen; skip everything else.
  std::uint8_t header[8];
  while (in.read(reinterpret_cast<char*>(header), 8)) {
    std::uint32_t size = read_u32(header + 4);
    if (std::memcmp(header, "fmt ", 4) == 0) {
      if (size < 16) throw IoError(path.string() + ": fmt chunk too small");
      std::vector<std::uint8_t> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size))
        throw IoError(path.string() + ": truncated fmt chunk");
      format = read_u16(fmt.data());
      channels = read_u16(fmt.data() + 2);
      sample_rate = read_u32(fmt.data() + 4);
      bits = read_u16(fmt.data() + 14);
      have_fmt = true;
    } else if (std::memcmp(header, "data", 4) == 0) {
      data.resize(size);
      if (!in.read(reinterpret_cast<char*>(data.data()), size))
        throw IoError(path.string() + ": truncated data chunk");
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
      continue;
    }
    if (size & 1) in.seekg(1, std::ios::cur);
    if (have_fmt && have_data) break;
  }

  if (!have_fmt) throw IoError(path.string() + ": missing fmt chunk");
  if (!have_data) throw IoError(path.string() + ": missing data chunk");
  if (format != kFormatPcm)
    throw IoError(path.string() + ": unsupported encoding (format tag " +
                  std::to_string(format) + ", expected PCM)");
  if (channels != 1)
    throw IoError(path.string() + ": unsupported channel count " +
                  std::to_string(channels) + " (expected mono)");
  if (bits != 16)
    throw IoError(path.string() + ": unsupported bit depth " + std::to_string(bits) +
                  " (expected 16)");
  if (sample_rate == 0) throw IoError(path.string() + ": zero sample rate");
  if (data.size() < 2) throw IoError(path.string() + ": empty data chunk");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  const std::size_t n = data.size() / 2;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto raw = static_cast<std::int16_t>(read_u16(data.data() + 2 * i));
    clip.samples[i] = static_cast<float>(raw) / 32768.0f;
  }
  return clip;
}

std::vector<std::uint8_t> wav_bytes(const AudioClip& clip) {
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);

  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);  // byte rate
  put_u16(out, 2);                                                 // block align
  put_u16(out, 16);                                                // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);

  for (float a : clip.samples) {
    long q = std::lround(static_cast<double>(a) * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.samples.empty()) throw IoError("refusing to write empty clip: " + path.string());
  if (clip.sample_rate <= 0) throw IoError("invalid sample rate for " + path.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  auto bytes = wav_bytes(clip);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path.string());
}

float clamp_amplitude(float v) { return std::clamp(v, -1.0f, 1.0f); }

void clamp(std::vector<float>& samples) {
  for (float& v : samples) v = clamp_amplitude(v);
}

std::vector<float> clamped(std::span<const float> samples) {
  std::vector<float> out(samples.begin(), samples.end());
  clamp(out);
  return out;
}

}  // namespace advaudio
