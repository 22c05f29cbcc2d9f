#include "advaudio/oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "httplib.h"
#include "nlohmann/json.hpp"

#include "advaudio/error.hpp"

namespace advaudio {
namespace {

constexpr double kToyWindowSeconds = 0.1;
constexpr int kToySampleRate = 16000;

int energy_bin(double rms, const std::array<double, 3>& edges) {
  if (rms < edges[0]) return 0;
  if (rms < edges[1]) return 1;
  if (rms < edges[2]) return 2;
  return 3;
}

int length_bucket(std::size_t run_length) {
  return run_length >= 3 ? 2 : static_cast<int>(run_length) - 1;
}

/// Temp WAV with RAII cleanup for the subprocess protocol.
class TempWav {
 public:
  explicit TempWav(const AudioClip& clip) {
    static std::atomic<unsigned> counter{0};
    std::ostringstream name;
    name << "advaudio-" << ::getpid() << "-" << counter.fetch_add(1) << ".wav";
    path_ = std::filesystem::temp_directory_path() / name.str();
    save_wav(clip, path_);
  }
  ~TempWav() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string run_command(const std::string& command) {
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) throw OracleError("failed to start subprocess: " + command);
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
  const int status = ::pclose(pipe);
  if (status != 0)
    throw OracleError("subprocess exited with status " + std::to_string(status) + ": " + command);
  // trim
  const auto first = output.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = output.find_last_not_of(" \t\r\n");
  return output.substr(first, last - first + 1);
}

std::string http_transcribe(const AudioClip& clip, const std::string& url, int timeout_ms) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http")
    throw OracleError("http binding needs an http:// URL, got: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(0, timeout_ms * 1000);
  client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
  client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

  const auto body = wav_bytes(clip);
  auto res = client.Post(path, reinterpret_cast<const char*>(body.data()), body.size(),
                         "audio/wav");
  if (!res) throw OracleError("http oracle unreachable: " + url);
  if (res->status < 200 || res->status >= 300)
    throw OracleError("http oracle returned status " + std::to_string(res->status) + ": " + url);

  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") ||
      !doc["text"].is_string())
    throw OracleError("http oracle response is not a JSON object with a \"text\" string");
  return doc["text"].get<std::string>();
}

}  // namespace

ToyAsrConfig ToyAsrConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open toy vocabulary: " + path.string());

  ToyAsrConfig cfg;
  std::array<std::array<bool, 3>, 3> seen{};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    if (first == "edges") {
      if (!(ls >> cfg.bin_edges[0] >> cfg.bin_edges[1] >> cfg.bin_edges[2]))
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": edges needs 3 values");
      continue;
    }
    int bin = -1, bucket = -1;
    std::string word;
    try {
      bin = std::stoi(first);
    } catch (...) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad bin value");
    }
    if (!(ls >> bucket >> word))
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected `bin bucket word`");
    if (bin < 1 || bin > 3 || bucket < 0 || bucket > 2)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": bin must be 1..3 and bucket 0..2");
    cfg.words[static_cast<std::size_t>(bin - 1)][static_cast<std::size_t>(bucket)] = word;
    seen[static_cast<std::size_t>(bin - 1)][static_cast<std::size_t>(bucket)] = true;
  }
  for (int b = 0; b < 3; ++b)
    for (int u = 0; u < 3; ++u)
      if (!seen[static_cast<std::size_t>(b)][static_cast<std::size_t>(u)])
        throw IoError(path.string() + ": missing entry for bin " + std::to_string(b + 1) +
                      " bucket " + std::to_string(u));
  if (!(cfg.bin_edges[0] > 0 && cfg.bin_edges[0] < cfg.bin_edges[1] &&
        cfg.bin_edges[1] < cfg.bin_edges[2]))
    throw IoError(path.string() + ": edges must be positive and increasing");
  return cfg;
}

void TranscriberBinding::validate() const {
  switch (kind) {
    case Kind::toy:
      break;
    case Kind::subprocess: {
      const auto pos = command.find("{input}");
      if (pos == std::string::npos)
        throw Error("subprocess binding needs an {input} placeholder: " + command);
      if (command.find("{input}", pos + 1) != std::string::npos)
        throw Error("subprocess binding must contain exactly one {input} placeholder");
      break;
    }
    case Kind::http:
      if (url.empty()) throw Error("http binding needs a URL");
      if (timeout_ms <= 0) throw Error("http binding needs a positive timeout");
      break;
  }
}

TranscriberBinding TranscriberBinding::make_toy(ToyAsrConfig cfg) {
  TranscriberBinding b;
  b.kind = Kind::toy;
  b.toy = std::move(cfg);
  return b;
}

TranscriberBinding TranscriberBinding::make_subprocess(std::string command_template) {
  TranscriberBinding b;
  b.kind = Kind::subprocess;
  b.command = std::move(command_template);
  b.validate();
  return b;
}

TranscriberBinding TranscriberBinding::make_http(std::string url, int timeout_ms) {
  TranscriberBinding b;
  b.kind = Kind::http;
  b.url = std::move(url);
  b.timeout_ms = timeout_ms;
  b.validate();
  return b;
}

Transcript toy_asr(const AudioClip& clip, const ToyAsrConfig& cfg) {
  if (clip.sample_rate != kToySampleRate)
    throw OracleError("toy oracle expects 16 kHz input, got " +
                      std::to_string(clip.sample_rate) + " Hz");
  const std::size_t window = static_cast<std::size_t>(
      std::lround(kToyWindowSeconds * clip.sample_rate));
  const std::size_t windows = clip.samples.size() / window;  // trailing partial dropped

  std::vector<int> bins(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    double acc = 0.0;
    const float* p = clip.samples.data() + w * window;
    for (std::size_t i = 0; i < window; ++i) acc += static_cast<double>(p[i]) * p[i];
    bins[w] = energy_bin(std::sqrt(acc / static_cast<double>(window)), cfg.bin_edges);
  }

  Transcript words;
  std::size_t i = 0;
  while (i < windows) {
    std::size_t j = i;
    while (j < windows && bins[j] == bins[i]) ++j;
    if (bins[i] != 0) {
      const auto& word = cfg.words[static_cast<std::size_t>(bins[i] - 1)]
                                  [static_cast<std::size_t>(length_bucket(j - i))];
      words.push_back(word);
    }
    i = j;
  }
  return normalize(join(words));
}

Transcript transcribe(const AudioClip& clip, const TranscriberBinding& binding) {
  binding.validate();
  switch (binding.kind) {
    case TranscriberBinding::Kind::toy:
      return toy_asr(clip, binding.toy);
    case TranscriberBinding::Kind::subprocess: {
      TempWav wav(clip);
      std::string command = binding.command;
      command.replace(command.find("{input}"), 7, wav.path().string());
      return normalize(run_command(command));
    }
    case TranscriberBinding::Kind::http:
      return normalize(http_transcribe(clip, binding.url, binding.timeout_ms));
  }
  throw Error("unreachable binding kind");
}

}  // namespace advaudio
