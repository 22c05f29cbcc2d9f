#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "advaudio/audio_io.hpp"
#include "advaudio/text_metrics.hpp"

namespace advaudio {

/// Deterministic stand-in ASR used for hermetic tests: 100 ms windows,
/// RMS energy quantized into 4 bins, run-length encoded, each
/// (bin, run-length bucket) mapped to a word. Bin 0 is silence and emits
/// nothing. The bin edges are frozen defaults but configurable so a
/// "different system" can be simulated for transfer experiments.
struct ToyAsrConfig {
  std::array<double, 3> bin_edges = {0.02, 0.1, 0.3};
  /// words[bin - 1][bucket], buckets = run length 1 / 2 / 3-or-more.
  std::array<std::array<std::string, 3>, 3> words = {{
      {"pale", "soft", "dim"},
      {"calm", "steady", "plain"},
      {"loud", "sharp", "bold"},
  }};

  /// Plain-text table: `bin bucket word` entries, optional
  /// `edges a b c` line, `#` comments. All nine words must be present.
  static ToyAsrConfig load(const std::filesystem::path& path);
};

/// Binding to whatever maps audio to text. Strictly input/output: no
/// scores, no logits.
struct TranscriberBinding {
  enum class Kind { toy, subprocess, http };

  Kind kind = Kind::toy;
  ToyAsrConfig toy;
  /// Subprocess: shell command with exactly one {input} placeholder for
  /// the candidate WAV path; transcript read from stdout.
  std::string command;
  /// HTTP: POST target; body is WAV bytes, response JSON {"text": ...}.
  std::string url;
  int timeout_ms = 30000;

  void validate() const;

  static TranscriberBinding make_toy(ToyAsrConfig cfg = {});
  static TranscriberBinding make_subprocess(std::string command_template);
  static TranscriberBinding make_http(std::string url, int timeout_ms = 30000);
};

/// The toy pipeline itself. Pure function of the sample values.
Transcript toy_asr(const AudioClip& clip, const ToyAsrConfig& cfg);

/// Runs the bound transcriber on the clip and normalizes its raw output.
/// Throws OracleError on subprocess/HTTP failures.
Transcript transcribe(const AudioClip& clip, const TranscriberBinding& binding);

}  // namespace advaudio
