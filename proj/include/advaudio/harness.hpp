#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "advaudio/attack.hpp"
#include "advaudio/oracle.hpp"
#include "advaudio/rng.hpp"

namespace advaudio {

/// One run configuration file: the attack parameters, the oracle binding,
/// and (targeted runs) either a fixed target text or a corpus to draw
/// per-sample targets from.
struct HarnessConfig {
  AttackConfig attack;
  TranscriberBinding binding;
  std::filesystem::path target_corpus;

  void validate() const;
};

HarnessConfig load_config(const std::filesystem::path& path);

/// Binding from a JSON object ({"kind": "toy"|"subprocess"|"http", ...}).
TranscriberBinding binding_from_json(const nlohmann::json& j);

/// Binding from a CLI string: "toy", "toy:<vocab-file>", "cmd:<template>",
/// an http:// URL, or a path to a JSON file holding a binding object.
TranscriberBinding parse_binding(const std::string& spec);

/// Where targeted phrases come from: a corpus file and the word length n
/// of the original sample's transcript. The drawn phrase length is
/// uniform over the lengths in [2, n+1] that the corpus can serve.
struct TargetTextSpec {
  std::filesystem::path corpus_path;
  std::size_t reference_length = 0;
};

Transcript generate_target(const TargetTextSpec& spec, Rng& rng);

nlohmann::json generation_record_json(const GenerationRecord& record);
nlohmann::json summary_json(const AttackResult& result);

/// One manifest row per attacked sample; error rows keep the batch going.
struct SampleResult {
  std::string input;
  std::string output_wav;
  std::string history;
  std::string original_transcript;
  std::string mode;
  std::optional<std::string> target;
  ObjectiveVector final_objectives;
  std::size_t edit_distance_to_original = 0;
  std::optional<std::size_t> edit_distance_to_target;
  std::optional<double> cc;
  std::size_t generations = 0;
  bool converged = false;
  std::size_t oracle_calls = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;
};

struct RunManifest {
  std::vector<SampleResult> samples;

  std::size_t failure_count() const;
  /// Mean word edit distance to the original transcripts (the
  /// paper-style WER), over non-failed rows.
  std::optional<double> paper_style_wer() const;
  /// Mean of distance / reference length over non-failed rows with a
  /// non-empty reference.
  std::optional<double> normalized_wer() const;
  std::optional<double> mean_cc() const;
  std::optional<double> mean_target_distance() const;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  static RunManifest load(const std::filesystem::path& path);
};

/// Attacks every WAV under `input` (a file or a directory), writing
/// adversarial WAVs, per-run JSONL histories, and manifest.json into
/// `out_dir`. Per-sample seeds derive from (config seed, sample index).
RunManifest attack_command(const HarnessConfig& cfg, const std::filesystem::path& input,
                           const std::filesystem::path& out_dir);

struct PairReport {
  std::string input;
  std::string adversarial;
  std::string reference;
  std::string transcript;
  std::size_t edit_distance = 0;
  std::optional<double> normalized_wer;
  std::optional<double> cc;
  std::optional<std::string> error;
};

struct EvaluationReport {
  std::vector<PairReport> pairs;

  std::size_t failure_count() const;
  std::optional<double> paper_style_wer() const;
  std::optional<double> normalized_wer() const;
  std::optional<double> mean_cc() const;

  nlohmann::json to_json() const;
};

/// Re-transcribes each manifest entry with the given binding and scores it
/// against the stored reference transcript. With `use_originals` the
/// original WAVs are transcribed instead of the adversarial ones
/// (baseline check). Length-mismatched pairs keep their edit distance but
/// skip CC.
EvaluationReport evaluate_command(const RunManifest& manifest, const TranscriberBinding& binding,
                                  bool use_originals = false);

/// Transferability experiment: adversarial samples produced against one
/// oracle, scored by another. Identical to evaluate_command on the
/// adversarial WAVs by construction.
EvaluationReport transfer_command(const RunManifest& manifest, const TranscriberBinding& binding);

}  // namespace advaudio
