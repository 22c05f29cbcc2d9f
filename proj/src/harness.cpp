#include "advaudio/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "advaudio/error.hpp"

namespace advaudio {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamTarget = 3;

json optional_str(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

double require_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw IoError("config: \"" + key + "\" must be a number");
  return j[key].get<double>();
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

std::vector<std::filesystem::path> collect_wavs(const std::filesystem::path& input) {
  std::vector<std::filesystem::path> wavs;
  if (std::filesystem::is_directory(input)) {
    for (const auto& entry : std::filesystem::directory_iterator(input))
      if (entry.is_regular_file() && entry.path().extension() == ".wav")
        wavs.push_back(entry.path());
    std::sort(wavs.begin(), wavs.end());
  } else {
    wavs.push_back(input);
  }
  return wavs;
}

}  // namespace

void HarnessConfig::validate() const {
  binding.validate();
  if (attack.mode == AttackMode::targeted && attack.target_text.empty() &&
      target_corpus.empty())
    throw Error("config: targeted mode needs target_text or target_corpus");
  if (attack.mode == AttackMode::untargeted &&
      (!attack.target_text.empty() || !target_corpus.empty()))
    throw Error("config: target_text/target_corpus are only valid in targeted mode");
  // Per-run validation of target_text happens once the target is known;
  // everything else is checked now.
  AttackConfig probe = attack;
  if (probe.mode == AttackMode::targeted && probe.target_text.empty())
    probe.target_text = {"placeholder"};
  probe.validate();
}

TranscriberBinding binding_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw IoError("oracle binding must be an object with a \"kind\" string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "toy") {
    ToyAsrConfig toy;
    if (j.contains("vocab")) toy = ToyAsrConfig::load(j["vocab"].get<std::string>());
    return TranscriberBinding::make_toy(std::move(toy));
  }
  if (kind == "subprocess") {
    if (!j.contains("command") || !j["command"].is_string())
      throw IoError("subprocess binding needs a \"command\" string");
    return TranscriberBinding::make_subprocess(j["command"].get<std::string>());
  }
  if (kind == "http") {
    if (!j.contains("url") || !j["url"].is_string())
      throw IoError("http binding needs a \"url\" string");
    int timeout = static_cast<int>(require_number(j, "timeout_ms", 30000));
    return TranscriberBinding::make_http(j["url"].get<std::string>(), timeout);
  }
  throw IoError("unknown oracle kind: " + kind);
}

TranscriberBinding parse_binding(const std::string& spec) {
  if (spec == "toy") return TranscriberBinding::make_toy();
  if (spec.rfind("toy:", 0) == 0)
    return TranscriberBinding::make_toy(ToyAsrConfig::load(spec.substr(4)));
  if (spec.rfind("cmd:", 0) == 0)
    return TranscriberBinding::make_subprocess(spec.substr(4));
  if (spec.rfind("http://", 0) == 0) return TranscriberBinding::make_http(spec);
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw IoError("binding file is not valid JSON: " + spec);
    return binding_from_json(j);
  }
  throw IoError("cannot interpret oracle spec: " + spec +
                " (expected toy, toy:<vocab>, cmd:<template>, an http:// URL, or a JSON file)");
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IoError("config is not valid JSON: " + path.string());
  if (!j.is_object()) throw IoError("config must be a JSON object: " + path.string());

  static const std::set<std::string> known = {
      "mode",        "algorithm",       "target_text",          "target_corpus",
      "population_size", "survivor_count", "max_iters",          "elite_count",
      "init_noise_amplitude", "mutation", "selection",           "mfcc",
      "seed",        "parallelism",     "oracle"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw IoError("config: unknown key \"" + key + "\"");

  HarnessConfig cfg;
  AttackConfig& a = cfg.attack;

  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "untargeted")
      a.mode = AttackMode::untargeted;
    else if (mode == "targeted")
      a.mode = AttackMode::targeted;
    else
      throw IoError("config: mode must be \"untargeted\" or \"targeted\"");
  }
  if (j.contains("algorithm")) {
    const std::string alg = j["algorithm"].get<std::string>();
    if (alg == "moga")
      a.algorithm = Algorithm::moga;
    else if (alg == "nsga2")
      a.algorithm = Algorithm::nsga2;
    else
      throw IoError("config: algorithm must be \"moga\" or \"nsga2\"");
  }
  if (j.contains("target_text")) a.target_text = normalize(j["target_text"].get<std::string>());
  if (j.contains("target_corpus")) cfg.target_corpus = j["target_corpus"].get<std::string>();

  a.population_size =
      static_cast<std::size_t>(require_number(j, "population_size", static_cast<double>(a.population_size)));
  a.survivor_count =
      static_cast<std::size_t>(require_number(j, "survivor_count", static_cast<double>(a.survivor_count)));
  a.max_iters = static_cast<std::size_t>(require_number(j, "max_iters", static_cast<double>(a.max_iters)));
  a.selection.elite_count =
      static_cast<int>(require_number(j, "elite_count", a.selection.elite_count));
  a.init_noise_amplitude = require_number(j, "init_noise_amplitude", a.init_noise_amplitude);
  a.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : a.seed;
  a.parallelism = static_cast<int>(require_number(j, "parallelism", a.parallelism));

  if (j.contains("mutation")) {
    const json& m = j["mutation"];
    a.mutation.prob_m = require_number(m, "prob_m", a.mutation.prob_m);
    a.mutation.sigma = require_number(m, "sigma", a.mutation.sigma);
  }
  if (j.contains("selection")) {
    const json& s = j["selection"];
    if (s.contains("scheme_mix")) {
      const auto mix = s["scheme_mix"].get<std::vector<double>>();
      if (mix.size() != 3) throw IoError("config: scheme_mix needs 3 entries");
      std::copy(mix.begin(), mix.end(), a.selection.scheme_mix.begin());
    }
    a.selection.tournament_size =
        static_cast<int>(require_number(s, "tournament_size", a.selection.tournament_size));
  }
  if (j.contains("mfcc")) {
    const json& m = j["mfcc"];
    a.mfcc.sample_rate = static_cast<int>(require_number(m, "sample_rate", a.mfcc.sample_rate));
    a.mfcc.window_ms = require_number(m, "window_ms", a.mfcc.window_ms);
    a.mfcc.hop_ms = require_number(m, "hop_ms", a.mfcc.hop_ms);
    a.mfcc.num_filters = static_cast<int>(require_number(m, "num_filters", a.mfcc.num_filters));
    a.mfcc.num_coefficients =
        static_cast<int>(require_number(m, "num_coefficients", a.mfcc.num_coefficients));
    a.mfcc.fft_size = static_cast<int>(require_number(m, "fft_size", a.mfcc.fft_size));
    a.mfcc.preemphasis = require_number(m, "preemphasis", a.mfcc.preemphasis);
  }
  if (j.contains("oracle")) cfg.binding = binding_from_json(j["oracle"]);

  cfg.validate();
  return cfg;
}

Transcript generate_target(const TargetTextSpec& spec, Rng& rng) {
  std::ifstream in(spec.corpus_path);
  if (!in) throw IoError("cannot open target corpus: " + spec.corpus_path.string());

  std::map<std::size_t, std::vector<Transcript>> by_length;
  std::string line;
  while (std::getline(in, line)) {
    Transcript phrase = normalize(line);
    if (!phrase.empty()) by_length[phrase.size()].push_back(std::move(phrase));
  }

  const std::size_t lo = 2;
  const std::size_t hi = spec.reference_length + 1;
  std::vector<std::size_t> eligible;
  for (const auto& [length, phrases] : by_length)
    if (length >= lo && length <= hi) eligible.push_back(length);
  if (eligible.empty())
    throw IoError("target corpus " + spec.corpus_path.string() +
                  " has no phrase with word length in [2, " + std::to_string(hi) + "]");

  const std::size_t length = eligible[rng.index(eligible.size())];
  const auto& phrases = by_length[length];
  return phrases[rng.index(phrases.size())];
}

json generation_record_json(const GenerationRecord& record) {
  json members = json::array();
  for (const MemberRecord& m : record.members)
    members.push_back({{"objectives", m.objectives}, {"rank0", m.rank0}});
  return json{{"generation", record.generation},
              {"oracle_calls", record.oracle_calls},
              {"best", {{"objectives", record.best_objectives},
                        {"transcript", record.best_transcript}}},
              {"members", std::move(members)}};
}

json summary_json(const AttackResult& result) {
  return json{{"summary",
               {{"generations", result.generations},
                {"converged", result.converged},
                {"oracle_calls", result.oracle_calls},
                {"original_transcript", join(result.original_transcript)},
                {"best", {{"objectives", *result.best.objectives},
                          {"transcript", join(*result.best.transcript)}}}}}};
}

std::size_t RunManifest::failure_count() const {
  std::size_t n = 0;
  for (const auto& row : samples)
    if (row.error) ++n;
  return n;
}

std::optional<double> RunManifest::paper_style_wer() const {
  std::vector<double> values;
  for (const auto& row : samples)
    if (!row.error) values.push_back(static_cast<double>(row.edit_distance_to_original));
  return mean_of(values);
}

std::optional<double> RunManifest::normalized_wer() const {
  std::vector<double> values;
  for (const auto& row : samples) {
    if (row.error) continue;
    const std::size_t ref_len = normalize(row.original_transcript).size();
    if (ref_len > 0)
      values.push_back(static_cast<double>(row.edit_distance_to_original) /
                       static_cast<double>(ref_len));
  }
  return mean_of(values);
}

std::optional<double> RunManifest::mean_cc() const {
  std::vector<double> values;
  for (const auto& row : samples)
    if (!row.error && row.cc) values.push_back(*row.cc);
  return mean_of(values);
}

std::optional<double> RunManifest::mean_target_distance() const {
  std::vector<double> values;
  for (const auto& row : samples)
    if (!row.error && row.edit_distance_to_target)
      values.push_back(static_cast<double>(*row.edit_distance_to_target));
  return mean_of(values);
}

json RunManifest::to_json() const {
  json rows = json::array();
  for (const SampleResult& row : samples) {
    json r{{"input", row.input},
           {"output_wav", row.output_wav},
           {"history", row.history},
           {"original_transcript", row.original_transcript},
           {"mode", row.mode},
           {"target", optional_str(row.target)},
           {"objectives", row.final_objectives},
           {"edit_distance_to_original", row.edit_distance_to_original},
           {"edit_distance_to_target",
            row.edit_distance_to_target ? json(*row.edit_distance_to_target) : json(nullptr)},
           {"cc", row.cc ? json(*row.cc) : json(nullptr)},
           {"generations", row.generations},
           {"converged", row.converged},
           {"oracle_calls", row.oracle_calls},
           {"seed", row.seed},
           {"error", optional_str(row.error)}};
    rows.push_back(std::move(r));
  }
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  return json{{"samples", std::move(rows)},
              {"aggregates",
               {{"sample_count", samples.size()},
                {"failures", failure_count()},
                {"paper_style_wer", opt(paper_style_wer())},
                {"normalized_wer", opt(normalized_wer())},
                {"mean_cc", opt(mean_cc())},
                {"mean_target_distance", opt(mean_target_distance())}}}};
}

RunManifest RunManifest::from_json(const json& j) {
  if (!j.is_object() || !j.contains("samples") || !j["samples"].is_array())
    throw IoError("manifest: expected an object with a \"samples\" array");
  RunManifest manifest;
  for (const json& r : j["samples"]) {
    SampleResult row;
    row.input = r.value("input", "");
    row.output_wav = r.value("output_wav", "");
    row.history = r.value("history", "");
    row.original_transcript = r.value("original_transcript", "");
    row.mode = r.value("mode", "untargeted");
    if (r.contains("target") && r["target"].is_string())
      row.target = r["target"].get<std::string>();
    if (r.contains("objectives") && r["objectives"].is_array())
      row.final_objectives = r["objectives"].get<ObjectiveVector>();
    row.edit_distance_to_original = r.value("edit_distance_to_original", std::size_t{0});
    if (r.contains("edit_distance_to_target") && r["edit_distance_to_target"].is_number())
      row.edit_distance_to_target = r["edit_distance_to_target"].get<std::size_t>();
    if (r.contains("cc") && r["cc"].is_number()) row.cc = r["cc"].get<double>();
    row.generations = r.value("generations", std::size_t{0});
    row.converged = r.value("converged", false);
    row.oracle_calls = r.value("oracle_calls", std::size_t{0});
    row.seed = r.value("seed", std::uint64_t{0});
    if (r.contains("error") && r["error"].is_string())
      row.error = r["error"].get<std::string>();
    manifest.samples.push_back(std::move(row));
  }
  return manifest;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IoError("manifest is not valid JSON: " + path.string());
  return from_json(j);
}

RunManifest attack_command(const HarnessConfig& cfg, const std::filesystem::path& input,
                           const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  const std::vector<std::filesystem::path> wavs = collect_wavs(input);
  RunManifest manifest;
  if (wavs.empty()) {
    std::cerr << "warning: no .wav inputs under " << input << "\n";
  }

  Rng master(cfg.attack.seed);
  for (std::size_t index = 0; index < wavs.size(); ++index) {
    const std::filesystem::path& wav = wavs[index];
    const Rng sample_rng = master.split(index);

    SampleResult row;
    row.input = wav.string();
    row.mode = cfg.attack.mode == AttackMode::targeted ? "targeted" : "untargeted";
    row.seed = sample_rng.seed();

    try {
      AudioClip original = load_wav(wav);
      if (original.sample_rate != cfg.attack.mfcc.sample_rate)
        throw Error(wav.string() + ": sample rate " + std::to_string(original.sample_rate) +
                    " does not match the configured " +
                    std::to_string(cfg.attack.mfcc.sample_rate) +
                    " (inputs are rejected, not resampled)");

      AttackConfig run_cfg = cfg.attack;
      run_cfg.seed = sample_rng.seed();
      if (run_cfg.mode == AttackMode::targeted && run_cfg.target_text.empty()) {
        const Transcript reference = transcribe(original, cfg.binding);
        Rng target_rng = sample_rng.split(kStreamTarget);
        run_cfg.target_text =
            generate_target({cfg.target_corpus, reference.size()}, target_rng);
      }
      if (run_cfg.mode == AttackMode::targeted) row.target = join(run_cfg.target_text);

      const std::string stem = wav.stem().string();
      const std::filesystem::path history_path = out_dir / (stem + "_history.jsonl");
      const std::filesystem::path adv_path = out_dir / (stem + "_adv.wav");
      std::ofstream history(history_path, std::ios::trunc);
      if (!history) throw IoError("cannot open history for writing: " + history_path.string());

      AttackResult result =
          run_attack(original, run_cfg, cfg.binding, [&](const GenerationRecord& record) {
            history << generation_record_json(record).dump() << "\n";
            history.flush();
          });
      history << summary_json(result).dump() << "\n";
      history.close();

      AudioClip adversarial{result.best.genome, original.sample_rate};
      save_wav(adversarial, adv_path);

      row.output_wav = adv_path.string();
      row.history = history_path.string();
      row.original_transcript = join(result.original_transcript);
      row.final_objectives = *result.best.objectives;
      row.edit_distance_to_original =
          word_edit_distance(result.original_transcript, *result.best.transcript);
      if (run_cfg.mode == AttackMode::targeted)
        row.edit_distance_to_target =
            word_edit_distance(run_cfg.target_text, *result.best.transcript);
      row.cc = correlation_coefficient(original, adversarial);
      row.generations = result.generations;
      row.converged = result.converged;
      row.oracle_calls = result.oracle_calls;
    } catch (const std::exception& e) {
      row.error = e.what();
      std::cerr << "sample " << wav << " failed: " << e.what() << "\n";
    }
    manifest.samples.push_back(std::move(row));
  }

  std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest under " + out_dir.string());
  out << manifest.to_json().dump(2) << "\n";
  return manifest;
}

std::size_t EvaluationReport::failure_count() const {
  std::size_t n = 0;
  for (const auto& pair : pairs)
    if (pair.error) ++n;
  return n;
}

std::optional<double> EvaluationReport::paper_style_wer() const {
  std::vector<double> values;
  for (const auto& pair : pairs)
    if (!pair.error) values.push_back(static_cast<double>(pair.edit_distance));
  return mean_of(values);
}

std::optional<double> EvaluationReport::normalized_wer() const {
  std::vector<double> values;
  for (const auto& pair : pairs)
    if (!pair.error && pair.normalized_wer) values.push_back(*pair.normalized_wer);
  return mean_of(values);
}

std::optional<double> EvaluationReport::mean_cc() const {
  std::vector<double> values;
  for (const auto& pair : pairs)
    if (!pair.error && pair.cc) values.push_back(*pair.cc);
  return mean_of(values);
}

json EvaluationReport::to_json() const {
  json rows = json::array();
  for (const PairReport& pair : pairs) {
    rows.push_back({{"input", pair.input},
                    {"adversarial", pair.adversarial},
                    {"reference", pair.reference},
                    {"transcript", pair.transcript},
                    {"edit_distance", pair.edit_distance},
                    {"normalized_wer",
                     pair.normalized_wer ? json(*pair.normalized_wer) : json(nullptr)},
                    {"cc", pair.cc ? json(*pair.cc) : json(nullptr)},
                    {"error", optional_str(pair.error)}});
  }
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  return json{{"pairs", std::move(rows)},
              {"aggregates",
               {{"pair_count", pairs.size()},
                {"failures", failure_count()},
                {"paper_style_wer", opt(paper_style_wer())},
                {"normalized_wer", opt(normalized_wer())},
                {"mean_cc", opt(mean_cc())}}}};
}

EvaluationReport evaluate_command(const RunManifest& manifest, const TranscriberBinding& binding,
                                  bool use_originals) {
  binding.validate();
  EvaluationReport report;
  for (const SampleResult& row : manifest.samples) {
    PairReport pair;
    pair.input = row.input;
    pair.adversarial = row.output_wav;
    pair.reference = row.original_transcript;
    try {
      if (row.error) throw Error("skipped: sample failed during attack (" + *row.error + ")");
      const Transcript reference = normalize(row.original_transcript);
      const AudioClip original = load_wav(row.input);
      const AudioClip adversarial = load_wav(row.output_wav);

      const AudioClip& scored = use_originals ? original : adversarial;
      const Transcript transcript = transcribe(scored, binding);
      pair.transcript = join(transcript);
      pair.edit_distance = word_edit_distance(reference, transcript);
      if (!reference.empty())
        pair.normalized_wer = static_cast<double>(pair.edit_distance) /
                              static_cast<double>(reference.size());
      if (original.samples.size() == adversarial.samples.size())
        pair.cc = correlation_coefficient(original, adversarial);
      else
        std::cerr << "length mismatch, CC skipped for " << row.input << "\n";
    } catch (const std::exception& e) {
      pair.error = e.what();
    }
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

EvaluationReport transfer_command(const RunManifest& manifest,
                                  const TranscriberBinding& binding) {
  return evaluate_command(manifest, binding, /*use_originals=*/false);
}

}  // namespace advaudio
