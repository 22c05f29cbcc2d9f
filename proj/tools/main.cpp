#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "advaudio/attack.hpp"
#include "advaudio/error.hpp"
#include "advaudio/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

void write_report(const nlohmann::json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw advaudio::IoError("cannot write report: " + out_path);
  out << report.dump(2) << "\n";
}

int run_attack_cmd(const std::string& config_path, const std::string& input,
                   const std::string& out_dir) {
  advaudio::HarnessConfig cfg = advaudio::load_config(config_path);
  advaudio::RunManifest manifest = advaudio::attack_command(cfg, input, out_dir);
  std::cout << "attacked " << manifest.samples.size() << " sample(s), "
            << manifest.failure_count() << " failure(s); manifest at "
            << (std::filesystem::path(out_dir) / "manifest.json").string() << "\n";
  return manifest.failure_count() == 0 ? kExitOk : kExitPartial;
}

int run_evaluate_cmd(const std::string& manifest_path, const std::string& oracle_spec,
                     bool originals, const std::string& out_path, bool transfer) {
  advaudio::RunManifest manifest = advaudio::RunManifest::load(manifest_path);
  advaudio::TranscriberBinding binding = advaudio::parse_binding(oracle_spec);
  advaudio::EvaluationReport report =
      transfer ? advaudio::transfer_command(manifest, binding)
               : advaudio::evaluate_command(manifest, binding, originals);
  write_report(report.to_json(), out_path);
  return report.failure_count() == 0 ? kExitOk : kExitPartial;
}

int run_gen_target_cmd(const std::string& corpus, const std::string& reference,
                       std::uint64_t seed, const std::string& oracle_spec) {
  std::size_t n = 0;
  if (std::filesystem::exists(reference) &&
      std::filesystem::path(reference).extension() == ".wav") {
    advaudio::TranscriberBinding binding = advaudio::parse_binding(oracle_spec);
    n = advaudio::transcribe(advaudio::load_wav(reference), binding).size();
  } else {
    n = advaudio::normalize(reference).size();
  }
  advaudio::Rng rng(seed);
  advaudio::Transcript target = advaudio::generate_target({corpus, n}, rng);
  std::cout << advaudio::join(target) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box adversarial audio generation for ASR systems via "
               "multi-objective evolutionary search"};
  app.require_subcommand(1);

  std::string config_path, input, out_dir;
  auto* attack = app.add_subcommand("attack", "Run the evolutionary attack on WAV input(s)");
  attack->add_option("--config", config_path, "JSON run configuration")->required();
  attack->add_option("--input", input, "input WAV file or directory")->required();
  attack->add_option("--out", out_dir, "output directory")->required();

  std::string manifest_path, oracle_spec, report_path;
  bool originals = false;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score a manifest's adversarial samples against an oracle");
  evaluate->add_option("--manifest", manifest_path, "manifest.json from an attack run")
      ->required();
  evaluate->add_option("--oracle", oracle_spec,
                       "oracle binding: toy | toy:<vocab> | cmd:<template> | http URL | JSON file")
      ->required();
  evaluate->add_flag("--originals", originals,
                     "transcribe the original WAVs instead (baseline WER)");
  evaluate->add_option("--out", report_path, "write the JSON report here instead of stdout");

  std::string t_manifest, t_oracle, t_report;
  auto* transfer = app.add_subcommand(
      "transfer", "Re-score adversarial samples with a different oracle");
  transfer->add_option("--manifest", t_manifest, "manifest.json from an attack run")->required();
  transfer->add_option("--oracle", t_oracle, "the other system's binding")->required();
  transfer->add_option("--out", t_report, "write the JSON report here instead of stdout");

  std::string corpus, reference, gt_oracle = "toy";
  std::uint64_t seed = 0;
  auto* gen_target = app.add_subcommand("gen-target", "Draw a target phrase from a corpus");
  gen_target->add_option("--corpus", corpus, "text file, one candidate phrase per line")
      ->required();
  gen_target
      ->add_option("--reference", reference,
                   "reference sample: a WAV (transcribed) or the reference text itself")
      ->required();
  gen_target->add_option("--seed", seed, "random seed")->required();
  gen_target->add_option("--oracle", gt_oracle, "oracle for WAV references (default toy)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack) return run_attack_cmd(config_path, input, out_dir);
    if (*evaluate)
      return run_evaluate_cmd(manifest_path, oracle_spec, originals, report_path, false);
    if (*transfer) return run_evaluate_cmd(t_manifest, t_oracle, false, t_report, true);
    if (*gen_target) return run_gen_target_cmd(corpus, reference, seed, gt_oracle);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
