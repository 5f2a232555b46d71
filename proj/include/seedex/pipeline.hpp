#pragma once

#include "seedex/corpus.hpp"
#include "seedex/lingfeat.hpp"
#include "seedex/logreg.hpp"
#include "seedex/serialize.hpp"
#include "seedex/train_config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seedex::pipeline {

struct PipelineConfig {
  // Input corpus (JSONL). When empty, a synthetic corpus is generated from
  // `synth` with the master seed.
  std::filesystem::path corpus_path;
  corpus::SynthSpec synth;
  // Directory of `<lexicon name>.tsv` files; they override the built-in
  // closed-class lists of the same name.
  std::filesystem::path lexicon_dir;
  std::filesystem::path output_dir = "seedex-out";

  std::uint64_t seed = 13;
  corpus::SplitRatios ratios;

  std::string ensemble_seeds = "1..20";
  std::size_t workers = 1;

  models::TrainConfig logreg;
  models::HyperGrid logreg_grid{{"l2", {1e-3, 1e-2, 1e-1, 1.0}}};
  models::TrainConfig neural;

  std::vector<std::size_t> k_values{20, 15, 10};
  std::size_t max_documents = 4;
  std::size_t resamples = 10000;
  double level = 0.95;
  double minimality_threshold = 0.01;

  std::size_t min_count = 10;
  std::size_t top_k = 100;
  std::size_t min_models = 5;
  std::size_t per_class = 50;
  std::size_t equivalent_models = 10;
  // Adds wordlist features built from the stable class token lists to the
  // enriched registry.
  bool token_list_features = true;
};

// Relative paths in the file resolve against the file's directory. Unknown
// keys throw ConfigError.
PipelineConfig config_from_json(const io::Json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
io::Json to_json(const PipelineConfig& config);

// Environment variable that overrides the master seed of a loaded config.
inline constexpr const char* kSeedEnv = "SEEDEX_SEED";
void apply_seed_override(PipelineConfig& config);

io::Json synth_to_json(const corpus::SynthSpec& spec);
corpus::SynthSpec synth_from_json(const io::Json& j);

// Built-in lists plus every `*.tsv` file in `dir`; a lexicon is scalar when
// some catalog feature reads it as scalar.
lingfeat::LexiconSet load_lexicons(const std::filesystem::path& dir);

// Checks paths, counts and lexicon coverage. Throws ConfigError.
void validate(const PipelineConfig& config);

struct Artifact {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct PipelineResult {
  std::vector<Artifact> artifacts;  // sorted by path, manifest excluded
  std::filesystem::path manifest;
  io::Json summary;
};

// split -> feature model -> ensemble -> equivalence -> explain ->
// correlate/characterize -> maps -> enrichment -> minimality -> manifest.
// A failing stage leaves its partial outputs plus a `.partial` marker and
// throws StageError.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

}  // namespace seedex::pipeline
