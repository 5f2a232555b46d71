#include "seedex/error.hpp"
#include "seedex/pipeline.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace seedex;
using namespace seedex::pipeline;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig c;
  c.synth.docs_per_class = 80;
  c.synth.planted = {{"navrant", "ADJ", 0.8, 0.05}, {"communiqué", "NOUN", 0.05, 0.8}};
  c.lexicon_dir = fixtures::source_dir() / "data" / "lexicons";
  c.output_dir = out;
  c.seed = 3;
  c.ensemble_seeds = "1..6";
  c.workers = 2;
  c.k_values = {5, 3};
  c.max_documents = 2;
  c.resamples = 200;
  c.min_count = 3;
  c.top_k = 50;
  c.min_models = 2;
  c.equivalent_models = 4;
  c.per_class = 20;
  return c;
}

}  // namespace

TEST(Pipeline, RunsAndWritesManifest) {
  const auto out = fixtures::scratch_dir("pipeline-a");
  const auto result = run_pipeline(small_config(out));
  EXPECT_GE(result.artifacts.size(), 6u);
  EXPECT_TRUE(fs::exists(result.manifest));
  EXPECT_FALSE(fs::exists(out / ".partial"));
  for (const auto& a : result.artifacts) {
    EXPECT_TRUE(fs::exists(out / a.path)) << a.path;
    EXPECT_EQ(a.sha256.size(), 64u);
  }
  const auto manifest = io::read_json(result.manifest);
  EXPECT_EQ(manifest["artifacts"].size(), result.artifacts.size());
}

TEST(Pipeline, IdenticalRunsGiveIdenticalManifests) {
  const auto a = fixtures::scratch_dir("pipeline-b1");
  const auto b = fixtures::scratch_dir("pipeline-b2");
  run_pipeline(small_config(a));
  run_pipeline(small_config(b));
  EXPECT_EQ(io::read_file(a / "manifest.json"), io::read_file(b / "manifest.json"));
}

TEST(Pipeline, MissingLexiconDirectoryFailsBeforeTraining) {
  const auto out = fixtures::scratch_dir("pipeline-c");
  auto c = small_config(out / "run");
  c.lexicon_dir = out / "no-such-dir";
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(run_pipeline(c), ConfigError);
  EXPECT_FALSE(fs::exists(out / "run"));
}

TEST(Pipeline, IncompleteLexiconDirectoryIsConfigError) {
  const auto dir = fixtures::scratch_dir("pipeline-d");
  io::write_file(dir / "lexicons" / "nrc.tsv", "colère\n");
  auto c = small_config(dir / "run");
  c.lexicon_dir = dir / "lexicons";
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Pipeline, ValidationRejectsBadCounts) {
  auto c = small_config("unused");
  c.k_values = {7};
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config("unused");
  c.resamples = 50;
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config("unused");
  c.min_models = 5;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(PipelineConfig, JsonRoundTripAndUnknownKeys) {
  const auto c = small_config("out");
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  auto bad = j;
  bad["colour"] = "blue";
  EXPECT_THROW(config_from_json(bad), ConfigError);
}

TEST(PipelineConfig, RelativePathsResolveAgainstConfigDirectory) {
  const auto dir = fixtures::scratch_dir("pipeline-e");
  io::write_json(dir / "conf.json", {{"lexicon_dir", "lex"}, {"output_dir", "out"}, {"seed", 9}});
  const auto c = load_pipeline_config(dir / "conf.json");
  EXPECT_EQ(c.lexicon_dir, dir / "lex");
  EXPECT_EQ(c.output_dir, dir / "out");
  EXPECT_EQ(c.seed, 9u);
}

TEST(PipelineConfig, SeedEnvironmentOverride) {
  PipelineConfig c;
  c.seed = 1;
  ::setenv(kSeedEnv, "42", 1);
  apply_seed_override(c);
  EXPECT_EQ(c.seed, 42u);
  ::setenv(kSeedEnv, "nope", 1);
  EXPECT_THROW(apply_seed_override(c), ConfigError);
  ::unsetenv(kSeedEnv);
  apply_seed_override(c);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Lexicons, BundledDirectoryCoversEnrichedRegistry) {
  const auto lex = load_lexicons(fixtures::source_dir() / "data" / "lexicons");
  EXPECT_NO_THROW(lingfeat::check_lexicons(lingfeat::enriched_registry(), lex));
  EXPECT_EQ(lex.at("concreteness").kind, lingfeat::LexiconKind::scalar);
  EXPECT_EQ(lex.at("nrc").kind, lingfeat::LexiconKind::membership);
}
