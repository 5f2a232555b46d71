#pragma once

#include "seedex/corpus.hpp"
#include "seedex/lingfeat.hpp"
#include "seedex/neural.hpp"
#include "seedex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace seedex::fixtures {

using Tagged = std::vector<std::pair<std::string, std::string>>;  // surface, pos

// Tokens laid out as if joined by single spaces.
inline corpus::AnnotatedDocument make_doc(std::string id, const Tagged& tokens,
                                          corpus::Label label = corpus::Label::news) {
  corpus::AnnotatedDocument doc;
  doc.id = std::move(id);
  doc.label = label;
  std::size_t offset = 0;
  for (const auto& [surface, pos] : tokens) {
    doc.tokens.push_back(corpus::make_token(surface, pos, offset, offset + surface.size()));
    offset += surface.size() + 1;
  }
  return doc;
}

inline corpus::AnnotatedDocument make_doc(std::string id, const std::vector<std::string>& words,
                                          corpus::Label label = corpus::Label::news) {
  Tagged t;
  for (const auto& w : words) t.emplace_back(w, "X");
  return make_doc(std::move(id), t, label);
}

inline corpus::AnnotatedDocument make_doc(std::string id, std::initializer_list<const char*> words,
                                          corpus::Label label = corpus::Label::news) {
  return make_doc(std::move(id), std::vector<std::string>(words.begin(), words.end()), label);
}

// Built-ins plus an empty lexicon for every other name the registry reads.
inline lingfeat::LexiconSet complete_lexicons(const lingfeat::FeatureRegistry& registry) {
  auto set = lingfeat::builtin_lexicons();
  for (const auto& f : registry.features()) {
    if (f.lexicon.empty() || set.count(f.lexicon)) continue;
    lingfeat::Lexicon lex;
    lex.name = f.lexicon;
    lex.kind = f.is_scalar() ? lingfeat::LexiconKind::scalar : lingfeat::LexiconKind::membership;
    set.emplace(f.lexicon, std::move(lex));
  }
  return set;
}

inline std::filesystem::path source_dir() { return SEEDEX_SOURCE_DIR; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("seedex-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Small network with every parameter drawn from N(0, scale^2).
inline models::NeuralParams random_params(RandomStream& rng, std::size_t buckets, std::size_t dim,
                                          std::size_t hidden, double scale = 0.7) {
  auto p = models::NeuralParams::zeros(buckets, dim, hidden);
  for (auto block : p.blocks()) {
    for (double& v : block) v = scale * rng.normal();
  }
  return p;
}

struct GradientCheck {
  double worst_relative_error = 0;
  std::size_t checked = 0;
};

// Compares example_loss gradients with central differences on one random
// instance: random pooling, activation, token ids, label and dropout masks.
// The relative error denominator is floored at 1e-6 because central
// differences with h = 1e-5 cannot resolve smaller gradients.
inline GradientCheck check_gradients(std::uint64_t seed) {
  RandomStream rng(seed, "gradcheck");
  models::TrainConfig config;
  config.pooling = rng.bernoulli(0.5) ? models::Pooling::attention : models::Pooling::mean;
  config.activation = rng.bernoulli(0.8) ? models::Activation::tanh : models::Activation::identity;
  config.buckets = 6;
  config.embedding_dim = 2 + rng.below(4);
  config.hidden_dim = 2 + rng.below(4);
  config.dropout = 0.25;
  auto params = random_params(rng, config.buckets, config.embedding_dim, config.hidden_dim);

  std::vector<std::size_t> ids(1 + rng.below(6));
  for (auto& id : ids) id = rng.below(config.buckets);
  const auto label = rng.bernoulli(0.5) ? corpus::Label::opinion : corpus::Label::news;

  models::DropoutMasks masks;
  const bool use_masks = rng.bernoulli(0.5);
  const double keep = 1.0 / (1.0 - config.dropout);
  for (std::size_t k = 0; k < config.embedding_dim; ++k) {
    masks.pooled.push_back(rng.bernoulli(config.dropout) ? 0.0 : keep);
  }
  for (std::size_t k = 0; k < config.hidden_dim; ++k) {
    masks.hidden.push_back(rng.bernoulli(config.dropout) ? 0.0 : keep);
  }
  const models::DropoutMasks* m = use_masks ? &masks : nullptr;

  auto grad = models::NeuralParams::zeros(config.buckets, config.embedding_dim, config.hidden_dim);
  models::example_loss(params, config, ids, label, m, &grad);

  GradientCheck result;
  const double h = 1e-5;
  auto blocks = params.blocks();
  const auto gblocks = std::as_const(grad).blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      const double saved = blocks[b][i];
      blocks[b][i] = saved + h;
      const double up = models::example_loss(params, config, ids, label, m, nullptr);
      blocks[b][i] = saved - h;
      const double down = models::example_loss(params, config, ids, label, m, nullptr);
      blocks[b][i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = gblocks[b][i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      result.worst_relative_error =
          std::max(result.worst_relative_error, std::abs(numeric - analytic) / denom);
      ++result.checked;
    }
  }
  return result;
}

}  // namespace seedex::fixtures
