#pragma once

#include "seedex/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace seedex::models {

enum class Pooling { mean, attention };
enum class Activation { tanh, identity };

// Hyperparameters for both model families. The logistic regression reads
// l2/max_iter/tolerance/fit_intercept; the surrogate network reads the rest.
//
// Surrogate defaults (lr 0.3, batch 8, 8 epochs, unit-scale embeddings) were
// tuned on the synthetic corpus; a fine-tuned transformer would instead use
// lr 2e-5, batch 4, 2 epochs.
struct TrainConfig {
  double learning_rate = 0.3;
  std::size_t batch_size = 8;
  std::size_t epochs = 8;
  double dropout = 0.1;

  std::size_t embedding_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t buckets = 4096;
  Pooling pooling = Pooling::mean;
  Activation activation = Activation::tanh;
  double embedding_init_scale = 1.0;
  // The embedding table plays the role of a pretrained encoder: it is drawn
  // from this fixed seed, identical across ensemble members.
  std::uint64_t pretrain_seed = 0;

  double l2 = 1e-2;
  std::size_t max_iter = 100;
  double tolerance = 1e-11;
  bool fit_intercept = true;
};

// Throws ConfigError on non-positive sizes/rates or dropout outside [0, 1).
void validate(const TrainConfig& config);

// Stable 64-bit digest (hex) of every field.
std::string config_digest(const TrainConfig& config);

struct Prediction {
  corpus::Label label = corpus::Label::news;
  double news_score = 0;
  double opinion_score = 0;
};

// Opinion iff its score is strictly greater; ties go to news.
corpus::Label decide(double news_score, double opinion_score);

// Fraction of matching labels. Throws DataError on empty input and
// ContractError on length mismatch.
double accuracy(std::span<const corpus::Label> predicted, std::span<const corpus::Label> gold);

}  // namespace seedex::models
