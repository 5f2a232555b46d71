#pragma once

#include "seedex/train_config.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace seedex::models {

// Parameters of the surrogate classifier:
//
//   e_i    = embedding[bucket(token_i)]                    (dim)
//   pooled = mean_i e_i  |  sum_i softmax(e.q)_i e_i       (dim)
//   h      = act(w_hidden * pooled + b_hidden)             (hidden)
//   logits = w_out * h + b_out                             (2: news, opinion)
//
// Dropout (inverted) is applied to `pooled` and to `h` during training only.
struct NeuralParams {
  std::size_t buckets = 0;
  std::size_t dim = 0;
  std::size_t hidden = 0;
  std::vector<double> embedding;  // buckets x dim, row-major
  std::vector<double> attention;  // dim
  std::vector<double> w_hidden;   // hidden x dim
  std::vector<double> b_hidden;   // hidden
  std::vector<double> w_out;      // 2 x hidden
  std::vector<double> b_out;      // 2

  static NeuralParams zeros(std::size_t buckets, std::size_t dim, std::size_t hidden);

  // Every parameter block, in a fixed order.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  bool all_finite() const;
};

struct NeuralModel {
  std::uint64_t seed = 0;
  TrainConfig config;
  NeuralParams params;
  std::string config_digest;
};

// FNV-1a of the case-folded form, modulo `buckets`.
std::size_t bucket_of(const std::string& lower, std::size_t buckets);
std::vector<std::size_t> encode(const corpus::AnnotatedDocument& doc, std::size_t buckets);

// Multipliers (0 or 1/(1-rate)) for the two dropout sites.
struct DropoutMasks {
  std::vector<double> pooled;
  std::vector<double> hidden;
};

struct ForwardPass {
  std::vector<std::size_t> ids;
  std::vector<double> weights;  // pooling weight per token (1/N for mean pooling)
  std::vector<double> pooled;
  std::vector<double> pooled_in;  // after dropout
  std::vector<double> pre_hidden;
  std::vector<double> hidden;
  std::vector<double> hidden_in;  // after dropout
  std::vector<double> logits;
};

ForwardPass forward(const NeuralParams& params, const TrainConfig& config,
                    std::span<const std::size_t> ids, const DropoutMasks* masks = nullptr);

// Cross-entropy of softmax(logits) against `label`; adds d loss / d params
// into `grad` when non-null.
double example_loss(const NeuralParams& params, const TrainConfig& config,
                    std::span<const std::size_t> ids, corpus::Label label,
                    const DropoutMasks* masks, NeuralParams* grad);

// Parameters before any gradient step: the embedding table and attention
// query come from the pretrain seed, the dense head from the training seed's
// "init" stream.
NeuralParams initial_params(const TrainConfig& config, std::uint64_t seed);

// Mini-batch SGD. The seed feeds three independent streams ("init",
// "order", "dropout") and nothing else is random.
NeuralModel train_neural(std::span<const corpus::AnnotatedDocument> train, std::uint64_t seed,
                         const TrainConfig& config);

Prediction predict(const NeuralModel& model, const corpus::AnnotatedDocument& doc);
double accuracy(const NeuralModel& model, std::span<const corpus::AnnotatedDocument> docs);

}  // namespace seedex::models
