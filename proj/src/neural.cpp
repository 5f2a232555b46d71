#include "seedex/neural.hpp"

#include "seedex/error.hpp"
#include "seedex/rng.hpp"
#include "seedex/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seedex::models {

using corpus::AnnotatedDocument;
using corpus::Label;

NeuralParams NeuralParams::zeros(std::size_t buckets, std::size_t dim, std::size_t hidden) {
  NeuralParams p;
  p.buckets = buckets;
  p.dim = dim;
  p.hidden = hidden;
  p.embedding.assign(buckets * dim, 0.0);
  p.attention.assign(dim, 0.0);
  p.w_hidden.assign(hidden * dim, 0.0);
  p.b_hidden.assign(hidden, 0.0);
  p.w_out.assign(2 * hidden, 0.0);
  p.b_out.assign(2, 0.0);
  return p;
}

std::vector<std::span<double>> NeuralParams::blocks() {
  return {embedding, attention, w_hidden, b_hidden, w_out, b_out};
}

std::vector<std::span<const double>> NeuralParams::blocks() const {
  return {embedding, attention, w_hidden, b_hidden, w_out, b_out};
}

bool NeuralParams::all_finite() const {
  for (auto block : blocks()) {
    for (double v : block) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t bucket_of(const std::string& lower, std::size_t buckets) {
  return static_cast<std::size_t>(text::fnv1a64(lower) % buckets);
}

std::vector<std::size_t> encode(const AnnotatedDocument& doc, std::size_t buckets) {
  std::vector<std::size_t> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) ids.push_back(bucket_of(t.lower, buckets));
  return ids;
}

ForwardPass forward(const NeuralParams& p, const TrainConfig& config,
                    std::span<const std::size_t> ids, const DropoutMasks* masks) {
  if (ids.empty()) throw DataError("cannot run the network on an empty token sequence");
  const std::size_t n = ids.size(), d = p.dim, h = p.hidden;
  ForwardPass f;
  f.ids.assign(ids.begin(), ids.end());
  auto row = [&](std::size_t id) { return &p.embedding[id * d]; };

  f.weights.assign(n, 1.0 / static_cast<double>(n));
  if (config.pooling == Pooling::attention) {
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* e = row(ids[i]);
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) s += e[k] * p.attention[k];
      scores[i] = s;
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += (f.weights[i] = std::exp(scores[i] - top));
    for (auto& w : f.weights) w /= z;
  }

  f.pooled.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* e = row(ids[i]);
    for (std::size_t k = 0; k < d; ++k) f.pooled[k] += f.weights[i] * e[k];
  }
  f.pooled_in = f.pooled;
  if (masks) {
    for (std::size_t k = 0; k < d; ++k) f.pooled_in[k] *= masks->pooled[k];
  }

  f.pre_hidden.assign(h, 0.0);
  f.hidden.assign(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    double z = p.b_hidden[j];
    for (std::size_t k = 0; k < d; ++k) z += p.w_hidden[j * d + k] * f.pooled_in[k];
    f.pre_hidden[j] = z;
    f.hidden[j] = config.activation == Activation::tanh ? std::tanh(z) : z;
  }
  f.hidden_in = f.hidden;
  if (masks) {
    for (std::size_t j = 0; j < h; ++j) f.hidden_in[j] *= masks->hidden[j];
  }

  f.logits.assign(2, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    double z = p.b_out[c];
    for (std::size_t j = 0; j < h; ++j) z += p.w_out[c * h + j] * f.hidden_in[j];
    f.logits[c] = z;
  }
  return f;
}

double example_loss(const NeuralParams& p, const TrainConfig& config,
                    std::span<const std::size_t> ids, Label label, const DropoutMasks* masks,
                    NeuralParams* grad) {
  const ForwardPass f = forward(p, config, ids, masks);
  const std::size_t target = label == Label::opinion ? 1 : 0;
  const double top = std::max(f.logits[0], f.logits[1]);
  const double lse = top + std::log(std::exp(f.logits[0] - top) + std::exp(f.logits[1] - top));
  const double loss = lse - f.logits[target];
  if (!grad) return loss;

  const std::size_t n = ids.size(), d = p.dim, h = p.hidden;
  double d_logits[2];
  for (std::size_t c = 0; c < 2; ++c) {
    d_logits[c] = std::exp(f.logits[c] - lse) - (c == target ? 1.0 : 0.0);
  }

  std::vector<double> d_pre(h, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    grad->b_out[c] += d_logits[c];
    for (std::size_t j = 0; j < h; ++j) grad->w_out[c * h + j] += d_logits[c] * f.hidden_in[j];
  }
  for (std::size_t j = 0; j < h; ++j) {
    double g = 0;
    for (std::size_t c = 0; c < 2; ++c) g += p.w_out[c * h + j] * d_logits[c];
    if (masks) g *= masks->hidden[j];
    if (config.activation == Activation::tanh) g *= 1.0 - f.hidden[j] * f.hidden[j];
    d_pre[j] = g;
  }

  std::vector<double> d_pooled(d, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    grad->b_hidden[j] += d_pre[j];
    for (std::size_t k = 0; k < d; ++k) {
      grad->w_hidden[j * d + k] += d_pre[j] * f.pooled_in[k];
      d_pooled[k] += p.w_hidden[j * d + k] * d_pre[j];
    }
  }
  if (masks) {
    for (std::size_t k = 0; k < d; ++k) d_pooled[k] *= masks->pooled[k];
  }

  if (config.pooling == Pooling::mean) {
    for (std::size_t i = 0; i < n; ++i) {
      double* g = &grad->embedding[ids[i] * d];
      for (std::size_t k = 0; k < d; ++k) g[k] += f.weights[i] * d_pooled[k];
    }
    return loss;
  }

  // Attention pooling: pooled = sum_i a_i e_i, a = softmax(e_i . q).
  std::vector<double> d_weight(n, 0.0);
  double mean_d_weight = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* e = &p.embedding[ids[i] * d];
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += d_pooled[k] * e[k];
    d_weight[i] = s;
    mean_d_weight += f.weights[i] * s;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d_score = f.weights[i] * (d_weight[i] - mean_d_weight);
    const double* e = &p.embedding[ids[i] * d];
    double* g = &grad->embedding[ids[i] * d];
    for (std::size_t k = 0; k < d; ++k) {
      g[k] += f.weights[i] * d_pooled[k] + d_score * p.attention[k];
      grad->attention[k] += d_score * e[k];
    }
  }
  return loss;
}

NeuralParams initial_params(const TrainConfig& config, std::uint64_t seed) {
  NeuralParams p = NeuralParams::zeros(config.buckets, config.embedding_dim, config.hidden_dim);
  RandomStream pretrain(config.pretrain_seed, "pretrain/embedding");
  for (auto& v : p.embedding) v = config.embedding_init_scale * pretrain.normal();
  RandomStream query(config.pretrain_seed, "pretrain/attention");
  const double q_scale = 1.0 / std::sqrt(static_cast<double>(p.dim));
  for (auto& v : p.attention) v = q_scale * query.normal();

  RandomStream init(seed, "init");
  const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(p.dim));
  for (auto& v : p.w_hidden) v = hidden_scale * init.normal();
  const double out_scale = 1.0 / std::sqrt(static_cast<double>(p.hidden));
  for (auto& v : p.w_out) v = out_scale * init.normal();
  return p;
}

NeuralModel train_neural(std::span<const AnnotatedDocument> train, std::uint64_t seed,
                         const TrainConfig& config) {
  validate(config);
  if (train.empty()) throw DataError("training split is empty");

  NeuralModel model;
  model.seed = seed;
  model.config = config;
  model.config_digest = config_digest(config);
  model.params = initial_params(config, seed);
  NeuralParams& p = model.params;

  std::vector<std::vector<std::size_t>> encoded;
  encoded.reserve(train.size());
  for (const auto& doc : train) {
    if (doc.tokens.empty()) throw DataError("training document '" + doc.id + "' is empty");
    encoded.push_back(encode(doc, config.buckets));
  }

  RandomStream order_rng(seed, "order");
  RandomStream dropout_rng(seed, "dropout");
  const double keep_scale = 1.0 / (1.0 - config.dropout);
  auto draw_mask = [&](std::vector<double>& mask, std::size_t size) {
    mask.resize(size);
    for (auto& m : mask) m = dropout_rng.bernoulli(config.dropout) ? 0.0 : keep_scale;
  };

  NeuralParams grad = NeuralParams::zeros(p.buckets, p.dim, p.hidden);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> touched;
  std::vector<char> is_touched(p.buckets, 0);
  DropoutMasks masks;

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++step) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      double batch_loss = 0;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t ex = order[b];
        draw_mask(masks.pooled, p.dim);
        draw_mask(masks.hidden, p.hidden);
        batch_loss += example_loss(p, config, encoded[ex], train[ex].label, &masks, &grad);
        for (std::size_t id : encoded[ex]) {
          if (!is_touched[id]) {
            is_touched[id] = 1;
            touched.push_back(id);
          }
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(step) + " (seed " + std::to_string(seed) + ")");
      }

      const double rate = config.learning_rate / static_cast<double>(stop - start);
      for (std::size_t id : touched) {
        for (std::size_t k = 0; k < p.dim; ++k) {
          p.embedding[id * p.dim + k] -= rate * grad.embedding[id * p.dim + k];
          grad.embedding[id * p.dim + k] = 0.0;
        }
        is_touched[id] = 0;
      }
      touched.clear();
      auto dense = [&](std::vector<double>& param, std::vector<double>& g) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          param[i] -= rate * g[i];
          g[i] = 0.0;
        }
      };
      if (config.pooling == Pooling::attention) {
        dense(p.attention, grad.attention);
      }
      dense(p.w_hidden, grad.w_hidden);
      dense(p.b_hidden, grad.b_hidden);
      dense(p.w_out, grad.w_out);
      dense(p.b_out, grad.b_out);
    }
  }
  if (!p.all_finite()) {
    throw NumericError("training produced non-finite parameters (seed " + std::to_string(seed) +
                       ")");
  }
  return model;
}

Prediction predict(const NeuralModel& model, const AnnotatedDocument& doc) {
  if (model.params.buckets != model.config.buckets ||
      model.params.dim != model.config.embedding_dim) {
    throw ContractError("model parameters do not match its vocabulary configuration");
  }
  const ForwardPass f = forward(model.params, model.config, encode(doc, model.config.buckets));
  Prediction out;
  out.news_score = f.logits[0];
  out.opinion_score = f.logits[1];
  out.label = decide(out.news_score, out.opinion_score);
  return out;
}

double accuracy(const NeuralModel& model, std::span<const AnnotatedDocument> docs) {
  std::vector<Label> predicted, gold;
  for (const auto& d : docs) {
    predicted.push_back(predict(model, d).label);
    gold.push_back(d.label);
  }
  return accuracy(predicted, gold);
}

}  // namespace seedex::models
