#include "seedex/logreg.hpp"

#include "seedex/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace seedex::models {

using corpus::Label;
using lingfeat::FeatureVector;

namespace {

double softplus(double x) {
  // log(1 + e^x) without overflow
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_training_data(std::span<const FeatureVector> features, std::span<const Label> labels) {
  if (features.size() != labels.size()) {
    throw ContractError("feature and label counts differ");
  }
  if (features.empty()) throw TrainingError("no training examples");
  bool pos = false, neg = false;
  for (Label l : labels) (l == Label::opinion ? pos : neg) = true;
  if (!pos || !neg) throw TrainingError("training data must contain both labels");
  const auto& version = features.front().registry_version;
  const std::size_t dims = features.front().values.size();
  for (const auto& f : features) {
    if (f.registry_version != version || f.values.size() != dims) {
      throw ContractError("feature vectors come from different registries");
    }
    for (double v : f.values) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value in training data");
    }
  }
}

Eigen::MatrixXd standardized_design(const LogRegModel& model,
                                    std::span<const FeatureVector> features) {
  const std::size_t p = model.feature_count();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(p + 1));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      z(i, j) = (features[i].values[j] - model.mean[j]) / model.scale[j];
    }
    z(i, p) = 1.0;
  }
  return z;
}

// Loss, gradient and Hessian over theta = [w; b].
double evaluate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                double l2, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const Eigen::Index n = z.rows();
  const Eigen::Index p = z.cols() - 1;
  const Eigen::VectorXd margin = (z * theta).cwiseProduct(y);
  double loss = 0;
  Eigen::VectorXd coef(n), curv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += softplus(-margin(i));
    const double s = sigmoid(-margin(i));
    coef(i) = -y(i) * s;
    curv(i) = s * (1.0 - s);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd w = theta.head(p);
  loss = loss * inv_n + 0.5 * l2 * w.squaredNorm();
  if (grad) {
    *grad = z.transpose() * coef * inv_n;
    grad->head(p) += l2 * w;
  }
  if (hess) {
    *hess = z.transpose() * curv.asDiagonal() * z * inv_n;
    for (Eigen::Index j = 0; j < p; ++j) (*hess)(j, j) += l2;
  }
  return loss;
}

Eigen::VectorXd label_vector(std::span<const Label> labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(i) = corpus::sign(labels[i]);
  return y;
}

}  // namespace

LabeledFeatures featurize(std::span<const corpus::AnnotatedDocument> docs,
                          const lingfeat::FeatureRegistry& registry,
                          const lingfeat::LexiconSet& lexicons) {
  LabeledFeatures out;
  for (const auto& d : docs) {
    out.features.push_back(lingfeat::extract_features(d, registry, lexicons));
    out.labels.push_back(d.label);
  }
  return out;
}

LogRegModel train_logreg(std::span<const FeatureVector> features, std::span<const Label> labels,
                         const TrainConfig& config) {
  validate(config);
  if (!(config.l2 > 0)) throw ConfigError("logistic regression needs l2 > 0");
  check_training_data(features, labels);

  const std::size_t n = features.size();
  const std::size_t p = features.front().values.size();
  LogRegModel model;
  model.registry_version = features.front().registry_version;
  model.config_digest = config_digest(config);
  model.mean.assign(p, 0.0);
  model.scale.assign(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    double m = 0;
    for (const auto& f : features) m += f.values[j];
    m /= static_cast<double>(n);
    double var = 0;
    for (const auto& f : features) var += (f.values[j] - m) * (f.values[j] - m);
    const double sd = std::sqrt(var / static_cast<double>(n));
    model.mean[j] = m;
    model.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  model.coefficients.assign(p, 0.0);

  const Eigen::MatrixXd z = standardized_design(model, features);
  const Eigen::VectorXd y = label_vector(labels);
  const auto dim = static_cast<Eigen::Index>(p + 1);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  std::size_t iter = 0;
  double loss = evaluate(z, y, theta, config.l2, &grad, &hess);
  for (; iter < config.max_iter; ++iter) {
    if (!config.fit_intercept) {
      grad(dim - 1) = 0;
      hess.row(dim - 1).setZero();
      hess.col(dim - 1).setZero();
      hess(dim - 1, dim - 1) = 1.0;
    }
    if (grad.norm() <= config.tolerance) break;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    const double slope = grad.dot(step);
    double t = 1.0;
    Eigen::VectorXd candidate = theta - step;
    double next = evaluate(z, y, candidate, config.l2, nullptr, nullptr);
    while (next > loss - 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      candidate = theta - t * step;
      next = evaluate(z, y, candidate, config.l2, nullptr, nullptr);
    }
    if (!(next <= loss)) break;  // no further decrease representable
    theta = candidate;
    loss = evaluate(z, y, theta, config.l2, &grad, &hess);
    if (!std::isfinite(loss)) throw NumericError("logistic regression diverged");
  }
  if (!config.fit_intercept) grad(dim - 1) = 0;

  for (std::size_t j = 0; j < p; ++j) model.coefficients[j] = theta(static_cast<Eigen::Index>(j));
  model.intercept = theta(dim - 1);
  model.iterations = iter;
  model.gradient_norm = grad.norm();
  return model;
}

double logreg_objective(const LogRegModel& model, std::span<const FeatureVector> features,
                        std::span<const Label> labels, double l2, std::vector<double>* gradient) {
  check_training_data(features, labels);
  const Eigen::MatrixXd z = standardized_design(model, features);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(model.feature_count() + 1));
  for (std::size_t j = 0; j < model.feature_count(); ++j) {
    theta(static_cast<Eigen::Index>(j)) = model.coefficients[j];
  }
  theta(theta.size() - 1) = model.intercept;
  Eigen::VectorXd g;
  const double loss = evaluate(z, label_vector(labels), theta, l2, gradient ? &g : nullptr, nullptr);
  if (gradient) gradient->assign(g.data(), g.data() + g.size());
  return loss;
}

double logreg_margin(const LogRegModel& model, const FeatureVector& x) {
  if (x.registry_version != model.registry_version || x.values.size() != model.feature_count()) {
    throw ContractError("feature vector registry " + x.registry_version +
                        " does not match model registry " + model.registry_version);
  }
  double m = model.intercept;
  for (std::size_t j = 0; j < model.feature_count(); ++j) {
    m += model.coefficients[j] * (x.values[j] - model.mean[j]) / model.scale[j];
  }
  return m;
}

Prediction predict(const LogRegModel& model, const FeatureVector& x) {
  const double p = sigmoid(logreg_margin(model, x));
  Prediction out;
  out.news_score = 1.0 - p;
  out.opinion_score = p;
  out.label = decide(out.news_score, out.opinion_score);
  return out;
}

double accuracy(const LogRegModel& model, const LabeledFeatures& data) {
  std::vector<Label> predicted;
  predicted.reserve(data.features.size());
  for (const auto& f : data.features) predicted.push_back(predict(model, f).label);
  return accuracy(predicted, data.labels);
}

GridSearchResult grid_search_logreg(const LabeledFeatures& train, const LabeledFeatures& validation,
                                    const TrainConfig& base, const HyperGrid& grid) {
  if (grid.empty()) throw ConfigError("empty hyperparameter grid");
  for (const auto& [key, values] : grid) {
    if (key != "l2" && key != "max_iter" && key != "fit_intercept") {
      throw ConfigError("unsupported grid key '" + key + "'");
    }
    if (values.empty()) throw ConfigError("grid key '" + key + "' has no candidates");
  }
  if (validation.features.empty()) throw DataError("validation split is empty");

  std::vector<TrainConfig> configs{base};
  for (const auto& [key, values] : grid) {
    std::vector<TrainConfig> expanded;
    for (const auto& cfg : configs) {
      for (double v : values) {
        TrainConfig c = cfg;
        if (key == "l2") {
          c.l2 = v;
        } else if (key == "max_iter") {
          if (v < 1 || v != std::floor(v)) throw ConfigError("max_iter must be a positive integer");
          c.max_iter = static_cast<std::size_t>(v);
        } else {
          c.fit_intercept = v != 0.0;
        }
        expanded.push_back(c);
      }
    }
    configs = std::move(expanded);
  }

  GridSearchResult result;
  std::size_t best = 0;
  std::vector<LogRegModel> models;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    LogRegModel m = train_logreg(train.features, train.labels, configs[k]);
    const double acc = accuracy(m, validation);
    result.candidates.push_back({configs[k], acc});
    models.push_back(std::move(m));
    const auto& incumbent = result.candidates[best];
    if (acc > incumbent.validation_accuracy ||
        (acc == incumbent.validation_accuracy && configs[k].l2 < incumbent.config.l2)) {
      best = k;
    }
  }
  result.model = std::move(models[best]);
  result.config = configs[best];
  return result;
}

}  // namespace seedex::models
