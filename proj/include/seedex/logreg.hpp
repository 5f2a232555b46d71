#pragma once

#include "seedex/lingfeat.hpp"
#include "seedex/train_config.hpp"

#include <map>
#include <string>
#include <vector>

namespace seedex::models {

// Binomial logistic regression on standardized features. Coefficients
// apply to (x - mean) / scale; features with zero variance keep scale 1.
struct LogRegModel {
  std::string registry_version;
  std::vector<double> coefficients;
  double intercept = 0;
  std::vector<double> mean;
  std::vector<double> scale;
  std::string config_digest;
  std::size_t iterations = 0;
  double gradient_norm = 0;  // of the regularized loss at the returned point

  std::size_t feature_count() const { return coefficients.size(); }
};

struct LabeledFeatures {
  std::vector<lingfeat::FeatureVector> features;
  std::vector<corpus::Label> labels;
};

LabeledFeatures featurize(std::span<const corpus::AnnotatedDocument> docs,
                          const lingfeat::FeatureRegistry& registry,
                          const lingfeat::LexiconSet& lexicons);

// Minimizes  (1/n) sum_i log(1 + exp(-y_i (w.z_i + b))) + (l2/2) |w|^2
// with damped Newton steps from w = 0, b = 0. The objective is strictly
// convex for l2 > 0, so the result does not depend on anything but the data
// and config.
LogRegModel train_logreg(std::span<const lingfeat::FeatureVector> features,
                         std::span<const corpus::Label> labels, const TrainConfig& config);

// Regularized loss and its gradient (coefficients first, intercept last) at
// the given parameters, on the model's own standardization.
double logreg_objective(const LogRegModel& model, std::span<const lingfeat::FeatureVector> features,
                        std::span<const corpus::Label> labels, double l2,
                        std::vector<double>* gradient = nullptr);

double logreg_margin(const LogRegModel& model, const lingfeat::FeatureVector& x);

// Scores are (news = 1 - p, opinion = p) with p = sigmoid(margin).
Prediction predict(const LogRegModel& model, const lingfeat::FeatureVector& x);

double accuracy(const LogRegModel& model, const LabeledFeatures& data);

// Supported grid keys: "l2", "max_iter", "fit_intercept" (0/1).
using HyperGrid = std::map<std::string, std::vector<double>>;

struct GridCandidate {
  TrainConfig config;
  double validation_accuracy = 0;
};

struct GridSearchResult {
  LogRegModel model;
  TrainConfig config;
  std::vector<GridCandidate> candidates;  // grid order
};

// Exhaustive search; the winner maximizes validation accuracy, ties going to
// the smaller l2 and then to the earlier grid position. Grid order is the
// Cartesian product over keys in lexicographic order, last key fastest.
GridSearchResult grid_search_logreg(const LabeledFeatures& train, const LabeledFeatures& validation,
                                    const TrainConfig& base, const HyperGrid& grid);

}  // namespace seedex::models
