#pragma once

#include "seedex/corpus.hpp"
#include "seedex/lingfeat.hpp"
#include "seedex/logreg.hpp"
#include "seedex/neural.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seedex::explain {

struct Explanation {
  std::string doc_id;
  std::string model_id;
  std::string method;  // "lam" | "lrp"
  corpus::Label predicted = corpus::Label::news;
  std::vector<std::string> tokens;  // surfaces, one per relevance
  std::vector<double> relevances;
  // LAM only: token x feature contributions, row-major; relevances[i] is the
  // row sum.
  std::vector<double> per_feature;
  std::size_t feature_count = 0;
  // LRP only: |output relevance - token relevance total| before normalization.
  double leakage = 0;
};

// Linguistic attention map. For each feature j whose coefficient has the
// sign of the prediction and whose incidence column is non-empty,
//   A_ij = (w_ij / sum_i w_ij) * T_j,
// otherwise A_ij = 0; A_i = sum_j A_ij.
Explanation lam_explain(const models::LogRegModel& model, const corpus::AnnotatedDocument& doc,
                        const lingfeat::IncidenceMatrix& incidence, corpus::Label predicted,
                        std::string model_id = "ling-lr");

// Relevance totals at each layer boundary before normalization.
struct LrpTrace {
  double output = 0;  // predicted-class logit, the initial relevance
  double hidden = 0;  // after the output dense layer
  double pooled = 0;  // after the hidden dense layer
  double tokens = 0;  // after pooling and the embedding sum
  std::vector<double> token_relevance;  // unnormalized, one per token
  corpus::Label predicted = corpus::Label::news;
};

inline constexpr double kLrpEpsilon = 1e-9;

// Epsilon-rule LRP through the surrogate network with dropout disabled.
// Dense layers use
//   R_k = sum_m a_k w_km / (z_m + eps * sign(z_m)) R_m,   z_m = sum_k a_k w_km,
// activations pass relevance through unchanged, pooling splits R_d over the
// tokens in proportion to weight_i * e_id, and a token's relevance is the
// sum over its embedding dimensions.
LrpTrace lrp_trace(const models::NeuralModel& model, const corpus::AnnotatedDocument& doc,
                   double epsilon = kLrpEpsilon);

// lrp_trace followed by normalization to a unit sum. When the unnormalized
// total is zero the relevances are returned as computed.
Explanation lrp_explain(const models::NeuralModel& model, const corpus::AnnotatedDocument& doc,
                        std::string model_id = {}, double epsilon = kLrpEpsilon);

// Upstream sub-word piece counts per token; spans are consecutive.
struct SubtokenSpanMap {
  std::vector<std::size_t> counts;

  static SubtokenSpanMap from_document(const corpus::AnnotatedDocument& doc);
  std::size_t total() const;
};

enum class SubtokenReduce { mean, sum };

// Collapses sub-word relevances to one value per token. Mean is the default
// reading of "average of the sum of their attention values"; sum is
// available for the other reading.
std::vector<double> aggregate_subtokens(std::span<const double> subtoken_relevances,
                                        const SubtokenSpanMap& spans,
                                        SubtokenReduce reduce = SubtokenReduce::mean);

// Count of tokens with relevance above `threshold`.
std::size_t minimality(const Explanation& e, double threshold = 0.01);

// One JSON object per line; doubles use 17 significant digits.
void write_explanation(std::ostream& out, const Explanation& e);
std::vector<Explanation> read_explanations(std::istream& in);

}  // namespace seedex::explain
