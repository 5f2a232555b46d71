#pragma once

#include "seedex/corpus.hpp"
#include "seedex/explain.hpp"
#include "seedex/logreg.hpp"
#include "seedex/models.hpp"
#include "seedex/neural.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace seedex::stats {

inline constexpr double kCriticalZ = 1.96;

struct ZTest {
  double z = 0;
  double p = 0.5;  // one-sided upper normal tail of z
};

// Two-proportion test on a shared test set of size n:
//   m = (a + b) / 2,   z = |a - b| / sqrt(m (1 - m) / n),   p = 1 - Phi(z).
// Throws NumericError when m is 0 or 1 and ConfigError on out-of-range input.
ZTest z_statistic(double a, double b, std::size_t n);

// 1 - Phi(z).
double normal_upper_tail(double z);

enum class EquivalenceMode { closest, most_accurate };
std::string_view mode_name(EquivalenceMode mode);
EquivalenceMode parse_mode(std::string_view name);

struct EquivalenceSet {
  EquivalenceMode mode = EquivalenceMode::closest;
  std::vector<std::size_t> indices;   // positions in the input, ascending
  std::vector<std::uint64_t> members;  // ids at those positions
  double min_accuracy = 0;
  double max_accuracy = 0;
  double epsilon = 0;
  double z = 0;
  double p = 0.5;
  std::size_t n = 0;
  bool equivalent = true;  // z <= kCriticalZ
};

// closest: among windows of k consecutive accuracies in ascending order,
// the one with the smallest range (ties to the lowest window).
// most_accurate: the k highest accuracies (ties to the earlier position).
// An all-equal subset has z = 0 and p = 0.5 even at accuracy 0 or 1.
EquivalenceSet select_equivalent(std::span<const double> accuracies,
                                 std::span<const std::uint64_t> ids, std::size_t k,
                                 EquivalenceMode mode, std::size_t n);
EquivalenceSet select_equivalent(const models::Ensemble& ensemble, std::size_t k,
                                 EquivalenceMode mode, std::size_t n);

// predictions[m][d] is model m's label for document d. Returns the indices
// of documents on which all models agree.
std::vector<std::size_t> concordant_indices(const std::vector<std::vector<corpus::Label>>& predictions);

std::vector<std::size_t> concordant_inputs(std::span<const models::NeuralModel> voters,
                                           std::span<const corpus::AnnotatedDocument> docs);
std::vector<std::size_t> concordant_inputs(std::span<const models::LogRegModel> voters,
                                           std::span<const lingfeat::FeatureVector> features);

double pearson(std::span<const double> x, std::span<const double> y);

// Shuffles the explanations with the partition seed, concatenates the first
// half into one vector and the second half into another, and returns their
// Pearson correlation. Needs an even count of at least 2 and equal lengths.
double explanation_correlation(std::span<const std::vector<double>> explanations,
                               std::uint64_t partition_seed);

struct CorrelationReport {
  double r = 0;  // mean of the resampled correlations
  double lo = 0;
  double hi = 0;
  double level = 0.95;
  std::size_t resamples = 0;
  std::uint64_t partition_seed = 0;
};

// Percentile interval (linear interpolation between order statistics) over
// `resamples` independent partitions. Resample b uses the seed derived from
// (seed, "resample/<b>"), so the result does not depend on `workers`.
CorrelationReport bootstrap_ci(std::span<const std::vector<double>> explanations,
                               std::size_t resamples = 10000, double level = 0.95,
                               std::uint64_t seed = 0, std::size_t workers = 1);

// Quantile of sorted data by linear interpolation at h = (n - 1) q.
double quantile_sorted(std::span<const double> sorted, double q);

struct TokenSummary {
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
  double mean = 0;
  std::size_t nonzero_count = 0;
};

// Five-number summary where q1 and q3 are the medians of the lower and upper
// halves; for an odd count the median itself belongs to neither half. A
// single value gives that value for all five.
TokenSummary summarize(std::span<const double> values);

struct TokenDistribution {
  std::vector<std::string> surfaces;
  std::vector<TokenSummary> tokens;
  std::size_t explanation_count = 0;
};

TokenDistribution characterize_distribution(std::span<const std::vector<double>> relevances,
                                            std::vector<std::string> surfaces = {});
TokenDistribution characterize_distribution(std::span<const explain::Explanation> explanations);

}  // namespace seedex::stats
