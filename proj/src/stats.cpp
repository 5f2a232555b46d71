#include "seedex/stats.hpp"

#include "seedex/error.hpp"
#include "seedex/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace seedex::stats {

using corpus::Label;

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

ZTest z_statistic(double a, double b, std::size_t n) {
  if (!(a >= 0 && a <= 1 && b >= 0 && b <= 1)) {
    throw ConfigError("accuracies must lie in [0, 1]");
  }
  if (n == 0) throw ConfigError("test-set size must be positive");
  const double m = (a + b) / 2;
  const double variance = m * (1 - m) / static_cast<double>(n);
  if (!(variance > 0)) {
    throw NumericError("z statistic undefined: pooled accuracy is " + std::to_string(m));
  }
  ZTest t;
  t.z = std::abs(a - b) / std::sqrt(variance);
  t.p = normal_upper_tail(t.z);
  return t;
}

std::string_view mode_name(EquivalenceMode mode) {
  return mode == EquivalenceMode::closest ? "closest" : "most_accurate";
}

EquivalenceMode parse_mode(std::string_view name) {
  if (name == "closest") return EquivalenceMode::closest;
  if (name == "most_accurate") return EquivalenceMode::most_accurate;
  throw ConfigError("unknown equivalence mode '" + std::string(name) + "'");
}

EquivalenceSet select_equivalent(std::span<const double> accuracies,
                                 std::span<const std::uint64_t> ids, std::size_t k,
                                 EquivalenceMode mode, std::size_t n) {
  if (ids.size() != accuracies.size()) throw ContractError("accuracy/id count mismatch");
  if (k < 1 || k > accuracies.size()) {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " +
                      std::to_string(accuracies.size()) + "]");
  }
  std::vector<std::size_t> order(accuracies.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::size_t> chosen;
  if (mode == EquivalenceMode::closest) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return accuracies[x] < accuracies[y]; });
    std::size_t best = 0;
    double best_range = accuracies[order[k - 1]] - accuracies[order[0]];
    for (std::size_t s = 1; s + k <= order.size(); ++s) {
      const double range = accuracies[order[s + k - 1]] - accuracies[order[s]];
      if (range < best_range) {
        best_range = range;
        best = s;
      }
    }
    chosen.assign(order.begin() + static_cast<std::ptrdiff_t>(best),
                  order.begin() + static_cast<std::ptrdiff_t>(best + k));
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return accuracies[x] > accuracies[y]; });
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(chosen.begin(), chosen.end());

  EquivalenceSet set;
  set.mode = mode;
  set.indices = chosen;
  set.n = n;
  set.min_accuracy = set.max_accuracy = accuracies[chosen.front()];
  for (auto i : chosen) {
    set.members.push_back(ids[i]);
    set.min_accuracy = std::min(set.min_accuracy, accuracies[i]);
    set.max_accuracy = std::max(set.max_accuracy, accuracies[i]);
  }
  set.epsilon = set.max_accuracy - set.min_accuracy;
  if (set.epsilon > 0) {
    const ZTest t = z_statistic(set.max_accuracy, set.min_accuracy, n);
    set.z = t.z;
    set.p = t.p;
  } else if (n == 0) {
    throw ConfigError("test-set size must be positive");
  }
  set.equivalent = set.z <= kCriticalZ;
  return set;
}

EquivalenceSet select_equivalent(const models::Ensemble& ensemble, std::size_t k,
                                 EquivalenceMode mode, std::size_t n) {
  std::vector<double> acc;
  std::vector<std::uint64_t> ids;
  for (const auto& m : ensemble.members) {
    acc.push_back(m.test_accuracy);
    ids.push_back(m.seed);
  }
  return select_equivalent(acc, ids, k, mode, n);
}

std::vector<std::size_t> concordant_indices(const std::vector<std::vector<Label>>& predictions) {
  if (predictions.empty()) throw ConfigError("concordance needs at least one model");
  const std::size_t docs = predictions.front().size();
  if (docs == 0) throw DataError("concordance over an empty document set");
  for (const auto& p : predictions) {
    if (p.size() != docs) throw ContractError("models predicted different document counts");
  }
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < docs; ++d) {
    bool agree = true;
    for (const auto& p : predictions) agree = agree && p[d] == predictions.front()[d];
    if (agree) out.push_back(d);
  }
  return out;
}

std::vector<std::size_t> concordant_inputs(std::span<const models::NeuralModel> voters,
                                           std::span<const corpus::AnnotatedDocument> docs) {
  std::vector<std::vector<Label>> predictions;
  for (const auto& m : voters) {
    auto& row = predictions.emplace_back();
    for (const auto& d : docs) row.push_back(models::predict(m, d).label);
  }
  return concordant_indices(predictions);
}

std::vector<std::size_t> concordant_inputs(std::span<const models::LogRegModel> voters,
                                           std::span<const lingfeat::FeatureVector> features) {
  std::vector<std::vector<Label>> predictions;
  for (const auto& m : voters) {
    auto& row = predictions.emplace_back();
    for (const auto& x : features) row.push_back(models::predict(m, x).label);
  }
  return concordant_indices(predictions);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("correlation of vectors with different lengths");
  if (x.size() < 2) throw DataError("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) throw NumericError("correlation undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double explanation_correlation(std::span<const std::vector<double>> explanations,
                               std::uint64_t partition_seed) {
  const std::size_t m = explanations.size();
  if (m < 2 || m % 2 != 0) {
    throw ConfigError("split-half correlation needs an even number (>= 2) of explanations, got " +
                      std::to_string(m));
  }
  const std::size_t len = explanations.front().size();
  for (const auto& e : explanations) {
    if (e.size() != len) throw ContractError("explanations have different token counts");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  RandomStream(partition_seed, "partition").shuffle(std::span(order));

  std::vector<double> a, b;
  a.reserve(m / 2 * len);
  b.reserve(m / 2 * len);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& e = explanations[order[i]];
    auto& dst = i < m / 2 ? a : b;
    dst.insert(dst.end(), e.begin(), e.end());
  }
  return pearson(a, b);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

CorrelationReport bootstrap_ci(std::span<const std::vector<double>> explanations,
                               std::size_t resamples, double level, std::uint64_t seed,
                               std::size_t workers) {
  if (resamples < 100) throw ConfigError("bootstrap needs at least 100 resamples");
  if (!(level > 0 && level < 1)) throw ConfigError("confidence level must lie in (0, 1)");

  std::vector<double> rs(resamples);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= resamples) return;
      try {
        rs[b] = explanation_correlation(
            explanations, derive_stream_key(seed, "resample/" + std::to_string(b)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = resamples;
        return;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, resamples));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  CorrelationReport report;
  report.level = level;
  report.resamples = resamples;
  report.partition_seed = seed;
  report.r = std::accumulate(rs.begin(), rs.end(), 0.0) / static_cast<double>(resamples);
  std::sort(rs.begin(), rs.end());
  const double tail = (1 - level) / 2;
  report.lo = quantile_sorted(rs, tail);
  report.hi = quantile_sorted(rs, 1 - tail);
  return report;
}

namespace {

double median_sorted(std::span<const double> s) {
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2;
}

}  // namespace

TokenSummary summarize(std::span<const double> values) {
  if (values.empty()) throw DataError("summary of an empty sample");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size(), half = n / 2;
  TokenSummary t;
  t.min = s.front();
  t.max = s.back();
  t.median = median_sorted(s);
  if (half == 0) {
    t.q1 = t.q3 = t.median;
  } else {
    t.q1 = median_sorted(std::span(s).first(half));
    t.q3 = median_sorted(std::span(s).last(half));
  }
  t.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  for (double v : s) t.nonzero_count += v != 0;
  return t;
}

TokenDistribution characterize_distribution(std::span<const std::vector<double>> relevances,
                                            std::vector<std::string> surfaces) {
  if (relevances.empty()) throw DataError("distribution over zero explanations");
  const std::size_t len = relevances.front().size();
  for (const auto& r : relevances) {
    if (r.size() != len) throw ContractError("explanations have different token counts");
  }
  if (!surfaces.empty() && surfaces.size() != len) {
    throw ContractError("surface count differs from token count");
  }
  TokenDistribution d;
  d.surfaces = std::move(surfaces);
  d.explanation_count = relevances.size();
  std::vector<double> column(relevances.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t k = 0; k < relevances.size(); ++k) column[k] = relevances[k][i];
    d.tokens.push_back(summarize(column));
  }
  return d;
}

TokenDistribution characterize_distribution(std::span<const explain::Explanation> explanations) {
  if (explanations.empty()) throw DataError("distribution over zero explanations");
  std::vector<std::vector<double>> rel;
  for (const auto& e : explanations) {
    if (e.doc_id != explanations.front().doc_id) {
      throw ContractError("explanations belong to different documents");
    }
    rel.push_back(e.relevances);
  }
  return characterize_distribution(rel, explanations.front().tokens);
}

}  // namespace seedex::stats
