#include "seedex/models.hpp"

#include "seedex/error.hpp"
#include "seedex/text.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace seedex::models {

void validate(const TrainConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be strictly positive");
    }
  };
  positive(c.learning_rate, "learning_rate");
  positive(static_cast<double>(c.batch_size), "batch_size");
  positive(static_cast<double>(c.epochs), "epochs");
  positive(static_cast<double>(c.embedding_dim), "embedding_dim");
  positive(static_cast<double>(c.hidden_dim), "hidden_dim");
  positive(static_cast<double>(c.buckets), "buckets");
  positive(c.embedding_init_scale, "embedding_init_scale");
  positive(static_cast<double>(c.max_iter), "max_iter");
  positive(c.tolerance, "tolerance");
  if (!(c.dropout >= 0 && c.dropout < 1)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(c.l2 >= 0) || !std::isfinite(c.l2)) throw ConfigError("l2 must be non-negative");
}

std::string config_digest(const TrainConfig& c) {
  std::ostringstream os;
  os << "lr=" << text::format_g17(c.learning_rate) << ";batch=" << c.batch_size
     << ";epochs=" << c.epochs << ";dropout=" << text::format_g17(c.dropout)
     << ";dim=" << c.embedding_dim << ";hidden=" << c.hidden_dim << ";buckets=" << c.buckets
     << ";pooling=" << static_cast<int>(c.pooling) << ";act=" << static_cast<int>(c.activation)
     << ";init=" << text::format_g17(c.embedding_init_scale) << ";pretrain=" << c.pretrain_seed
     << ";l2=" << text::format_g17(c.l2) << ";max_iter=" << c.max_iter
     << ";tol=" << text::format_g17(c.tolerance) << ";intercept=" << c.fit_intercept;
  return text::hex64(text::fnv1a64(os.str()));
}

corpus::Label decide(double news_score, double opinion_score) {
  return opinion_score > news_score ? corpus::Label::opinion : corpus::Label::news;
}

double accuracy(std::span<const corpus::Label> predicted, std::span<const corpus::Label> gold) {
  if (predicted.size() != gold.size()) throw ContractError("prediction/label count mismatch");
  if (gold.empty()) throw DataError("accuracy of an empty document set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

Ensemble train_ensemble(const corpus::CorpusSplits& splits, std::span<const std::uint64_t> seeds,
                        const TrainConfig& config, std::size_t workers) {
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("ensemble seeds must be unique");
  validate(config);

  Ensemble ensemble;
  ensemble.members.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= seeds.size()) return;
      try {
        EnsembleMember m;
        m.seed = seeds[k];
        m.model = train_neural(splits.train, seeds[k], config);
        if (!splits.validation.empty()) {
          m.validation_accuracy = accuracy(m.model, splits.validation);
        }
        if (!splits.test.empty()) m.test_accuracy = accuracy(m.model, splits.test);
        ensemble.members[k] = std::move(m);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = seeds.size();
        return;
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, seeds.size()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return ensemble;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  auto parse = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad seed '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("bad seed '" + s + "'");
    return v;
  };
  if (auto dots = spec.find(".."); dots != std::string::npos) {
    const auto lo = parse(spec.substr(0, dots));
    const auto hi = parse(spec.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + spec + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(parse(item));
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

}  // namespace seedex::models
